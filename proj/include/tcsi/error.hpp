#pragma once

#include <stdexcept>
#include <string>

namespace tcsi {

// Bad input values handed to a physics routine (non-positive temperature,
// resistance, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration: unknown key, unparsable value, unknown fault or
// cycle name, violated invariant of a config struct.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state derivative or algebraic output became NaN/Inf.
class ModelBlowup : public std::runtime_error {
 public:
  ModelBlowup(std::string equation, double time, const std::string& detail)
      : std::runtime_error("model blowup in " + equation + " at t=" +
                           std::to_string(time) + " s: " + detail),
        equation_(std::move(equation)),
        time_(time) {}

  const std::string& equation() const noexcept { return equation_; }
  double time() const noexcept { return time_; }

 private:
  std::string equation_;
  double time_;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tcsi
