#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tcsi/bool_matrix.hpp"

namespace tcsi {

struct EquationRow {
  std::string label;
  std::vector<std::size_t> unknowns;  // indices into StructuralModel::unknowns
  std::vector<std::size_t> knowns;
  std::vector<std::size_t> faults;
};

// Equation/variable/fault incidence. A state and its derivative are one
// structural variable.
class StructuralModel {
 public:
  // Registers unseen names in order of first appearance.
  void add_equation(std::string label, const std::vector<std::string>& unknowns,
                    const std::vector<std::string>& knowns = {},
                    const std::vector<std::string>& faults = {});
  std::size_t declare_unknown(const std::string& name);
  std::size_t declare_known(const std::string& name);
  std::size_t declare_fault(const std::string& name);

  const std::vector<EquationRow>& equations() const { return equations_; }
  const std::vector<std::string>& unknowns() const { return unknowns_; }
  const std::vector<std::string>& knowns() const { return knowns_; }
  const std::vector<std::string>& faults() const { return faults_; }

  std::size_t equation_index(std::string_view label) const;
  const EquationRow& equation(std::string_view label) const;
  // Index of the only equation housing `fault`; throws InvalidParameter if
  // it is in none or several.
  std::size_t fault_equation(std::size_t fault) const;
  std::vector<std::string> unknown_names(const EquationRow& row) const;

  // Labels unique, indices in range, each fault in exactly one equation.
  void validate() const;

 private:
  std::vector<EquationRow> equations_;
  std::vector<std::string> unknowns_, knowns_, faults_;
};

// -1 marks an unmatched vertex.
struct Matching {
  std::vector<int> eq_to_var;
  std::vector<int> var_to_eq;
  std::size_t size = 0;
};

// Hopcroft-Karp over the equations flagged in `active` (all when empty).
Matching maximum_matching(const StructuralModel& model, const std::vector<bool>& active = {});

struct DMDecomposition {
  Matching matching;
  std::vector<std::size_t> over_equations, over_unknowns;
  std::vector<std::size_t> just_equations, just_unknowns;
  std::vector<std::size_t> under_equations, under_unknowns;
  // Unknowns touched only by inactive equations.
  std::vector<std::size_t> unused_unknowns;
};

// Over-determined part: equations reachable from unmatched equations by
// alternating paths, plus the unknowns they touch. Under-determined part:
// unknowns reachable from unmatched unknowns, plus their matched equations.
DMDecomposition dm_decompose(const StructuralModel& model, const std::vector<bool>& active = {});

// Over-determined equation set as a membership mask.
std::vector<bool> over_determined_mask(const StructuralModel& model,
                                       const std::vector<bool>& active = {});

struct IsolabilityResult {
  BoolMatrix fim;                // (i, j) = 1: f_i not isolable from f_j
  std::vector<bool> detectable;  // per fault
};

IsolabilityResult structural_isolability(const StructuralModel& model);

StructuralModel build_engine_structural_model();
StructuralModel build_dc_motor_example();

// One equation per line: `label | unknowns | knowns | faults`, names separated
// by spaces. Optional `faults: ...` line fixes the fault order. '#' comments.
StructuralModel parse_structural_model(std::string_view text, std::string_view origin);
StructuralModel load_structural_model(const std::filesystem::path& path);
void write_structural_model(std::ostream& out, const StructuralModel& model);

}  // namespace tcsi
