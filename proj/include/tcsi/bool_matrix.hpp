#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tcsi {

class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(std::vector<std::string> row_labels, std::vector<std::string> col_labels);

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  bool at(std::size_t r, std::size_t c) const { return cells_.at(r * cols() + c) != 0; }
  void set(std::size_t r, std::size_t c, bool v) { cells_.at(r * cols() + c) = v ? 1 : 0; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  std::size_t count_ones() const;
  bool column_empty(std::size_t c) const;

  bool operator==(const BoolMatrix&) const = default;

 private:
  std::vector<std::string> row_labels_, col_labels_;
  std::vector<std::uint8_t> cells_;
};

void write_matrix_csv(std::ostream& out, const BoolMatrix& m);
// Aligned text with '*' for ones and '.' for zeros.
void write_matrix_text(std::ostream& out, const BoolMatrix& m);

}  // namespace tcsi
