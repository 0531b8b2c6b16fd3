#include "tcsi/bool_matrix.hpp"

#include <algorithm>
#include <iomanip>

namespace tcsi {

BoolMatrix::BoolMatrix(std::vector<std::string> row_labels, std::vector<std::string> col_labels)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      cells_(row_labels_.size() * col_labels_.size(), 0) {}

std::size_t BoolMatrix::count_ones() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

bool BoolMatrix::column_empty(std::size_t c) const {
  for (std::size_t r = 0; r < rows(); ++r) {
    if (at(r, c)) return false;
  }
  return true;
}

void write_matrix_csv(std::ostream& out, const BoolMatrix& m) {
  out << "label";
  for (const auto& c : m.col_labels()) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.row_labels()[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << (m.at(r, c) ? 1 : 0);
    out << '\n';
  }
}

void write_matrix_text(std::ostream& out, const BoolMatrix& m) {
  std::size_t w0 = 0;
  for (const auto& r : m.row_labels()) w0 = std::max(w0, r.size());
  std::vector<std::size_t> w(m.cols());
  out << std::setw(static_cast<int>(w0)) << "";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    w[c] = std::max<std::size_t>(m.col_labels()[c].size(), 1);
    out << ' ' << std::setw(static_cast<int>(w[c])) << m.col_labels()[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << std::left << std::setw(static_cast<int>(w0)) << m.row_labels()[r] << std::right;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << ' ' << std::setw(static_cast<int>(w[c])) << (m.at(r, c) ? '*' : '.');
    }
    out << '\n';
  }
}

}  // namespace tcsi
