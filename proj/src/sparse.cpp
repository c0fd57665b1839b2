#include "pdm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "pdm/errors.hpp"

namespace pdm {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (!structure_ok()) throw InvalidArgument("inconsistent CSR structure");
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw InvalidArgument("triplet index out of range");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (!col_idx.empty() && k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (int r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::from_pattern(int rows, int cols, std::vector<std::vector<int>> row_columns) {
  if (static_cast<int>(row_columns.size()) != rows) throw InvalidArgument("pattern row count mismatch");
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  for (int r = 0; r < rows; ++r) {
    auto& c = row_columns[r];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    col_idx.insert(col_idx.end(), c.begin(), c.end());
    row_ptr[r + 1] = static_cast<int>(col_idx.size());
  }
  std::vector<double> values(col_idx.size(), 0.0);
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

int CsrMatrix::find(int r, int c) const {
  const auto begin = col_idx_.begin() + row_ptr_[r];
  const auto end = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return -1;
  return static_cast<int>(it - col_idx_.begin());
}

double CsrMatrix::coeff(int r, int c) const {
  const int k = find(r, c);
  return k < 0 ? 0.0 : values_[k];
}

void CsrMatrix::add(int r, int c, double v) {
  const int k = find(r, c);
  if (k < 0) throw InvalidArgument("entry outside the sparsity pattern");
  values_[k] += v;
}

void CsrMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double CsrMatrix::norm_inf() const {
  double m = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

double CsrMatrix::asymmetry() const {
  double m = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      m = std::max(m, std::abs(values_[k] - coeff(col_idx_[k], r)));
    }
  }
  return m;
}

bool CsrMatrix::structure_ok() const {
  if (static_cast<int>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0) return false;
  if (row_ptr_.back() != static_cast<int>(col_idx_.size()) || col_idx_.size() != values_.size()) return false;
  for (int r = 0; r < rows_; ++r) {
    if (row_ptr_[r + 1] < row_ptr_[r]) return false;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_) return false;
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) return false;
    }
  }
  return true;
}

SparseSystem apply_constraints(SparseSystem system) {
  auto& a = system.matrix;
  const int n = a.rows();
  if (static_cast<int>(system.rhs.size()) != n) throw InvalidArgument("rhs size does not match matrix");
  std::vector<char> is_constrained(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [row, g] : system.constraints) {
    if (row < 0 || row >= n) throw InvalidArgument("constraint on out-of-range row " + std::to_string(row));
    is_constrained[row] = 1;
    value[row] = g;
  }
  const auto ptr = a.row_ptr();
  const auto col = a.col_idx();
  auto val = a.values();
  for (int r = 0; r < n; ++r) {
    if (is_constrained[r]) {
      for (int k = ptr[r]; k < ptr[r + 1]; ++k) val[k] = 0.0;
      continue;
    }
    if (!system.symmetric) continue;
    for (int k = ptr[r]; k < ptr[r + 1]; ++k) {
      if (is_constrained[col[k]]) {
        system.rhs[r] -= val[k] * value[col[k]];
        val[k] = 0.0;
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    if (!is_constrained[r]) continue;
    const int k = a.find(r, r);
    if (k < 0) throw InvalidArgument("constrained row " + std::to_string(r) + " has no diagonal entry");
    val[k] = 1.0;
    system.rhs[r] = value[r];
  }
  system.constrained = true;
  return system;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void write_matrix_market(const CsrMatrix& a, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n' << std::setprecision(17);
  const auto ptr = a.row_ptr();
  const auto col = a.col_idx();
  const auto val = a.values();
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = ptr[r]; k < ptr[r + 1]; ++k) os << r + 1 << ' ' << col[k] + 1 << ' ' << val[k] << '\n';
  }
}

}  // namespace pdm
