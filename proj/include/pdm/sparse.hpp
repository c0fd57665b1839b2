#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace pdm {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
            std::vector<double> values);

  /// Duplicate entries are summed.
  static CsrMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  /// Zero-valued matrix with the given per-row column sets (need not be sorted).
  static CsrMatrix from_pattern(int rows, int cols, std::vector<std::vector<int>> row_columns);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Index into values() of entry (r, c), or -1 if outside the pattern.
  int find(int r, int c) const;
  double coeff(int r, int c) const;
  /// Adds to an entry that must exist in the pattern.
  void add(int r, int c, double v);
  void set_zero();

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double norm_inf() const;
  /// Largest |A_ij - A_ji| over the pattern (and its transpose).
  double asymmetry() const;
  /// True when row pointers are consistent and columns are sorted, unique, in range.
  bool structure_ok() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::map<int, double> constraints;  // row -> prescribed value
  bool symmetric = false;
  bool constrained = false;  // set once apply_constraints has run
};

/// Symmetric elimination (rows and columns cleared, rhs lifted) for symmetric systems,
/// row replacement otherwise. The constrained rows become identity rows.
SparseSystem apply_constraints(SparseSystem system);

double norm2(std::span<const double> v);

/// MatrixMarket coordinate format, general real.
void write_matrix_market(const CsrMatrix& a, std::ostream& os);

}  // namespace pdm
