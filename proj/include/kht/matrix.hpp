#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kht/scalar.hpp"

namespace kht {

// Dense row-major matrix of exact scalars.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
  static Matrix identity(int n);
  static Matrix from_rows(const std::vector<std::vector<long long>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Scalar& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  bool is_zero() const;
  Matrix transpose() const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(const Scalar& s) const;
  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  void swap_rows(int a, int b);
  void swap_cols(int a, int b);
  // row[dst] += f * row[src]
  void add_row(int dst, int src, const Scalar& f);
  void add_col(int dst, int src, const Scalar& f);
  void scale_row(int r, const Scalar& f);

  // Exact determinant by fraction-free elimination over Q.
  Scalar determinant() const;
  std::string str() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Scalar> data_;
};

struct SparseEntry {
  int row;
  Scalar value;
  bool operator==(const SparseEntry& o) const { return row == o.row && value == o.value; }
};

// Column-compressed sparse matrix; each column keeps its entries sorted by row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(static_cast<std::size_t>(cols)) {}
  static SparseMatrix from_dense(const Matrix& m);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(cols_.size()); }
  const std::vector<SparseEntry>& column(int c) const { return cols_[c]; }

  Scalar at(int r, int c) const;
  void set(int r, int c, const Scalar& v);
  void add(int r, int c, const Scalar& v);

  std::size_t nnz() const;
  bool is_zero() const { return nnz() == 0; }
  Matrix to_dense() const;
  SparseMatrix transpose() const;
  SparseMatrix operator*(const SparseMatrix& o) const;
  SparseMatrix operator+(const SparseMatrix& o) const;
  SparseMatrix operator-(const SparseMatrix& o) const;
  SparseMatrix scaled(const Scalar& s) const;
  bool operator==(const SparseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator!=(const SparseMatrix& o) const { return !(*this == o); }

  // Submatrix with the given rows and columns (in that order).
  SparseMatrix select(const std::vector<int>& rows, const std::vector<int>& cols) const;
  // Rows in `rows` must be distinct; a -1 entry drops that row.
  SparseMatrix remap_rows(const std::vector<int>& new_index, int new_rows) const;

 private:
  int rows_ = 0;
  std::vector<std::vector<SparseEntry>> cols_;
};

// Inverse over Q; nullopt when singular or when an entry of the inverse lies
// outside `ring`.
std::optional<Matrix> inverse(const Matrix& m, const Ring& ring = Ring::rationals());
int rank(const Matrix& m);
// Columns form a basis of the kernel over Q, scaled to primitive integer
// vectors when the input is integral.
Matrix nullspace(const Matrix& m);

}  // namespace kht
