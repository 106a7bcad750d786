#include "kht/matrix.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kht {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ragged matrix");
    for (int j = 0; j < c; ++j) m.at(i, j) = Scalar(rows[i][j]);
  }
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix p(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Scalar& a = at(i, k);
      if (a.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j)
        if (!o.at(k, j).is_zero()) p.at(i, j) += a * o.at(k, j);
    }
  return p;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
  Matrix s = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] += o.data_[i];
  return s;
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + o.scaled(Scalar(-1)); }

Matrix Matrix::scaled(const Scalar& f) const {
  Matrix s = *this;
  for (auto& v : s.data_) v *= f;
  return s;
}

void Matrix::swap_rows(int a, int b) {
  if (a == b) return;
  for (int j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
}

void Matrix::swap_cols(int a, int b) {
  if (a == b) return;
  for (int i = 0; i < rows_; ++i) std::swap(at(i, a), at(i, b));
}

void Matrix::add_row(int dst, int src, const Scalar& f) {
  if (f.is_zero()) return;
  for (int j = 0; j < cols_; ++j)
    if (!at(src, j).is_zero()) at(dst, j) += f * at(src, j);
}

void Matrix::add_col(int dst, int src, const Scalar& f) {
  if (f.is_zero()) return;
  for (int i = 0; i < rows_; ++i)
    if (!at(i, src).is_zero()) at(i, dst) += f * at(i, src);
}

void Matrix::scale_row(int r, const Scalar& f) {
  for (int j = 0; j < cols_; ++j) at(r, j) *= f;
}

Scalar Matrix::determinant() const {
  if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
  Matrix a = *this;
  Scalar det(1);
  for (int c = 0; c < cols_; ++c) {
    int piv = -1;
    for (int r = c; r < rows_; ++r)
      if (!a.at(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) return Scalar(0);
    if (piv != c) { a.swap_rows(piv, c); det = -det; }
    det *= a.at(c, c);
    Scalar inv = Scalar(1) / a.at(c, c);
    for (int r = c + 1; r < rows_; ++r)
      if (!a.at(r, c).is_zero()) a.add_row(r, c, -(a.at(r, c) * inv));
  }
  return det;
}

std::string Matrix::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

SparseMatrix SparseMatrix::from_dense(const Matrix& m) {
  SparseMatrix s(m.rows(), m.cols());
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (!m.at(i, j).is_zero()) s.cols_[j].push_back({i, m.at(i, j)});
  return s;
}

Scalar SparseMatrix::at(int r, int c) const {
  const auto& col = cols_[c];
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const SparseEntry& e, int row) { return e.row < row; });
  if (it != col.end() && it->row == r) return it->value;
  return Scalar(0);
}

void SparseMatrix::set(int r, int c, const Scalar& v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols()) throw std::out_of_range("sparse matrix index");
  auto& col = cols_[c];
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const SparseEntry& e, int row) { return e.row < row; });
  if (it != col.end() && it->row == r) {
    if (v.is_zero()) col.erase(it);
    else it->value = v;
  } else if (!v.is_zero()) {
    col.insert(it, {r, v});
  }
}

void SparseMatrix::add(int r, int c, const Scalar& v) {
  if (v.is_zero()) return;
  if (r < 0 || r >= rows_ || c < 0 || c >= cols()) throw std::out_of_range("sparse matrix index");
  auto& col = cols_[c];
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const SparseEntry& e, int row) { return e.row < row; });
  if (it != col.end() && it->row == r) {
    it->value += v;
    if (it->value.is_zero()) col.erase(it);
  } else {
    col.insert(it, {r, v});
  }
}

std::size_t SparseMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

Matrix SparseMatrix::to_dense() const {
  Matrix m(rows_, cols());
  for (int j = 0; j < cols(); ++j)
    for (const auto& e : cols_[j]) m.at(e.row, j) = e.value;
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols(), rows_);
  for (int j = 0; j < cols(); ++j)
    for (const auto& e : cols_[j]) t.cols_[e.row].push_back({j, e.value});
  return t;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& o) const {
  if (cols() != o.rows_) throw std::invalid_argument("sparse product: shape mismatch");
  SparseMatrix p(rows_, o.cols());
  std::map<int, Scalar> acc;
  for (int j = 0; j < o.cols(); ++j) {
    acc.clear();
    for (const auto& bk : o.cols_[j])
      for (const auto& a : cols_[bk.row]) acc[a.row] += a.value * bk.value;
    for (auto& [r, v] : acc)
      if (!v.is_zero()) p.cols_[j].push_back({r, v});
  }
  return p;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols() != o.cols()) throw std::invalid_argument("sparse sum: shape mismatch");
  SparseMatrix s = *this;
  for (int j = 0; j < cols(); ++j)
    for (const auto& e : o.cols_[j]) s.add(e.row, j, e.value);
  return s;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& o) const { return *this + o.scaled(Scalar(-1)); }

SparseMatrix SparseMatrix::scaled(const Scalar& f) const {
  SparseMatrix s(rows_, cols());
  if (f.is_zero()) return s;
  for (int j = 0; j < cols(); ++j)
    for (const auto& e : cols_[j]) s.cols_[j].push_back({e.row, e.value * f});
  return s;
}

SparseMatrix SparseMatrix::select(const std::vector<int>& rows, const std::vector<int>& cols) const {
  std::vector<int> index(static_cast<std::size_t>(rows_), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) index[rows[i]] = static_cast<int>(i);
  SparseMatrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (const auto& e : cols_[cols[j]])
      if (index[e.row] >= 0) s.cols_[j].push_back({index[e.row], e.value});
    std::sort(s.cols_[j].begin(), s.cols_[j].end(), [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
  }
  return s;
}

SparseMatrix SparseMatrix::remap_rows(const std::vector<int>& new_index, int new_rows) const {
  SparseMatrix s(new_rows, cols());
  for (int j = 0; j < cols(); ++j) {
    for (const auto& e : cols_[j])
      if (new_index[e.row] >= 0) s.cols_[j].push_back({new_index[e.row], e.value});
    std::sort(s.cols_[j].begin(), s.cols_[j].end(), [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
  }
  return s;
}

}  // namespace kht

namespace kht {

namespace {

// Reduced row echelon form over Q; returns pivot columns.
std::vector<int> rref(Matrix& a) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < a.rows(); ++i)
      if (!a.at(i, c).is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    a.swap_rows(piv, r);
    a.scale_row(r, Scalar(1) / a.at(r, c));
    for (int i = 0; i < a.rows(); ++i)
      if (i != r && !a.at(i, c).is_zero()) a.add_row(i, r, -a.at(i, c));
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

mpz_class lcm_den(const std::vector<Scalar>& v) {
  mpz_class l = 1;
  for (const auto& x : v) {
    mpz_class d = x.denominator();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  return l;
}

}  // namespace

std::optional<Matrix> inverse(const Matrix& m, const Ring& ring) {
  if (m.rows() != m.cols()) return std::nullopt;
  const int n = m.rows();
  Matrix a(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a.at(i, j) = m.at(i, j);
    a.at(i, n + i) = Scalar(1);
  }
  auto piv = rref(a);
  if (static_cast<int>(piv.size()) < n || (n > 0 && piv[n - 1] != n - 1)) return std::nullopt;
  Matrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      inv.at(i, j) = a.at(i, n + j);
      if (!ring.contains(inv.at(i, j))) return std::nullopt;
    }
  return inv;
}

int rank(const Matrix& m) {
  Matrix a = m;
  return static_cast<int>(rref(a).size());
}

Matrix nullspace(const Matrix& m) {
  Matrix a = m;
  auto piv = rref(a);
  std::vector<char> is_pivot(m.cols(), 0);
  for (int c : piv) is_pivot[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix k(m.cols(), static_cast<int>(free_cols.size()));
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    std::vector<Scalar> v(m.cols());
    v[free_cols[f]] = Scalar(1);
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a.at(static_cast<int>(i), free_cols[f]);
    Scalar scale = Scalar::from_mpq(mpq_class(lcm_den(v)));
    mpz_class g = 0;
    for (auto& x : v) {
      x = x * scale;
      mpz_class num = x.numerator();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    }
    for (int i = 0; i < m.cols(); ++i) k.at(i, static_cast<int>(f)) = g > 1 ? v[i] / Scalar::from_mpq(mpq_class(g)) : v[i];
  }
  return k;
}

}  // namespace kht
