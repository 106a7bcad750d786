#include "kht/free_complex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace kht {

int FreeComplex::rank_at(int h) const {
  int i = index(h);
  return i < 0 ? 0 : static_cast<int>(q[i].size());
}

int FreeComplex::total_rank() const {
  int n = 0;
  for (const auto& g : q) n += static_cast<int>(g.size());
  return n;
}

void FreeComplex::resize_degrees(int new_hmin, int new_hmax) {
  if (q.empty()) {
    hmin = new_hmin;
    int n = new_hmax - new_hmin + 1;
    q.assign(n, {});
    blocks.assign(n, {});
    d.assign(n, SparseMatrix());
    if (left) left->assign(n, SparseMatrix());
    if (right) right->assign(n, SparseMatrix());
    return;
  }
  if (new_hmin > hmin || new_hmax < hmax()) throw std::logic_error("resize_degrees may only grow");
  int front = hmin - new_hmin, back = new_hmax - hmax();
  auto grow = [&](auto& v, auto fill) {
    v.insert(v.begin(), front, fill);
    v.insert(v.end(), back, fill);
  };
  grow(q, std::vector<int>{});
  grow(blocks, std::vector<int>{});
  // Differentials out of the new front degrees are 0 x 0; the last old
  // differential had target rank 0 already.
  std::vector<SparseMatrix> nd;
  for (int i = 0; i < static_cast<int>(q.size()); ++i) {
    int old = i - front;
    int src = static_cast<int>(q[i].size());
    int tgt = i + 1 < static_cast<int>(q.size()) ? static_cast<int>(q[i + 1].size()) : 0;
    if (old >= 0 && old < static_cast<int>(d.size()) && d[old].cols() == src && d[old].rows() == tgt) nd.push_back(d[old]);
    else if (old >= 0 && old < static_cast<int>(d.size()) && d[old].nnz() > 0) {
      SparseMatrix m(tgt, src);
      for (int c = 0; c < d[old].cols(); ++c)
        for (const auto& e : d[old].column(c)) m.set(e.row, c, e.value);
      nd.push_back(m);
    } else {
      nd.emplace_back(tgt, src);
    }
  }
  d = std::move(nd);
  auto grow_action = [&](std::optional<std::vector<SparseMatrix>>& a) {
    if (!a) return;
    std::vector<SparseMatrix> na;
    for (int i = 0; i < static_cast<int>(q.size()); ++i) {
      int old = i - front;
      if (old >= 0 && old < static_cast<int>(a->size())) na.push_back((*a)[old]);
      else na.emplace_back(0, 0);
    }
    a = std::move(na);
  };
  grow_action(left);
  grow_action(right);
  hmin = new_hmin;
}

void FreeComplex::trim() {
  int lo = 0, hi = num_degrees() - 1;
  while (lo <= hi && q[lo].empty()) ++lo;
  while (hi >= lo && q[hi].empty()) --hi;
  if (lo > hi) {
    q.clear();
    blocks.clear();
    d.clear();
    if (left) left->clear();
    if (right) right->clear();
    return;
  }
  auto cut = [&](auto& v) { v = std::vector<typename std::decay_t<decltype(v)>::value_type>(v.begin() + lo, v.begin() + hi + 1); };
  cut(q);
  cut(blocks);
  cut(d);
  if (left) cut(*left);
  if (right) cut(*right);
  // Last differential now targets nothing.
  d.back() = SparseMatrix(0, static_cast<int>(q.back().size()));
  hmin += lo;
}

FreeComplex FreeComplex::shifted(int dh, int dq) const {
  FreeComplex c = *this;
  c.hmin += dh;
  for (auto& g : c.q)
    for (auto& x : g) x += dq;
  return c;
}

FreeComplex FreeComplex::with_ring(const Ring& r) const {
  FreeComplex c = *this;
  c.ring = r;
  auto check = [&](const std::vector<SparseMatrix>& ms) {
    for (const auto& m : ms)
      for (int j = 0; j < m.cols(); ++j)
        for (const auto& e : m.column(j)) r.check(e.value);
  };
  check(c.d);
  if (c.left) check(*c.left);
  if (c.right) check(*c.right);
  return c;
}

void FreeComplex::ensure_blocks() {
  blocks.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    int sum = std::accumulate(blocks[i].begin(), blocks[i].end(), 0);
    if (sum != static_cast<int>(q[i].size())) blocks[i].assign(q[i].size(), 1);
  }
}

namespace {

void fail(const std::string& what) { throw std::logic_error("invalid complex: " + what); }

}  // namespace

void FreeComplex::validate() const {
  int n = num_degrees();
  if (static_cast<int>(blocks.size()) != n || static_cast<int>(d.size()) != n) fail("degree count mismatch");
  for (int i = 0; i < n; ++i) {
    int src = static_cast<int>(q[i].size());
    int tgt = i + 1 < n ? static_cast<int>(q[i + 1].size()) : 0;
    if (d[i].cols() != src || d[i].rows() != tgt) fail("differential shape at degree " + std::to_string(hmin + i));
    if (std::accumulate(blocks[i].begin(), blocks[i].end(), 0) != src) fail("block partition at degree " + std::to_string(hmin + i));
    for (int c = 0; c < src; ++c)
      for (const auto& e : d[i].column(c)) {
        ring.check(e.value);
        if (q[i + 1][e.row] != q[i][c]) fail("differential not q-homogeneous at degree " + std::to_string(hmin + i));
      }
    if (i + 1 < n && !(d[i + 1] * d[i]).is_zero()) fail("d*d != 0 at degree " + std::to_string(hmin + i));
  }
  auto check_action = [&](const std::vector<SparseMatrix>& a, const char* name) {
    if (static_cast<int>(a.size()) != n) fail(std::string(name) + " action degree count");
    for (int i = 0; i < n; ++i) {
      int r = static_cast<int>(q[i].size());
      if (a[i].rows() != r || a[i].cols() != r) fail(std::string(name) + " action shape");
      std::vector<int> block_of(r);
      int pos = 0;
      for (std::size_t b = 0; b < blocks[i].size(); ++b)
        for (int k = 0; k < blocks[i][b]; ++k) block_of[pos++] = static_cast<int>(b);
      for (int c = 0; c < r; ++c)
        for (const auto& e : a[i].column(c)) {
          ring.check(e.value);
          if (q[i][e.row] != q[i][c] - 2) fail(std::string(name) + " action not of q-degree -2");
          if (block_of[e.row] != block_of[c]) fail(std::string(name) + " action leaves a block");
        }
      if (!(a[i] * a[i]).is_zero()) fail(std::string(name) + " action does not square to zero");
      if (i + 1 < n && d[i] * a[i] != a[i + 1] * d[i]) fail(std::string(name) + " action does not commute with d");
    }
  };
  if (left) check_action(*left, "left");
  if (right) check_action(*right, "right");
  if (left && right)
    for (int i = 0; i < n; ++i)
      if ((*left)[i] * (*right)[i] != (*right)[i] * (*left)[i]) fail("actions do not commute");
}

bool FreeComplex::operator==(const FreeComplex& o) const {
  return ring == o.ring && hmin == o.hmin && q == o.q && blocks == o.blocks && d == o.d && left == o.left && right == o.right;
}

FreeComplex direct_sum(const FreeComplex& a, const FreeComplex& b) {
  if (a.ring != b.ring) throw std::invalid_argument("direct sum over different rings");
  if (a.left.has_value() != b.left.has_value() || a.right.has_value() != b.right.has_value())
    throw std::invalid_argument("direct sum of complexes with different actions");
  if (a.num_degrees() == 0) return b;
  if (b.num_degrees() == 0) return a;
  FreeComplex x = a, y = b;
  int lo = std::min(a.hmin, b.hmin), hi = std::max(a.hmax(), b.hmax());
  x.resize_degrees(lo, hi);
  y.resize_degrees(lo, hi);
  FreeComplex s;
  s.ring = a.ring;
  s.hmin = lo;
  int n = hi - lo + 1;
  if (a.left) s.left.emplace();
  if (a.right) s.right.emplace();
  for (int i = 0; i < n; ++i) {
    std::vector<int> g = x.q[i];
    g.insert(g.end(), y.q[i].begin(), y.q[i].end());
    s.q.push_back(g);
    std::vector<int> bl = x.blocks[i];
    bl.insert(bl.end(), y.blocks[i].begin(), y.blocks[i].end());
    s.blocks.push_back(bl);
  }
  auto block_diag = [](const SparseMatrix& m1, const SparseMatrix& m2) {
    SparseMatrix m(m1.rows() + m2.rows(), m1.cols() + m2.cols());
    for (int c = 0; c < m1.cols(); ++c)
      for (const auto& e : m1.column(c)) m.set(e.row, c, e.value);
    for (int c = 0; c < m2.cols(); ++c)
      for (const auto& e : m2.column(c)) m.set(m1.rows() + e.row, m1.cols() + c, e.value);
    return m;
  };
  for (int i = 0; i < n; ++i) {
    s.d.push_back(block_diag(x.d[i], y.d[i]));
    if (s.left) s.left->push_back(block_diag((*x.left)[i], (*y.left)[i]));
    if (s.right) s.right->push_back(block_diag((*x.right)[i], (*y.right)[i]));
  }
  return s;
}

}  // namespace kht
