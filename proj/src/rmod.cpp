#include "kht/rmod.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "kht/homology.hpp"

namespace kht::rmod {

namespace {

using Strands = std::map<int, std::vector<int>, std::greater<int>>;  // q -> generator indices, q descending

Strands strands_of(const std::vector<int>& q) {
  Strands s;
  for (int i = 0; i < static_cast<int>(q.size()); ++i) s[q[i]].push_back(i);
  return s;
}

Matrix dense_block(const SparseMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  std::vector<int> where(m.rows(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) where[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& e : m.column(cols[j]))
      if (where[e.row] >= 0) out.at(where[e.row], static_cast<int>(j)) = e.value;
  return out;
}

std::vector<Scalar> mat_vec(const SparseMatrix& m, const std::vector<Scalar>& v) {
  std::vector<Scalar> out(m.rows());
  for (int c = 0; c < m.cols(); ++c) {
    if (v[c].is_zero()) continue;
    for (const auto& e : m.column(c)) out[e.row] = out[e.row] + e.value * v[c];
  }
  return out;
}

bool all_zero(const std::vector<Scalar>& v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.is_zero(); });
}

SparseMatrix from_columns(const std::vector<std::vector<Scalar>>& cols, int rows) {
  SparseMatrix m(rows, static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < rows; ++i)
      if (!cols[j][i].is_zero()) m.set(i, static_cast<int>(j), cols[j][i]);
  return m;
}

// Inverse of a basis matrix that is block diagonal along q-strands.
std::optional<SparseMatrix> strand_inverse(const SparseMatrix& p, const std::vector<int>& q_new, const std::vector<int>& q_old, const Ring& ring) {
  const int n = p.rows();
  SparseMatrix inv(n, n);
  Strands sn = strands_of(q_new), so = strands_of(q_old);
  for (const auto& [q, cols] : sn) {
    auto it = so.find(q);
    if (it == so.end() || it->second.size() != cols.size()) return std::nullopt;
    const auto& rows = it->second;
    Matrix block = dense_block(p, rows, cols);
    auto bi = inverse(block, ring);
    if (!bi) return std::nullopt;
    // bi maps old coordinates (rows) to new (cols).
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = 0; b < rows.size(); ++b)
        if (!bi->at(static_cast<int>(a), static_cast<int>(b)).is_zero()) inv.set(cols[a], rows[b], bi->at(static_cast<int>(a), static_cast<int>(b)));
  }
  return inv;
}

FreeComplex change_basis(const FreeComplex& m, const std::vector<SparseMatrix>& p, const std::vector<SparseMatrix>& pinv, std::vector<std::vector<int>> q, std::vector<std::vector<int>> blocks) {
  FreeComplex r = m;
  r.q = std::move(q);
  r.blocks = std::move(blocks);
  const int n = m.num_degrees();
  for (int k = 0; k < n; ++k) {
    if (k + 1 < n) r.d[k] = pinv[k + 1] * (m.d[k] * p[k]);
    else r.d[k] = SparseMatrix(0, m.rank_at(m.hmin + k));
  }
  auto conj = [&](const std::optional<std::vector<SparseMatrix>>& a) -> std::optional<std::vector<SparseMatrix>> {
    if (!a) return std::nullopt;
    std::vector<SparseMatrix> out;
    for (int k = 0; k < n; ++k) out.push_back(pinv[k] * ((*a)[k] * p[k]));
    return out;
  };
  r.left = conj(m.left);
  r.right = conj(m.right);
  return r;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + sep.size();
  }
  return out;
}

}  // namespace

std::string Presentation::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::C: os << "C(" << param << ")"; break;
    case Kind::D: os << "D(" << param << ")"; break;
    case Kind::Dt: os << "Dt(" << param << ")"; break;
    case Kind::E: os << "E"; break;
    case Kind::Runit: os << "Runit"; break;
    case Kind::RR: os << "RR"; break;
  }
  if (hshift) os << "[" << hshift << "]";
  if (qshift) os << "{" << qshift << "}";
  return os.str();
}

Presentation parse_presentation(std::string_view text) {
  std::string s = trim(text);
  std::size_t i = 0;
  auto fail = [&](const std::string& why) { throw std::invalid_argument("bad presentation '" + s + "': " + why); };
  std::string name;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) name += s[i++];
  Presentation p;
  bool wants_param = false;
  if (name == "C") { p.kind = Presentation::Kind::C; wants_param = true; }
  else if (name == "D") { p.kind = Presentation::Kind::D; wants_param = true; }
  else if (name == "Dt") { p.kind = Presentation::Kind::Dt; wants_param = true; }
  else if (name == "E") p.kind = Presentation::Kind::E;
  else if (name == "Runit") p.kind = Presentation::Kind::Runit;
  else if (name == "RR") p.kind = Presentation::Kind::RR;
  else fail("unknown complex '" + name + "'");
  auto number = [&](char close) {
    std::size_t end = s.find(close, i);
    if (end == std::string::npos) fail(std::string("missing '") + close + "'");
    std::string body = trim(std::string_view(s).substr(i, end - i));
    i = end + 1;
    try {
      std::size_t used = 0;
      long long v = std::stoll(body, &used);
      if (used != body.size()) fail("not an integer: " + body);
      return v;
    } catch (const std::logic_error&) {
      fail("not an integer: " + body);
    }
    return 0LL;
  };
  auto skip = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
  skip();
  if (wants_param) {
    if (i >= s.size() || s[i] != '(') fail("missing parameter");
    ++i;
    p.param = number(')');
  }
  skip();
  if (i < s.size() && s[i] == '[') { ++i; p.hshift = static_cast<int>(number(']')); }
  skip();
  if (i < s.size() && s[i] == '{') { ++i; p.qshift = static_cast<int>(number('}')); }
  skip();
  if (i != s.size()) fail("trailing text");
  return p;
}

FreeComplex expand(const Presentation& p, const Ring& ring) {
  using K = Presentation::Kind;
  const Scalar n(p.param);
  // R (x) R basis: 1(x)1, X(x)1, 1(x)X, X(x)X.
  auto rr_left = [] {
    SparseMatrix a(4, 4);
    a.set(1, 0, Scalar(1));
    a.set(3, 2, Scalar(1));
    return a;
  };
  auto rr_right = [] {
    SparseMatrix a(4, 4);
    a.set(2, 0, Scalar(1));
    a.set(3, 1, Scalar(1));
    return a;
  };
  auto r_act = [] {
    SparseMatrix a(2, 2);
    a.set(1, 0, Scalar(1));
    return a;
  };
  FreeComplex c;
  c.ring = Ring::integers();
  switch (p.kind) {
    case K::C: {
      c.q = {{1, -1, -1, -3}, {3, 1, 1, -1}};
      c.blocks = {{4}, {4}};
      SparseMatrix d(4, 4);
      d.set(1, 0, n);
      d.set(2, 0, Scalar(-1));
      d.set(3, 1, Scalar(-1));
      d.set(3, 2, n);
      c.d = {d, SparseMatrix(0, 4)};
      c.left = std::vector<SparseMatrix>{rr_left(), rr_left()};
      c.right = std::vector<SparseMatrix>{rr_right(), rr_right()};
      break;
    }
    case K::D:
    case K::Dt: {
      c.q = {{0, -2}, {2, 0}};
      c.blocks = {{2}, {2}};
      SparseMatrix d(2, 2);
      d.set(1, 0, n);
      c.d = {d, SparseMatrix(0, 2)};
      if (p.kind == K::D) c.left = std::vector<SparseMatrix>{r_act(), r_act()};
      else c.right = std::vector<SparseMatrix>{r_act(), r_act()};
      break;
    }
    case K::E: {
      c.q = {{2, 0, 0, -2}, {2, 0}};
      c.blocks = {{4}, {2}};
      SparseMatrix d(2, 4);
      d.set(0, 0, Scalar(1));
      d.set(1, 1, Scalar(1));
      d.set(1, 2, Scalar(1));
      c.d = {d, SparseMatrix(0, 2)};
      c.left = std::vector<SparseMatrix>{rr_left(), r_act()};
      c.right = std::vector<SparseMatrix>{rr_right(), r_act()};
      break;
    }
    case K::Runit: {
      c.q = {{0, -2}};
      c.blocks = {{2}};
      c.d = {SparseMatrix(0, 2)};
      c.left = std::vector<SparseMatrix>{r_act()};
      break;
    }
    case K::RR: {
      c.q = {{2, 0, 0, -2}};
      c.blocks = {{4}};
      c.d = {SparseMatrix(0, 4)};
      c.left = std::vector<SparseMatrix>{rr_left()};
      c.right = std::vector<SparseMatrix>{rr_right()};
      break;
    }
  }
  return c.with_ring(ring).shifted(p.hshift, p.qshift);
}

FreeComplex evaluate(std::string_view expression, const Ring& ring) {
  std::optional<FreeComplex> total;
  for (const auto& summand : split(expression, "(+)")) {
    std::optional<FreeComplex> prod;
    for (const auto& factor : split(summand, "(x)")) {
      FreeComplex f = expand(parse_presentation(factor), ring);
      prod = prod ? tensor_over_R(*prod, f) : f;
    }
    total = total ? direct_sum(*total, *prod) : *prod;
  }
  return *total;
}

RBasis r_basis(const FreeComplex& m, Side side) {
  const auto& act = side == Side::Left ? m.left : m.right;
  if (!act) throw std::invalid_argument(std::string("complex has no ") + (side == Side::Left ? "left" : "right") + " action");
  RBasis rb;
  rb.side = side;
  const Ring& ring = m.ring;
  for (int k = 0; k < m.num_degrees(); ++k) {
    const int n = static_cast<int>(m.q[k].size());
    const SparseMatrix& a = (*act)[k];
    Strands st = strands_of(m.q[k]);
    std::vector<std::vector<Scalar>> gens;
    std::vector<int> gq;
    std::map<int, int> rank_at;
    for (const auto& [q, cols] : st) {
      auto below = st.find(q - 2);
      std::vector<int> rows = below == st.end() ? std::vector<int>{} : below->second;
      Matrix aq = dense_block(a, rows, cols);
      SmithForm sf = smith_normal_form(aq, ring, true);
      for (const auto& d : sf.divisors)
        if (!ring.is_unit(d))
          throw NotFree("action has elementary divisor " + d.str() + " at h=" + std::to_string(m.hmin + k) + " q=" + std::to_string(q));
      int r = static_cast<int>(sf.divisors.size());
      rank_at[q] = r;
      int from_above = rank_at.count(q + 2) ? rank_at[q + 2] : 0;
      if (static_cast<int>(cols.size()) != r + from_above)
        throw NotFree("kernel of the action differs from its image at h=" + std::to_string(m.hmin + k) + " q=" + std::to_string(q));
      for (int i = 0; i < r; ++i) {
        std::vector<Scalar> v(n);
        for (std::size_t j = 0; j < cols.size(); ++j) v[cols[j]] = sf.V.at(static_cast<int>(j), i);
        gens.push_back(v);
        gq.push_back(q);
      }
    }
    std::vector<std::vector<Scalar>> cols = gens;
    std::vector<int> qn = gq;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      cols.push_back(mat_vec(a, gens[i]));
      qn.push_back(gq[i] - 2);
    }
    if (static_cast<int>(cols.size()) != n) throw NotFree("rank is not twice the number of generators at h=" + std::to_string(m.hmin + k));
    SparseMatrix p = from_columns(cols, n);
    auto pinv = strand_inverse(p, qn, m.q[k], ring);
    if (!pinv) throw NotFree("generators do not give a basis at h=" + std::to_string(m.hmin + k));
    rb.basis.push_back(std::move(p));
    rb.inverse.push_back(std::move(*pinv));
    rb.gen_q.push_back(gq);
  }
  return rb;
}

FreeComplex tensor_over_R(const FreeComplex& m, const FreeComplex& n) {
  if (m.ring != n.ring) throw std::invalid_argument("tensor factors use different rings");
  if (!m.right) throw std::invalid_argument("left factor has no right action");
  if (!n.left) throw std::invalid_argument("right factor has no left action");
  RBasis rb = r_basis(m, Side::Right);
  const int am = m.num_degrees(), an = n.num_degrees();
  // R-coordinates (alpha on generators, beta on X * generators) of d and of
  // the left action applied to each generator of M.
  struct Coords {
    std::vector<std::pair<int, Scalar>> alpha, beta;
  };
  auto coords = [&](const std::vector<Scalar>& v, int k) {
    Coords c;
    std::vector<Scalar> w = mat_vec(rb.inverse[k], v);
    int g = rb.generators(k);
    for (int i = 0; i < static_cast<int>(w.size()); ++i) {
      if (w[i].is_zero()) continue;
      if (i < g) c.alpha.push_back({i, w[i]});
      else c.beta.push_back({i - g, w[i]});
    }
    return c;
  };
  std::vector<std::vector<Coords>> dcoord(am), lcoord(am);
  for (int k = 0; k < am; ++k) {
    int g = rb.generators(k);
    for (int i = 0; i < g; ++i) {
      std::vector<Scalar> v(m.q[k].size());
      for (const auto& e : rb.basis[k].column(i)) v[e.row] = e.value;
      if (k + 1 < am) dcoord[k].push_back(coords(mat_vec(m.d[k], v), k + 1));
      else dcoord[k].push_back({});
      if (m.left) lcoord[k].push_back(coords(mat_vec((*m.left)[k], v), k));
    }
  }
  const int degrees = am + an - 1;
  FreeComplex r;
  r.ring = m.ring;
  r.hmin = m.hmin + n.hmin;
  r.q.assign(degrees, {});
  std::vector<std::vector<int>> offset(am, std::vector<int>(an, 0));
  for (int t = 0; t < degrees; ++t)
    for (int a = 0; a < am; ++a) {
      int b = t - a;
      if (b < 0 || b >= an) continue;
      offset[a][b] = static_cast<int>(r.q[t].size());
      for (int i = 0; i < rb.generators(a); ++i)
        for (int qn : n.q[b]) r.q[t].push_back(rb.gen_q[a][i] + qn - 1);
    }
  auto index = [&](int a, int b, int i, int j) { return offset[a][b] + i * static_cast<int>(n.q[b].size()) + j; };
  for (int t = 0; t < degrees; ++t) {
    int tgt = t + 1 < degrees ? static_cast<int>(r.q[t + 1].size()) : 0;
    r.d.emplace_back(tgt, static_cast<int>(r.q[t].size()));
  }
  const bool keep_left = m.left.has_value(), keep_right = n.right.has_value();
  std::vector<SparseMatrix> left, right;
  for (int t = 0; t < degrees; ++t) {
    int sz = static_cast<int>(r.q[t].size());
    if (keep_left) left.emplace_back(sz, sz);
    if (keep_right) right.emplace_back(sz, sz);
  }
  // Adds c * (gen i of M_a) (x) (X^e n_j) into column `col` of `target`.
  auto put = [&](SparseMatrix& target, int col, int a, int b, const Coords& cd, int j) {
    for (const auto& [i, v] : cd.alpha) target.add(index(a, b, i, j), col, v);
    for (const auto& [i, v] : cd.beta)
      for (const auto& e : (*n.left)[b].column(j)) target.add(index(a, b, i, e.row), col, v * e.value);
  };
  for (int a = 0; a < am; ++a)
    for (int b = 0; b < an; ++b) {
      int t = a + b;
      Scalar sign = ((m.hmin + a) % 2 == 0) ? Scalar(1) : Scalar(-1);
      for (int i = 0; i < rb.generators(a); ++i)
        for (int j = 0; j < static_cast<int>(n.q[b].size()); ++j) {
          int col = index(a, b, i, j);
          if (a + 1 < am) put(r.d[t], col, a + 1, b, dcoord[a][i], j);
          if (b + 1 < an)
            for (const auto& e : n.d[b].column(j)) r.d[t].add(index(a, b + 1, i, e.row), col, sign * e.value);
          if (keep_left) put(left[t], col, a, b, lcoord[a][i], j);
          if (keep_right)
            for (const auto& e : (*n.right)[b].column(j)) right[t].add(index(a, b, i, e.row), col, e.value);
        }
    }
  if (keep_left) r.left = std::move(left);
  if (keep_right) r.right = std::move(right);
  r.blocks.clear();
  for (int t = 0; t < degrees; ++t) r.blocks.push_back(r.q[t].empty() ? std::vector<int>{} : std::vector<int>{static_cast<int>(r.q[t].size())});
  if (!keep_left && !keep_right) {
    r.blocks.clear();
    r.ensure_blocks();
  } else {
    refine_blocks(r);
  }
  r.trim();
  return r;
}

bool refine_blocks(FreeComplex& m) {
  if (!m.left && !m.right) {
    m.blocks.clear();
    m.ensure_blocks();
    return true;
  }
  const int nd = m.num_degrees();
  const Ring& ring = m.ring;
  std::vector<SparseMatrix> p(nd), pinv(nd);
  std::vector<std::vector<int>> new_q(nd), new_blocks(nd);
  for (int k = 0; k < nd; ++k) {
    const int n = static_cast<int>(m.q[k].size());
    Strands st = strands_of(m.q[k]);
    std::vector<const SparseMatrix*> acts;
    if (m.left) acts.push_back(&(*m.left)[k]);
    if (m.right) acts.push_back(&(*m.right)[k]);
    std::vector<std::vector<Scalar>> cols;
    for (const auto& [q, rows] : st) {
      auto above = st.find(q + 2);
      std::vector<int> src = above == st.end() ? std::vector<int>{} : above->second;
      Matrix w(static_cast<int>(rows.size()), static_cast<int>(src.size() * acts.size()));
      for (std::size_t a = 0; a < acts.size(); ++a) {
        Matrix part = dense_block(*acts[a], rows, src);
        for (int i = 0; i < part.rows(); ++i)
          for (int j = 0; j < part.cols(); ++j) w.at(i, static_cast<int>(a * src.size()) + j) = part.at(i, j);
      }
      SmithForm sf = smith_normal_form(w, ring, true);
      for (const auto& d : sf.divisors)
        if (!ring.is_unit(d)) return false;
      auto uinv = inverse(sf.U, ring);
      if (!uinv) return false;
      const int r = static_cast<int>(sf.divisors.size());
      for (int g = r; g < static_cast<int>(rows.size()); ++g) {
        std::vector<Scalar> v(n);
        for (std::size_t i = 0; i < rows.size(); ++i) v[rows[i]] = uinv->at(static_cast<int>(i), g);
        // The cyclic block generated by v.
        std::vector<std::vector<Scalar>> cand{v};
        std::vector<int> cq{q};
        std::vector<std::vector<Scalar>> images;
        for (auto* a : acts) images.push_back(mat_vec(*a, v));
        for (std::size_t a = 0; a < images.size(); ++a) {
          cand.push_back(images[a]);
          cq.push_back(q - 2);
        }
        if (acts.size() == 2) {
          cand.push_back(mat_vec(*acts[0], images[1]));
          cq.push_back(q - 4);
        }
        std::vector<std::vector<Scalar>> kept;
        int size = 0;
        for (std::size_t c = 0; c < cand.size(); ++c) {
          if (all_zero(cand[c])) continue;
          Matrix test(n, static_cast<int>(kept.size()) + 1);
          for (std::size_t j = 0; j < kept.size(); ++j)
            for (int i = 0; i < n; ++i) test.at(i, static_cast<int>(j)) = kept[j][i];
          for (int i = 0; i < n; ++i) test.at(i, static_cast<int>(kept.size())) = cand[c][i];
          if (rank(test) <= static_cast<int>(kept.size())) continue;
          kept.push_back(cand[c]);
          new_q[k].push_back(cq[c]);
          ++size;
        }
        for (auto& v2 : kept) cols.push_back(std::move(v2));
        new_blocks[k].push_back(size);
      }
    }
    if (static_cast<int>(cols.size()) != n) return false;
    p[k] = from_columns(cols, n);
    auto inv = strand_inverse(p[k], new_q[k], m.q[k], ring);
    if (!inv) return false;
    pinv[k] = std::move(*inv);
  }
  m = change_basis(m, p, pinv, new_q, new_blocks);
  return true;
}

FreeComplex reduce_equivariant(const FreeComplex& input, ReduceStats* stats) {
  FreeComplex m = input;
  m.ensure_blocks();
  const Ring& ring = m.ring;
  while (true) {
    const int nd = m.num_degrees();
    struct Found {
      int cls = 2, k = 0, b = 0, bp = 0;
      Matrix uinv;
    } best;
    for (int k = 0; k + 1 < nd && best.cls > 0; ++k) {
      std::vector<int> start_k(m.blocks[k].size() + 1, 0), start_k1(m.blocks[k + 1].size() + 1, 0);
      std::partial_sum(m.blocks[k].begin(), m.blocks[k].end(), start_k.begin() + 1);
      std::partial_sum(m.blocks[k + 1].begin(), m.blocks[k + 1].end(), start_k1.begin() + 1);
      std::vector<int> block_of_row(m.q[k + 1].size());
      for (std::size_t bb = 0; bb + 1 < start_k1.size(); ++bb)
        for (int r = start_k1[bb]; r < start_k1[bb + 1]; ++r) block_of_row[r] = static_cast<int>(bb);
      for (std::size_t b = 0; b < m.blocks[k].size() && best.cls > 0; ++b) {
        std::set<int> targets;
        for (int c = start_k[b]; c < start_k[b + 1]; ++c)
          for (const auto& e : m.d[k].column(c)) targets.insert(block_of_row[e.row]);
        for (int bp : targets) {
          if (m.blocks[k + 1][bp] != m.blocks[k][b]) continue;
          std::vector<int> rows, cols;
          for (int r = start_k1[bp]; r < start_k1[bp + 1]; ++r) rows.push_back(r);
          for (int c = start_k[b]; c < start_k[b + 1]; ++c) cols.push_back(c);
          Matrix u = dense_block(m.d[k], rows, cols);
          auto uinv = inverse(u, ring);
          if (!uinv) continue;
          Scalar det = u.determinant();
          int cls = (det == Scalar(1) || det == Scalar(-1)) ? 0 : 1;
          if (cls < best.cls) best = {cls, k, static_cast<int>(b), bp, *uinv};
          if (best.cls == 0) break;
        }
      }
    }
    if (best.cls == 2) break;
    const int k = best.k;
    std::vector<int> start_k(m.blocks[k].size() + 1, 0), start_k1(m.blocks[k + 1].size() + 1, 0);
    std::partial_sum(m.blocks[k].begin(), m.blocks[k].end(), start_k.begin() + 1);
    std::partial_sum(m.blocks[k + 1].begin(), m.blocks[k + 1].end(), start_k1.begin() + 1);
    std::vector<int> b1, b2, keep_k, keep_k1;
    for (int c = 0; c < static_cast<int>(m.q[k].size()); ++c)
      (c >= start_k[best.b] && c < start_k[best.b + 1] ? b1 : keep_k).push_back(c);
    for (int r = 0; r < static_cast<int>(m.q[k + 1].size()); ++r)
      (r >= start_k1[best.bp] && r < start_k1[best.bp + 1] ? b2 : keep_k1).push_back(r);
    if (stats) {
      std::ostringstream os;
      os << "cancel h=" << m.hmin + k << " q=" << m.q[k][b1[0]] << " size " << b1.size();
      stats->log.push_back(os.str());
      stats->cancelled++;
    }
    const SparseMatrix& dk = m.d[k];
    SparseMatrix delta = dk.select(b2, keep_k);
    SparseMatrix gamma = dk.select(keep_k1, b1);
    SparseMatrix core = dk.select(keep_k1, keep_k);
    SparseMatrix newd = core - gamma * (SparseMatrix::from_dense(best.uinv) * delta);
    std::vector<int> all_prev, all_next;
    if (k > 0) {
      for (int c = 0; c < m.d[k - 1].cols(); ++c) all_prev.push_back(c);
      m.d[k - 1] = m.d[k - 1].select(keep_k, all_prev);
    }
    if (k + 1 < nd) {
      for (int r = 0; r < m.d[k + 1].rows(); ++r) all_next.push_back(r);
      m.d[k + 1] = m.d[k + 1].select(all_next, keep_k1);
    }
    m.d[k] = newd;
    auto shrink = [&](std::optional<std::vector<SparseMatrix>>& a) {
      if (!a) return;
      (*a)[k] = (*a)[k].select(keep_k, keep_k);
      (*a)[k + 1] = (*a)[k + 1].select(keep_k1, keep_k1);
    };
    shrink(m.left);
    shrink(m.right);
    auto keep_q = [](const std::vector<int>& q, const std::vector<int>& idx) {
      std::vector<int> out;
      for (int i : idx) out.push_back(q[i]);
      return out;
    };
    m.q[k] = keep_q(m.q[k], keep_k);
    m.q[k + 1] = keep_q(m.q[k + 1], keep_k1);
    m.blocks[k].erase(m.blocks[k].begin() + best.b);
    m.blocks[k + 1].erase(m.blocks[k + 1].begin() + best.bp);
  }
  m.trim();
  return m;
}

MatchResult match_summand(const FreeComplex& input, const Presentation& target, Window window) {
  return match_complex(input, expand(target, input.ring), window);
}

MatchResult match_complex(const FreeComplex& input, const FreeComplex& target, Window window) {
  MatchResult res;
  FreeComplex m = input;
  m.trim();
  FreeComplex t = target.ring == m.ring ? target : target.with_ring(m.ring);
  t.trim();
  const int lo = t.hmin, hi = t.hmax();
  res.hmin = lo;
  if (window == Window::Top && hi != m.hmax()) {
    res.detail = "window ends at " + std::to_string(hi) + " but the complex ends at " + std::to_string(m.hmax());
    return res;
  }
  if (window == Window::Bottom && lo != m.hmin) {
    res.detail = "window starts at " + std::to_string(lo) + " but the complex starts at " + std::to_string(m.hmin);
    return res;
  }
  if (m.index(lo) < 0 || m.index(hi) < 0) {
    res.detail = "window outside the support";
    return res;
  }
  std::ostringstream leaks;
  if (m.index(lo - 1) >= 0 && m.d[m.index(lo - 1)].nnz())
    leaks << m.d[m.index(lo - 1)].nnz() << " differential entries enter degree " << lo << " from below; ";
  if (m.index(hi + 1) >= 0 && m.d[m.index(hi)].nnz())
    leaks << m.d[m.index(hi)].nnz() << " differential entries leave degree " << hi << " upwards; ";
  if (!leaks.str().empty()) {
    res.detail = "window is not split: " + leaks.str();
    return res;
  }
  std::vector<std::pair<const std::vector<SparseMatrix>*, const std::vector<SparseMatrix>*>> acts;
  if (t.left) {
    if (!m.left) { res.detail = "complex lacks a left action"; return res; }
    acts.push_back({&*m.left, &*t.left});
  }
  if (t.right) {
    if (!m.right) { res.detail = "complex lacks a right action"; return res; }
    acts.push_back({&*m.right, &*t.right});
  }
  const int nw = hi - lo + 1;
  for (int w = 0; w < nw; ++w) {
    auto a = m.q[m.index(lo + w)], b = t.q[w];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      res.detail = "quantum gradings differ in degree " + std::to_string(lo + w);
      return res;
    }
  }
  // Unknowns: phi_w[i][j] for q_i == q_j.
  std::vector<std::map<std::pair<int, int>, int>> var(nw);
  int nv = 0;
  for (int w = 0; w < nw; ++w) {
    const auto& qm = m.q[m.index(lo + w)];
    for (int j = 0; j < static_cast<int>(t.q[w].size()); ++j)
      for (int i = 0; i < static_cast<int>(qm.size()); ++i)
        if (qm[i] == t.q[w][j]) var[w][{i, j}] = nv++;
  }
  std::vector<std::map<int, Scalar>> eqs;
  // L * phi_w - phi_w' * Rt, entries (i, j) of M_{w'} x T_w.
  auto add_eqs = [&](int wl, const SparseMatrix* lm, int wr, const SparseMatrix* rt, int rows, int cols) {
    std::vector<std::vector<std::pair<int, Scalar>>> lrows(rows);
    if (lm)
      for (int c = 0; c < lm->cols(); ++c)
        for (const auto& e : lm->column(c)) lrows[e.row].push_back({c, e.value});
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        std::map<int, Scalar> eq;
        if (lm)
          for (const auto& [r, v] : lrows[i]) {
            auto it = var[wl].find({r, j});
            if (it != var[wl].end()) eq[it->second] = eq[it->second] + v;
          }
        if (rt)
          for (const auto& e : rt->column(j)) {
            auto it = var[wr].find({i, e.row});
            if (it != var[wr].end()) eq[it->second] = eq[it->second] - e.value;
          }
        std::erase_if(eq, [](const auto& kv) { return kv.second.is_zero(); });
        if (!eq.empty()) eqs.push_back(std::move(eq));
      }
  };
  for (int w = 0; w < nw; ++w) {
    int mk = m.index(lo + w);
    int rows = static_cast<int>(m.q[mk].size()), cols = static_cast<int>(t.q[w].size());
    for (const auto& [am, at] : acts) add_eqs(w, &(*am)[mk], w, &(*at)[w], rows, cols);
    if (w + 1 < nw) {
      int rows1 = static_cast<int>(m.q[mk + 1].size());
      add_eqs(w, &m.d[mk], w + 1, &t.d[w], rows1, cols);
    }
  }
  Matrix sys(static_cast<int>(eqs.size()), nv);
  for (std::size_t e = 0; e < eqs.size(); ++e)
    for (const auto& [v, c] : eqs[e]) sys.at(static_cast<int>(e), v) = c;
  Matrix ker = nullspace(sys);
  const int dim = ker.cols();
  if (dim == 0) {
    res.detail = "no nonzero graded chain map from the target";
    return res;
  }
  auto build = [&](const std::vector<int>& coef) {
    std::vector<Matrix> phi;
    for (int w = 0; w < nw; ++w) phi.emplace_back(static_cast<int>(m.q[m.index(lo + w)].size()), static_cast<int>(t.q[w].size()));
    for (int w = 0; w < nw; ++w)
      for (const auto& [ij, v] : var[w]) {
        Scalar s;
        for (int c = 0; c < dim; ++c)
          if (coef[c]) s = s + Scalar(coef[c]) * ker.at(v, c);
        phi[w].at(ij.first, ij.second) = s;
      }
    return phi;
  };
  auto invertible = [&](const std::vector<Matrix>& phi) {
    for (int w = 0; w < nw; ++w) {
      const auto& qm = m.q[m.index(lo + w)];
      Strands sm = strands_of(qm), stt = strands_of(t.q[w]);
      for (const auto& [q, cols] : stt) {
        const auto& rows = sm.at(q);
        Matrix blk(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (std::size_t j = 0; j < cols.size(); ++j) {
            const Scalar& x = phi[w].at(rows[i], cols[j]);
            if (!m.ring.contains(x)) return false;
            blk.at(static_cast<int>(i), static_cast<int>(j)) = x;
          }
        if (!m.ring.is_unit(blk.determinant())) return false;
      }
    }
    return true;
  };
  // Deterministic search: basis vectors, then small integer combinations.
  std::vector<std::vector<int>> tries;
  for (int c = 0; c < dim; ++c) {
    std::vector<int> v(dim, 0);
    v[c] = 1;
    tries.push_back(v);
  }
  const int span = dim <= 4 ? 2 : 1;
  if (dim <= 8) {
    std::vector<int> v(dim, -span);
    while (true) {
      int nz = 0;
      for (int x : v) nz += x != 0;
      if (nz >= 2) tries.push_back(v);
      int pos = 0;
      while (pos < dim && v[pos] == span) v[pos++] = -span;
      if (pos == dim) break;
      v[pos]++;
    }
    std::stable_sort(tries.begin() + dim, tries.end(), [](const auto& a, const auto& b) {
      int na = 0, nb = 0;
      for (int x : a) na += std::abs(x);
      for (int x : b) nb += std::abs(x);
      return na < nb;
    });
  }
  for (const auto& coef : tries) {
    auto phi = build(coef);
    if (invertible(phi)) {
      res.ok = true;
      res.witness = std::move(phi);
      std::ostringstream os;
      os << "isomorphism found in a " << dim << "-dimensional space of equivariant chain maps";
      res.detail = os.str();
      return res;
    }
  }
  res.detail = "no invertible map among " + std::to_string(tries.size()) + " candidates in a " + std::to_string(dim) + "-dimensional solution space";
  return res;
}

FreeComplex remove_E(const FreeComplex& m) {
  FreeComplex c = m;
  c.trim();
  if (!c.left || !c.right || c.num_degrees() != 3 || c.rank_at(c.hmin) != 8 || c.rank_at(c.hmin + 1) != 12 || c.rank_at(c.hmin + 2) != 4)
    throw std::invalid_argument("complex does not have the shape of C(m) tensored with E");
  ReduceStats st;
  FreeComplex r = reduce_equivariant(c, &st);
  if (st.cancelled != 2 || r.total_rank() != 8) throw std::invalid_argument("expected exactly two cancellations");
  return r;
}

}  // namespace kht::rmod
