#include "kht/homology.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kht {

SmithForm smith_normal_form(const Matrix& m, const Ring& ring, bool with_transforms) {
  Matrix a = m;
  const int R = a.rows(), C = a.cols();
  Matrix u, v;
  if (with_transforms) {
    u = Matrix::identity(R);
    v = Matrix::identity(C);
  }
  auto swap_rows = [&](int i, int j) {
    a.swap_rows(i, j);
    if (with_transforms) u.swap_rows(i, j);
  };
  auto swap_cols = [&](int i, int j) {
    a.swap_cols(i, j);
    if (with_transforms) v.swap_cols(i, j);
  };
  auto add_row = [&](int dst, int src, const Scalar& f) {
    a.add_row(dst, src, f);
    if (with_transforms) u.add_row(dst, src, f);
  };
  auto add_col = [&](int dst, int src, const Scalar& f) {
    a.add_col(dst, src, f);
    if (with_transforms) v.add_col(dst, src, f);
  };

  // Smallest pivot norm in the trailing submatrix, ties broken by fewer
  // nonzeros in its row and column.
  auto pick = [&](int t, int& pr, int& pc) {
    pr = pc = -1;
    mpz_class best;
    int best_weight = 0;
    std::vector<int> row_nz(R, 0), col_nz(C, 0);
    for (int i = t; i < R; ++i)
      for (int j = t; j < C; ++j)
        if (!a.at(i, j).is_zero()) {
          ++row_nz[i];
          ++col_nz[j];
        }
    for (int i = t; i < R; ++i)
      for (int j = t; j < C; ++j) {
        if (a.at(i, j).is_zero()) continue;
        mpz_class n = ring.pivot_norm(a.at(i, j));
        int w = row_nz[i] + col_nz[j];
        if (pr < 0 || n < best || (n == best && w < best_weight)) {
          pr = i;
          pc = j;
          best = n;
          best_weight = w;
        }
      }
  };

  SmithForm out;
  for (int t = 0; t < std::min(R, C); ++t) {
    for (;;) {
      int pr, pc;
      pick(t, pr, pc);
      if (pr < 0) break;
      if (pr != t) swap_rows(t, pr);
      if (pc != t) swap_cols(t, pc);
      bool clean = true;
      for (int i = t + 1; i < R; ++i) {
        if (a.at(i, t).is_zero()) continue;
        add_row(i, t, -ring.quotient(a.at(i, t), a.at(t, t)));
        clean = clean && a.at(i, t).is_zero();
      }
      for (int j = t + 1; j < C; ++j) {
        if (a.at(t, j).is_zero()) continue;
        add_col(j, t, -ring.quotient(a.at(t, j), a.at(t, t)));
        clean = clean && a.at(t, j).is_zero();
      }
      if (!clean) continue;
      bool fixed = false;
      for (int i = t + 1; i < R && !fixed; ++i)
        for (int j = t + 1; j < C; ++j)
          if (!ring.divides(a.at(t, t), a.at(i, j))) {
            add_row(t, i, Scalar(1));
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (a.at(t, t).is_zero()) break;
    Scalar unit = a.at(t, t) / ring.canonical_associate(a.at(t, t));
    if (!unit.is_one()) {
      Scalar inv = Scalar(1) / unit;
      a.scale_row(t, inv);
      if (with_transforms) u.scale_row(t, inv);
    }
    out.divisors.push_back(a.at(t, t));
  }
  out.S = std::move(a);
  out.U = std::move(u);
  out.V = std::move(v);
  return out;
}

HomologyGroup HomologyTable::at(int h, int q) const {
  auto it = groups.find({h, q});
  return it == groups.end() ? HomologyGroup{} : it->second;
}

namespace {

std::string ring_symbol(const Ring& r) { return r.name(); }

std::string group_text(const Ring& r, const HomologyGroup& g) {
  std::vector<std::string> parts;
  if (g.free == 1) parts.push_back(ring_symbol(r));
  else if (g.free > 1) parts.push_back(ring_symbol(r) + "^" + std::to_string(g.free));
  for (long long t : g.torsion) parts.push_back("Z/" + std::to_string(t));
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " + " : "") + parts[i];
  return s;
}

// Reduction of one q-strand by cancelling unit entries, followed by Smith
// normal form on what is left.
class StrandReducer {
 public:
  StrandReducer(const Ring& ring, std::vector<int> sizes) : ring_(ring), size_(std::move(sizes)) {
    int n = static_cast<int>(size_.size());
    col_.resize(n);
    row_.resize(n);
    alive_.resize(n);
    for (int k = 0; k < n; ++k) {
      col_[k].resize(size_[k]);
      row_[k].resize(k + 1 < n ? size_[k + 1] : 0);
      alive_[k].assign(size_[k], 1);
    }
  }

  void set(int k, int r, int c, const Scalar& v) {
    if (v.is_zero()) return;
    col_[k][c][r] = v;
    row_[k][r][c] = v;
  }

  void reduce() {
    int n = static_cast<int>(size_.size());
    for (int k = 0; k + 1 < n; ++k) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (int c = 0; c < size_[k]; ++c) {
          if (!alive_[k][c] || col_[k][c].empty()) continue;
          int best = -1;
          std::size_t cost = 0;
          for (const auto& [r, v] : col_[k][c]) {
            if (!ring_.is_unit(v)) continue;
            std::size_t rc = row_[k][r].size();
            if (best < 0 || rc < cost) { best = r; cost = rc; }
          }
          if (best >= 0) {
            eliminate(k, c, best);
            changed = true;
          }
        }
      }
    }
  }

  std::vector<HomologyGroup> homology() const {
    int n = static_cast<int>(size_.size());
    std::vector<int> alive_count(n, 0), rank(n, 0);
    std::vector<std::vector<Scalar>> divisors(n);
    for (int k = 0; k < n; ++k)
      for (int g = 0; g < size_[k]; ++g) alive_count[k] += alive_[k][g];
    for (int k = 0; k + 1 < n; ++k) {
      std::vector<int> cols, rows;
      for (int c = 0; c < size_[k]; ++c)
        if (alive_[k][c] && !col_[k][c].empty()) cols.push_back(c);
      if (cols.empty()) continue;
      for (int r = 0; r < size_[k + 1]; ++r)
        if (alive_[k + 1][r] && !row_[k][r].empty()) rows.push_back(r);
      std::map<int, int> rindex;
      for (std::size_t i = 0; i < rows.size(); ++i) rindex[rows[i]] = static_cast<int>(i);
      Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, v] : col_[k][cols[j]]) m.at(rindex.at(r), static_cast<int>(j)) = v;
      SmithForm s = smith_normal_form(m, ring_, false);
      rank[k] = static_cast<int>(s.divisors.size());
      divisors[k] = s.divisors;
    }
    std::vector<HomologyGroup> out(n);
    for (int k = 0; k < n; ++k) {
      out[k].free = alive_count[k] - rank[k] - (k > 0 ? rank[k - 1] : 0);
      if (k > 0)
        for (const auto& dv : divisors[k - 1]) {
          if (ring_.is_unit(dv)) continue;
          if (!dv.is_small() || !dv.is_integer()) throw std::overflow_error("torsion order exceeds 64 bits");
          out[k].torsion.push_back(dv.small_num());
        }
      std::sort(out[k].torsion.begin(), out[k].torsion.end());
    }
    return out;
  }

 private:
  void eliminate(int k, int c, int r) {
    int n = static_cast<int>(size_.size());
    Scalar inv = Scalar(1) / col_[k][c].at(r);
    std::vector<std::pair<int, Scalar>> colc, rowr;
    for (const auto& [r2, a] : col_[k][c])
      if (r2 != r) colc.emplace_back(r2, a);
    for (const auto& [c2, b] : row_[k][r])
      if (c2 != c) rowr.emplace_back(c2, b);
    for (const auto& [r2, a] : colc) {
      Scalar f = a * inv;
      for (const auto& [c2, b] : rowr) {
        Scalar delta = -(f * b);
        auto& cell = col_[k][c2][r2];
        cell += delta;
        if (cell.is_zero()) {
          col_[k][c2].erase(r2);
          row_[k][r2].erase(c2);
        } else {
          row_[k][r2][c2] = cell;
        }
      }
    }
    for (const auto& [r2, a] : col_[k][c]) row_[k][r2].erase(c);
    col_[k][c].clear();
    for (const auto& [c2, b] : row_[k][r]) col_[k][c2].erase(r);
    row_[k][r].clear();
    if (k > 0) {
      for (const auto& [c3, v] : row_[k - 1][c]) col_[k - 1][c3].erase(c);
      row_[k - 1][c].clear();
    }
    if (k + 2 <= n - 1) {
      for (const auto& [r3, v] : col_[k + 1][r]) row_[k + 1][r3].erase(r);
      col_[k + 1][r].clear();
    }
    alive_[k][c] = 0;
    alive_[k + 1][r] = 0;
  }

  Ring ring_;
  std::vector<int> size_;
  std::vector<std::vector<std::map<int, Scalar>>> col_, row_;
  std::vector<std::vector<char>> alive_;
};

}  // namespace

HomologyTable bigraded_homology(const FreeComplex& c) {
  HomologyTable t;
  t.ring = c.ring;
  int n = c.num_degrees();
  if (n == 0) return t;
  // q -> per degree list of generator indices; local index of each generator.
  std::map<int, std::vector<std::vector<int>>> strands;
  std::vector<std::vector<int>> local(n);
  for (int i = 0; i < n; ++i) {
    local[i].resize(c.q[i].size());
    for (std::size_t g = 0; g < c.q[i].size(); ++g) {
      auto& s = strands[c.q[i][g]];
      if (s.empty()) s.resize(n);
      local[i][g] = static_cast<int>(s[i].size());
      s[i].push_back(static_cast<int>(g));
    }
  }
  for (auto& [q, gens] : strands) {
    std::vector<int> sizes(n);
    for (int i = 0; i < n; ++i) sizes[i] = static_cast<int>(gens[i].size());
    StrandReducer red(c.ring, sizes);
    for (int i = 0; i + 1 < n; ++i)
      for (int g : gens[i])
        for (const auto& e : c.d[i].column(g)) {
          if (c.q[i + 1][e.row] != q) throw std::logic_error("differential is not q-homogeneous");
          red.set(i, local[i + 1][e.row], local[i][g], e.value);
        }
    red.reduce();
    auto hs = red.homology();
    for (int i = 0; i < n; ++i)
      if (!hs[i].empty()) t.groups[{c.hmin + i, q}] = hs[i];
  }
  return t;
}

std::string HomologyTable::to_text() const {
  std::ostringstream os;
  os << "Khovanov homology over " << ring.name() << "\n";
  if (groups.empty()) os << "  (zero)\n";
  for (const auto& [hq, g] : groups)
    os << "  h=" << hq.first << " q=" << hq.second << ": " << group_text(ring, g) << "\n";
  return os.str();
}

std::string HomologyTable::to_json() const {
  nlohmann::ordered_json j;
  j["ring"] = ring.name();
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& [hq, g] : groups) {
    nlohmann::ordered_json e;
    e["h"] = hq.first;
    e["q"] = hq.second;
    e["free"] = g.free;
    e["torsion"] = g.torsion;
    j["groups"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string HomologyTable::to_csv() const {
  std::ostringstream os;
  os << "ring,h,q,free,torsion\n";
  for (const auto& [hq, g] : groups) {
    os << ring.name() << "," << hq.first << "," << hq.second << "," << g.free << ",";
    for (std::size_t i = 0; i < g.torsion.size(); ++i) os << (i ? ";" : "") << g.torsion[i];
    os << "\n";
  }
  return os.str();
}

HomologyTable HomologyTable::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  HomologyTable t;
  t.ring = Ring::parse(j.at("ring").get<std::string>());
  for (const auto& e : j.at("groups")) {
    HomologyGroup g;
    g.free = e.at("free").get<int>();
    g.torsion = e.at("torsion").get<std::vector<long long>>();
    if (!g.empty()) t.groups[{e.at("h").get<int>(), e.at("q").get<int>()}] = g;
  }
  return t;
}

LaurentPolynomial euler_characteristic(const HomologyTable& t) {
  LaurentPolynomial p;
  for (const auto& [hq, g] : t.groups) {
    long long sgn = (hq.first % 2 == 0) ? 1 : -1;
    p[hq.second] += sgn * g.free;
  }
  for (auto it = p.begin(); it != p.end();) it = it->second == 0 ? p.erase(it) : std::next(it);
  return p;
}

std::string to_string(const LaurentPolynomial& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p) {
    long long a = c < 0 ? -c : c;
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    first = false;
    if (e == 0) { os << a; continue; }
    if (a != 1) os << a << "*";
    os << "q";
    if (e != 1) os << "^" << e;
  }
  return os.str();
}

namespace {

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TorsionPrediction predict_torsion(int p, int k, int l, int m) {
  if (p != 3) throw std::invalid_argument("torsion bidegree formulas are only available for p = 3");
  if (!(0 <= m && m <= l && l <= k)) throw std::invalid_argument("prediction requires 0 <= m <= l <= k");
  TorsionPrediction t;
  t.p = p;
  t.k = k;
  t.l = l;
  t.m = m;
  t.h = 8 * l + 3 + m;
  t.q = 11 * k + 12 * l + 7 + 4 * m;
  t.order = 1;
  for (int i = 0; i < l; ++i) t.order *= p;
  t.multiplicity = binomial(l, m);
  return t;
}

std::vector<TorsionPrediction> predict_all(int p, int k) {
  std::vector<TorsionPrediction> out;
  for (int l = 0; l <= k; ++l)
    for (int m = 0; m <= l; ++m) out.push_back(predict_torsion(p, k, l, m));
  return out;
}

namespace {

// Returns (p, e) when n = p^e with e >= 1, else (0, 0).
std::pair<long long, int> prime_power(long long n) {
  if (n < 2) return {0, 0};
  for (long long p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; ++e; }
      return n == 1 ? std::pair<long long, int>{p, e} : std::pair<long long, int>{0, 0};
    }
  return {n, 1};
}

}  // namespace

SummandReport assert_summand(const HomologyTable& t, int h, int q, long long order, long long min_multiplicity) {
  SummandReport rep;
  HomologyGroup g = t.at(h, q);
  auto [p, e] = prime_power(order);
  for (long long d : g.torsion) {
    if (t.ring.kind() == Ring::Kind::Local) {
      if (d == order) ++rep.found;
    } else if (p != 0) {
      int v = 0;
      while (d % p == 0) { d /= p; ++v; }
      if (v == e) ++rep.found;
    } else if (order > 0 && d % order == 0) {
      ++rep.found;
    }
  }
  rep.ok = rep.found >= min_multiplicity;
  std::ostringstream os;
  os << "Z/" << order << " at (" << h << "," << q << "): found " << rep.found << ", need " << min_multiplicity;
  rep.detail = os.str();
  return rep;
}

}  // namespace kht
