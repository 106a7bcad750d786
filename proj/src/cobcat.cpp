#include "kht/cobcat.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kht::cob {

std::string Smoothing::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int p = 0; p < points(); ++p)
    if (p < partner[p]) {
      os << (first ? "" : " ") << p << "-" << partner[p];
      first = false;
    }
  os << "}";
  if (circles) os << "+" << circles << "o";
  return os.str();
}

Smoothing Smoothing::from_pairs(int points, const std::vector<std::pair<int, int>>& pairs, int circles) {
  Smoothing s;
  s.partner.assign(points, -1);
  s.circles = circles;
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= points || b >= points || a == b || s.partner[a] >= 0 || s.partner[b] >= 0)
      throw std::invalid_argument("invalid matching");
    s.partner[a] = b;
    s.partner[b] = a;
  }
  for (int p : s.partner)
    if (p < 0) throw std::invalid_argument("matching is not perfect");
  return s;
}

std::size_t SmoothingHash::operator()(const Smoothing& s) const noexcept {
  std::size_t h = static_cast<std::size_t>(s.circles) * 0x9e3779b97f4a7c15ULL;
  for (int p : s.partner) h = (h ^ static_cast<std::size_t>(p + 1)) * 0x100000001b3ULL;
  return h;
}

Terms add(const Terms& a, const Terms& b) {
  Terms out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].dots < b[j].dots)) out.push_back(a[i++]);
    else if (i == a.size() || b[j].dots < a[i].dots) out.push_back(b[j++]);
    else {
      Scalar c = a[i].coef + b[j].coef;
      if (!c.is_zero()) out.push_back({a[i].dots, c});
      ++i;
      ++j;
    }
  }
  return out;
}

Terms scaled(const Terms& a, const Scalar& s) {
  Terms out;
  if (s.is_zero()) return out;
  out.reserve(a.size());
  for (const auto& t : a) out.push_back({t.dots, t.coef * s});
  return out;
}

void add_into(Terms& acc, const Terms& b, const Scalar& s) {
  if (s.is_one()) acc = add(acc, b);
  else acc = add(acc, scaled(b, s));
}

Cycles cycles(const Smoothing& a, const Smoothing& b) {
  if (a.points() != b.points()) throw std::invalid_argument("smoothings have different boundaries");
  Cycles c;
  int k = a.points();
  c.of_point.assign(k, -1);
  for (int p = 0; p < k; ++p) {
    if (c.of_point[p] >= 0) continue;
    int id = c.arc_cycles++;
    int x = p;
    do {
      c.of_point[x] = id;
      int y = a.partner[x];
      c.of_point[y] = id;
      x = b.partner[y];
    } while (x != p);
  }
  c.a_circles = a.circles;
  c.b_circles = b.circles;
  if (c.total() > kMaxCycles) throw std::length_error("too many cycles in a morphism");
  return c;
}

int degree(const Smoothing& a, const Smoothing& b, Mask dots) {
  return cycles(a, b).total() - a.points() / 2 - 2 * std::popcount(dots);
}

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Elements of a glued surface before grouping into components.
struct SurfaceBuilder {
  std::vector<int> chi;
  std::vector<Mask> in_f, in_g;
  std::vector<int> seams;  // (a, b) pairs glued along an interval
  std::vector<std::pair<int, int>> joins;

  int element(int euler, Mask f, Mask g) {
    chi.push_back(euler);
    in_f.push_back(f);
    in_g.push_back(g);
    return static_cast<int>(chi.size()) - 1;
  }
  // Gluing along an interval lowers the Euler characteristic by one, gluing
  // along a circle leaves it unchanged.
  void glue_interval(int a, int b) { joins.push_back({a, b}); seams.push_back(1); }
  void glue_circle(int a, int b) { joins.push_back({a, b}); seams.push_back(0); }

  GluePlan finish(const std::vector<int>& out_witness) {
    int n = static_cast<int>(chi.size());
    Dsu d(n);
    for (auto [a, b] : joins) d.unite(a, b);
    std::vector<int> comp_of(n, -1);
    GluePlan plan;
    std::vector<int> euler;
    for (int e = 0; e < n; ++e) {
      int r = d.find(e);
      if (comp_of[r] < 0) {
        comp_of[r] = static_cast<int>(plan.components.size());
        plan.components.emplace_back();
        euler.push_back(0);
      }
      int c = comp_of[r];
      plan.components[c].in_f |= in_f[e];
      plan.components[c].in_g |= in_g[e];
      euler[c] += chi[e];
    }
    for (std::size_t j = 0; j < joins.size(); ++j) euler[comp_of[d.find(joins[j].first)]] -= seams[j];
    plan.out_cycles = static_cast<int>(out_witness.size());
    for (std::size_t j = 0; j < out_witness.size(); ++j)
      plan.components[comp_of[d.find(out_witness[j])]].out |= Mask(1) << j;
    for (std::size_t c = 0; c < plan.components.size(); ++c) {
      int boundary = std::popcount(plan.components[c].out);
      int twice_genus = 2 - euler[c] - boundary;
      if (twice_genus < 0 || twice_genus % 2 != 0) throw std::logic_error("glued surface has inconsistent Euler characteristic");
      plan.components[c].genus = twice_genus / 2;
    }
    return plan;
  }
};

struct Partial {
  Mask dots;
  Scalar coef;
};

// Evaluates one component with `dots` dots; appends the resulting partial
// terms to `next` given the current partial list.
void evaluate(const GlueComponent& comp, int dots, const std::vector<Partial>& cur, std::vector<Partial>& next) {
  int w = comp.genus + dots;
  next.clear();
  if (w >= 2) return;
  if (comp.out == 0) {
    if (w != 1) return;
    Scalar f(1 << comp.genus);
    for (const auto& p : cur) next.push_back({p.dots, p.coef * f});
    return;
  }
  if (w == 1) {
    Scalar f(1 << comp.genus);
    for (const auto& p : cur) next.push_back({p.dots | comp.out, comp.genus ? p.coef * f : p.coef});
    return;
  }
  for (Mask rest = comp.out; rest; rest &= rest - 1) {
    Mask undotted = rest & (~rest + 1);
    for (const auto& p : cur) next.push_back({p.dots | (comp.out & ~undotted), p.coef});
  }
}

Terms collect(std::vector<Partial>& parts) {
  std::sort(parts.begin(), parts.end(), [](const Partial& a, const Partial& b) { return a.dots < b.dots; });
  Terms out;
  for (const auto& p : parts) {
    if (!out.empty() && out.back().dots == p.dots) out.back().coef += p.coef;
    else out.push_back({p.dots, p.coef});
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef.is_zero(); }), out.end());
  return out;
}

}  // namespace

Terms apply(const GluePlan& plan, const Terms& f, const Terms* g) {
  static const Terms unit{{0, Scalar(1)}};
  const Terms& gg = g ? *g : unit;
  std::vector<Partial> all, cur, next;
  for (const auto& tf : f)
    for (const auto& tg : gg) {
      cur.assign(1, {0, tf.coef * tg.coef});
      for (const auto& comp : plan.components) {
        int dots = std::popcount(tf.dots & comp.in_f) + std::popcount(tg.dots & comp.in_g);
        evaluate(comp, dots, cur, next);
        std::swap(cur, next);
        if (cur.empty()) break;
      }
      all.insert(all.end(), cur.begin(), cur.end());
    }
  return collect(all);
}

GluePlan vertical_plan(const Smoothing& a, const Smoothing& b, const Smoothing& c) {
  Cycles ab = cycles(a, b), bc = cycles(b, c), ac = cycles(a, c);
  SurfaceBuilder sb;
  int n1 = ab.total(), n2 = bc.total();
  for (int i = 0; i < n1; ++i) sb.element(1, Mask(1) << i, 0);
  for (int i = 0; i < n2; ++i) sb.element(1, 0, Mask(1) << i);
  for (int p = 0; p < b.points(); ++p)
    if (p < b.partner[p]) sb.glue_interval(ab.of_point[p], n1 + bc.of_point[p]);
  for (int j = 0; j < b.circles; ++j) sb.glue_circle(ab.b_circle(j), n1 + bc.a_circle(j));
  std::vector<int> witness(ac.total(), -1);
  for (int p = 0; p < a.points(); ++p)
    if (witness[ac.of_point[p]] < 0) witness[ac.of_point[p]] = ab.of_point[p];
  for (int i = 0; i < a.circles; ++i) witness[ac.a_circle(i)] = ab.a_circle(i);
  for (int j = 0; j < c.circles; ++j) witness[ac.b_circle(j)] = n1 + bc.b_circle(j);
  return sb.finish(witness);
}

Glued glue(const Smoothing& x, const Smoothing& y, const Identification& id) {
  const Smoothing* side[2] = {&x, &y};
  std::vector<int> other[2];
  other[0].assign(x.points(), -1);
  other[1].assign(y.points(), -1);
  for (auto [px, py] : id.glued) {
    if (other[0][px] >= 0 || other[1][py] >= 0) throw std::invalid_argument("point glued twice");
    other[0][px] = py;
    other[1][py] = px;
  }
  std::vector<int> out_of[2];
  out_of[0].assign(x.points(), -1);
  out_of[1].assign(y.points(), -1);
  int k = static_cast<int>(id.order.size());
  for (int o = 0; o < k; ++o) {
    auto [s, p] = id.order[o];
    if (other[s][p] >= 0) throw std::invalid_argument("glued point listed in output order");
    out_of[s][p] = o;
  }
  Glued g;
  g.result.partner.assign(k, -1);
  std::vector<char> visited[2];
  visited[0].assign(x.points(), 0);
  visited[1].assign(y.points(), 0);
  for (int o = 0; o < k; ++o) {
    if (g.result.partner[o] >= 0) continue;
    auto [s, p] = id.order[o];
    for (;;) {
      visited[s][p] = 1;
      int p2 = side[s]->partner[p];
      visited[s][p2] = 1;
      if (other[s][p2] < 0) {
        int o2 = out_of[s][p2];
        if (o2 < 0) throw std::invalid_argument("boundary point missing from output order");
        g.result.partner[o] = o2;
        g.result.partner[o2] = o;
        break;
      }
      p = other[s][p2];
      s = 1 - s;
    }
  }
  for (int i = 0; i < x.circles; ++i) g.circle_origin.push_back({0, 0, i});
  for (int i = 0; i < y.circles; ++i) g.circle_origin.push_back({1, 0, i});
  g.circle_of[0].assign(x.points(), -1);
  g.circle_of[1].assign(y.points(), -1);
  for (auto [px, py] : id.glued) {
    if (visited[0][px]) continue;
    int index = static_cast<int>(g.circle_origin.size());
    g.circle_origin.push_back({0, 1, px});
    int s = 0, p = px;
    while (!visited[s][p]) {
      visited[s][p] = 1;
      int p2 = side[s]->partner[p];
      visited[s][p2] = 1;
      g.circle_of[s][p] = g.circle_of[s][p2] = index;
      p = other[s][p2];
      s = 1 - s;
    }
  }
  g.result.circles = static_cast<int>(g.circle_origin.size());
  return g;
}

GluePlan horizontal_plan(const Smoothing& fa, const Smoothing& fb, const Smoothing& s, int f_side, const Identification& id) {
  Glued ga = f_side == 0 ? glue(fa, s, id) : glue(s, fa, id);
  Glued gb = f_side == 0 ? glue(fb, s, id) : glue(s, fb, id);
  Cycles cf = cycles(fa, fb);
  Cycles co = cycles(ga.result, gb.result);
  SurfaceBuilder sb;
  int n1 = cf.total();
  for (int i = 0; i < n1; ++i) sb.element(1, Mask(1) << i, 0);
  std::vector<int> strip(s.points(), -1);
  for (int p = 0; p < s.points(); ++p)
    if (p < s.partner[p]) strip[p] = strip[s.partner[p]] = sb.element(1, 0, 0);
  std::vector<int> cylinder(s.circles);
  for (int i = 0; i < s.circles; ++i) cylinder[i] = sb.element(0, 0, 0);
  for (auto [px, py] : id.glued) {
    int fp = f_side == 0 ? px : py;
    int sp = f_side == 0 ? py : px;
    sb.glue_interval(cf.of_point[fp], strip[sp]);
  }
  auto element_of = [&](int side, int kind, int index, bool source) {
    if (side == f_side) {
      if (kind == 1) return cf.of_point[index];
      return source ? cf.a_circle(index) : cf.b_circle(index);
    }
    return kind == 1 ? strip[index] : cylinder[index];
  };
  std::vector<int> witness(co.total(), -1);
  for (int o = 0; o < static_cast<int>(id.order.size()); ++o) {
    int cyc = co.of_point[o];
    if (witness[cyc] < 0) witness[cyc] = element_of(id.order[o].first, 1, id.order[o].second, true);
  }
  for (int i = 0; i < ga.result.circles; ++i) {
    const auto& w = ga.circle_origin[i];
    witness[co.a_circle(i)] = element_of(w.side, w.kind, w.index, true);
  }
  for (int j = 0; j < gb.result.circles; ++j) {
    const auto& w = gb.circle_origin[j];
    witness[co.b_circle(j)] = element_of(w.side, w.kind, w.index, false);
  }
  return sb.finish(witness);
}

std::optional<int> Cobordism::net_degree() const {
  std::optional<int> deg;
  for (const auto& t : terms) {
    int d = degree(source.smoothing, target.smoothing, t.dots) + target.qshift - source.qshift;
    if (deg && *deg != d) return std::nullopt;
    deg = d;
  }
  return deg.value_or(0);
}

Terms normalize(const Smoothing& source, const Smoothing& target, const std::vector<RawComponent>& comps, const Scalar& coef) {
  Cycles c = cycles(source, target);
  std::vector<int> used(c.total(), 0);
  std::vector<Partial> cur{{0, coef}}, next;
  for (const auto& rc : comps) {
    GlueComponent gc;
    gc.genus = rc.genus;
    for (int cyc : rc.cycles) {
      if (cyc < 0 || cyc >= c.total() || used[cyc]++) throw std::invalid_argument("surface boundary does not match source and target");
      gc.out |= Mask(1) << cyc;
    }
    evaluate(gc, rc.dots, cur, next);
    std::swap(cur, next);
  }
  for (int u : used)
    if (!u) throw std::invalid_argument("surface boundary does not match source and target");
  return collect(cur);
}

Cobordism identity(const PlanarObject& o) {
  Cycles c = cycles(o.smoothing, o.smoothing);
  std::vector<RawComponent> comps;
  for (int i = 0; i < c.arc_cycles; ++i) comps.push_back({{i}, 0, 0});
  for (int i = 0; i < o.smoothing.circles; ++i) comps.push_back({{c.a_circle(i), c.b_circle(i)}, 0, 0});
  return {o, o, normalize(o.smoothing, o.smoothing, comps)};
}

Cobordism compose(const Cobordism& g, const Cobordism& f) {
  if (!(f.target == g.source)) throw std::invalid_argument("compose: boundary mismatch");
  GluePlan plan = vertical_plan(f.source.smoothing, f.target.smoothing, g.target.smoothing);
  return {f.source, g.target, apply(plan, f.terms, &g.terms)};
}

Cobordism operator+(const Cobordism& a, const Cobordism& b) {
  if (!(a.source == b.source) || !(a.target == b.target)) throw std::invalid_argument("sum of morphisms with different ends");
  return {a.source, a.target, add(a.terms, b.terms)};
}

DeloopMaps deloop_maps(const PlanarObject& obj) {
  if (obj.smoothing.circles < 1) throw std::invalid_argument("deloop_maps: object has no circle");
  DeloopMaps m;
  Smoothing reduced = obj.smoothing;
  reduced.circles -= 1;
  m.plus = {reduced, obj.qshift + 1};
  m.minus = {reduced, obj.qshift - 1};
  int last = obj.smoothing.circles - 1;
  auto cap = [&](const PlanarObject& to, int dots) {
    Cycles c = cycles(obj.smoothing, to.smoothing);
    std::vector<RawComponent> comps;
    for (int i = 0; i < c.arc_cycles; ++i) comps.push_back({{i}, 0, 0});
    for (int i = 0; i < last; ++i) comps.push_back({{c.a_circle(i), c.b_circle(i)}, 0, 0});
    comps.push_back({{c.a_circle(last)}, 0, dots});
    return Cobordism{obj, to, normalize(obj.smoothing, to.smoothing, comps)};
  };
  auto cup = [&](const PlanarObject& from, int dots) {
    Cycles c = cycles(from.smoothing, obj.smoothing);
    std::vector<RawComponent> comps;
    for (int i = 0; i < c.arc_cycles; ++i) comps.push_back({{i}, 0, 0});
    for (int i = 0; i < last; ++i) comps.push_back({{c.a_circle(i), c.b_circle(i)}, 0, 0});
    comps.push_back({{c.b_circle(last)}, 0, dots});
    return Cobordism{from, obj, normalize(from.smoothing, obj.smoothing, comps)};
  };
  m.out_plus = cap(m.plus, 1);
  m.out_minus = cap(m.minus, 0);
  m.in_plus = cup(m.plus, 0);
  m.in_minus = cup(m.minus, 1);
  return m;
}

std::optional<Scalar> is_iso_entry(const Cobordism& m, const Ring& ring) {
  if (!(m.source == m.target) || m.source.smoothing.circles != 0) return std::nullopt;
  if (m.terms.size() != 1 || m.terms[0].dots != 0 || !ring.is_unit(m.terms[0].coef)) return std::nullopt;
  return m.terms[0].coef;
}

std::string to_string(const Terms& t) {
  if (t.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << (i ? " + " : "") << t[i].coef << "*[";
    bool first = true;
    for (int b = 0; b < kMaxCycles; ++b)
      if (t[i].dots & (Mask(1) << b)) {
        os << (first ? "" : ",") << b;
        first = false;
      }
    os << "]";
  }
  return os.str();
}

}  // namespace kht::cob
