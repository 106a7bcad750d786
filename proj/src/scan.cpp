#include "kht/scan.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kht::scan {

using cob::Mask;
using cob::Smoothing;
using cob::Terms;

CobComplex::CobComplex(Ring ring) : ring_(std::move(ring)) {}

CobComplex CobComplex::unit(Ring ring) {
  CobComplex c(std::move(ring));
  c.add_generator({c.intern(Smoothing{}), 0, 0});
  return c;
}

int CobComplex::position(int label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) throw std::logic_error("label not on the boundary");
  return static_cast<int>(it - labels_.begin());
}

void CobComplex::set_labels(std::vector<int> labels) {
  if (!std::is_sorted(labels.begin(), labels.end())) throw std::logic_error("labels must be sorted");
  labels_ = std::move(labels);
}

int CobComplex::intern(const Smoothing& s) {
  auto it = object_index_.find(s);
  if (it != object_index_.end()) return it->second;
  int id = static_cast<int>(objects_.size());
  objects_.push_back(s);
  object_index_.emplace(s, id);
  return id;
}

int CobComplex::add_generator(const Generator& g) {
  gens_.push_back(g);
  alive_.push_back(1);
  out_.emplace_back();
  in_.emplace_back();
  return static_cast<int>(gens_.size()) - 1;
}

int CobComplex::live_count() const { return static_cast<int>(std::count(alive_.begin(), alive_.end(), 1)); }

int CobComplex::min_degree() const {
  int m = 0;
  bool any = false;
  for (int i = 0; i < size(); ++i)
    if (alive_[i] && (!any || gens_[i].h < m)) { m = gens_[i].h; any = true; }
  return m;
}

std::vector<int> CobComplex::degree_counts() const {
  std::map<int, int> counts;
  for (int i = 0; i < size(); ++i)
    if (alive_[i]) counts[gens_[i].h]++;
  std::vector<int> out;
  if (counts.empty()) return out;
  for (int h = counts.begin()->first; h <= counts.rbegin()->first; ++h) out.push_back(counts.count(h) ? counts[h] : 0);
  return out;
}

const Terms* CobComplex::entry(int src, int tgt) const {
  auto it = out_[src].find(tgt);
  return it == out_[src].end() ? nullptr : &it->second;
}

void CobComplex::add_entry(int src, int tgt, const Terms& t, const Scalar& s) {
  if (t.empty() || s.is_zero()) return;
  auto& e = out_[src][tgt];
  cob::add_into(e, t, s);
  if (e.empty()) {
    out_[src].erase(tgt);
    in_[tgt].erase(src);
  } else {
    in_[tgt].insert(src);
  }
  touch(src, tgt);
}

void CobComplex::drop_entry(int src, int tgt) {
  out_[src].erase(tgt);
  in_[tgt].erase(src);
  touch(src, tgt);
}

bool CobComplex::is_iso(int src, int tgt, Scalar* unit) const {
  const Generator& a = gens_[src];
  const Generator& b = gens_[tgt];
  if (a.object != b.object || a.q != b.q || objects_[a.object].circles != 0) return false;
  const Terms* t = entry(src, tgt);
  if (!t || t->size() != 1 || (*t)[0].dots != 0 || !ring_.is_unit((*t)[0].coef)) return false;
  if (unit) *unit = (*t)[0].coef;
  return true;
}

void CobComplex::touch(int src, int tgt) {
  if (!candidates_) return;
  int h = gens_[src].h;
  candidates_->erase({0, h, tgt, src});
  candidates_->erase({1, h, tgt, src});
  Scalar u;
  if (alive_[src] && alive_[tgt] && is_iso(src, tgt, &u)) {
    bool pm1 = u == Scalar(1) || u == Scalar(-1);
    candidates_->insert({pm1 ? 0 : 1, h, tgt, src});
  }
}

const cob::GluePlan& CobComplex::compose_plan(int a, int b, int c) {
  auto key = std::make_tuple(a, b, c);
  auto it = compose_cache_.find(key);
  if (it != compose_cache_.end()) return it->second;
  return compose_cache_.emplace(key, cob::vertical_plan(objects_[a], objects_[b], objects_[c])).first->second;
}

int CobComplex::eliminate() {
  std::set<Candidate> cands;
  candidates_ = &cands;
  for (int s = 0; s < size(); ++s) {
    if (!alive_[s]) continue;
    for (const auto& [t, terms] : out_[s]) touch(s, t);
  }
  int count = 0;
  while (!cands.empty()) {
    Candidate c = *cands.begin();
    int b1 = c.src, b2 = c.tgt;
    Scalar u;
    if (!is_iso(b1, b2, &u)) throw std::logic_error("stale elimination candidate");
    Scalar minus_inv = -(Scalar(1) / u);
    std::vector<int> sources, targets;
    for (int x : in_[b2])
      if (x != b1) sources.push_back(x);
    for (const auto& [y, t] : out_[b1])
      if (y != b2) targets.push_back(y);
    std::sort(sources.begin(), sources.end());
    std::sort(targets.begin(), targets.end());
    for (int x : sources) {
      Terms delta = out_[x].at(b2);
      for (int y : targets) {
        const Terms& gamma = out_[b1].at(y);
        const cob::GluePlan& plan = compose_plan(gens_[x].object, gens_[b1].object, gens_[y].object);
        add_entry(x, y, cob::apply(plan, delta, &gamma), minus_inv);
      }
    }
    for (int g : {b1, b2}) {
      std::vector<int> outs, ins(in_[g].begin(), in_[g].end());
      for (const auto& [y, t] : out_[g]) outs.push_back(y);
      for (int y : outs) drop_entry(g, y);
      for (int x : ins) drop_entry(x, g);
      alive_[g] = 0;
    }
    ++count;
  }
  candidates_ = nullptr;
  return count;
}

void CobComplex::compact() {
  std::vector<int> index(size(), -1);
  int n = 0;
  for (int i = 0; i < size(); ++i)
    if (alive_[i]) index[i] = n++;
  std::vector<Generator> gens;
  std::vector<std::unordered_map<int, Terms>> outs(n);
  std::vector<std::unordered_set<int>> ins(n);
  for (int i = 0; i < size(); ++i) {
    if (!alive_[i]) continue;
    gens.push_back(gens_[i]);
    for (auto& [t, terms] : out_[i]) {
      if (index[t] < 0) continue;
      outs[index[i]].emplace(index[t], std::move(terms));
      ins[index[t]].insert(index[i]);
    }
  }
  gens_ = std::move(gens);
  out_ = std::move(outs);
  in_ = std::move(ins);
  alive_.assign(n, 1);
}

cob::Cobordism CobComplex::morphism(int src, int tgt) const {
  cob::Cobordism m;
  m.source = {objects_[gens_[src].object], gens_[src].q};
  m.target = {objects_[gens_[tgt].object], gens_[tgt].q};
  if (const Terms* t = entry(src, tgt)) m.terms = *t;
  return m;
}

void CobComplex::validate() const {
  auto* self = const_cast<CobComplex*>(this);
  for (int s = 0; s < size(); ++s) {
    if (!alive_[s]) continue;
    std::map<int, Terms> twice;
    for (const auto& [m, f] : out_[s]) {
      if (!alive_[m]) throw std::logic_error("entry into a dead generator");
      if (gens_[m].h != gens_[s].h + 1) throw std::logic_error("entry does not raise degree by one");
      for (const auto& t : f)
        if (cob::degree(objects_[gens_[s].object], objects_[gens_[m].object], t.dots) != gens_[s].q - gens_[m].q)
          throw std::logic_error("inhomogeneous differential entry");
      for (const auto& [t, g] : out_[m]) {
        const cob::GluePlan& plan = self->compose_plan(gens_[s].object, gens_[m].object, gens_[t].object);
        cob::add_into(twice[t], cob::apply(plan, f, &g));
      }
    }
    for (const auto& [t, terms] : twice)
      if (!terms.empty()) throw std::logic_error("d o d != 0 at generator " + std::to_string(s));
  }
}

std::string CobComplex::dump() const {
  std::ostringstream os;
  os << "# kht cobordism complex v1\n";
  os << "ring " << ring_.name() << "\n";
  os << "boundary";
  for (int l : labels_) os << " " << l;
  os << "\n";
  os << "shift h " << hoffset << " q " << qoffset << "\n";
  std::vector<int> order;
  for (int i = 0; i < size(); ++i)
    if (alive_[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gens_[a].h < gens_[b].h; });
  std::vector<int> name(size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) name[order[k]] = static_cast<int>(k);
  for (int i : order)
    os << "gen " << name[i] << " h " << gens_[i].h + hoffset << " q " << gens_[i].q << " obj " << objects_[gens_[i].object].str() << "\n";
  for (int i : order) {
    std::vector<int> tg;
    for (const auto& [t, terms] : out_[i]) tg.push_back(t);
    std::sort(tg.begin(), tg.end(), [&](int a, int b) { return name[a] < name[b]; });
    for (int t : tg) os << "arrow " << name[i] << " -> " << name[t] << " : " << cob::to_string(out_[i].at(t)) << "\n";
  }
  return os.str();
}

Piece crossing_piece(int sign) {
  Smoothing vertical = Smoothing::from_pairs(4, {{0, 2}, {1, 3}});
  Smoothing horizontal = Smoothing::from_pairs(4, {{0, 1}, {2, 3}});
  Piece p;
  p.points = 4;
  p.objects = sign > 0 ? std::vector<Smoothing>{vertical, horizontal} : std::vector<Smoothing>{horizontal, vertical};
  p.q = {0, 1};
  p.h = {0, 1};
  // The saddle between the two smoothings is the single undotted disc.
  p.arrows.push_back({0, 1, Terms{{0, Scalar(1)}}});
  return p;
}

Piece closing_piece(bool circle) {
  Piece p;
  if (circle) {
    Smoothing s;
    s.circles = 1;
    p.objects = {s};
  } else {
    p.points = 2;
    p.objects = {Smoothing::from_pairs(2, {{0, 1}})};
  }
  p.q = {0};
  p.h = {0};
  return p;
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<int, int>& p) const noexcept {
    return static_cast<std::size_t>(p.first) * 1000003u + static_cast<std::size_t>(p.second);
  }
};

}  // namespace

CobComplex tensor(const CobComplex& c, const Piece& piece, const std::vector<std::pair<int, int>>& glued, const std::vector<int>& piece_labels) {
  cob::Identification id;
  std::vector<char> label_glued(c.labels().size(), 0);
  std::vector<char> point_glued(piece.points, 0);
  for (auto [label, point] : glued) {
    int pos = c.position(label);
    id.glued.push_back({pos, point});
    label_glued[pos] = 1;
    point_glued[point] = 1;
  }
  std::vector<std::pair<int, std::pair<int, int>>> open;
  for (std::size_t i = 0; i < c.labels().size(); ++i)
    if (!label_glued[i]) open.push_back({c.labels()[i], {0, static_cast<int>(i)}});
  for (int p = 0; p < piece.points; ++p)
    if (!point_glued[p]) {
      if (p >= static_cast<int>(piece_labels.size()) || piece_labels[p] < 0) throw std::logic_error("open piece point without a label");
      open.push_back({piece_labels[p], {1, p}});
    }
  std::sort(open.begin(), open.end());
  std::vector<int> labels;
  for (const auto& [label, where] : open) {
    labels.push_back(label);
    id.order.push_back(where);
  }

  CobComplex r(c.ring());
  r.set_labels(labels);
  r.hoffset = c.hoffset;
  r.qoffset = c.qoffset;
  const int np = static_cast<int>(piece.objects.size());
  std::unordered_map<std::pair<int, int>, int, PairHash> glued_object;
  std::vector<int> index(static_cast<std::size_t>(c.size()) * np, -1);
  for (int x = 0; x < c.size(); ++x) {
    if (!c.alive(x)) continue;
    const Generator& g = c.gen(x);
    for (int t = 0; t < np; ++t) {
      auto key = std::make_pair(g.object, t);
      auto it = glued_object.find(key);
      if (it == glued_object.end())
        it = glued_object.emplace(key, r.intern(cob::glue(c.object(g.object), piece.objects[t], id).result)).first;
      index[static_cast<std::size_t>(x) * np + t] = r.add_generator({it->second, g.q + piece.q[t], g.h + piece.h[t]});
    }
  }
  struct TripleHash {
    std::size_t operator()(const std::tuple<int, int, int>& k) const noexcept {
      return (static_cast<std::size_t>(std::get<0>(k)) * 1000003u + std::get<1>(k)) * 1000003u + std::get<2>(k);
    }
  };
  std::unordered_map<std::tuple<int, int, int>, cob::GluePlan, TripleHash> plans;
  auto plan_for = [&](int a, int b, int t) -> const cob::GluePlan& {
    auto key = std::make_tuple(a, b, t);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    return plans.emplace(key, cob::horizontal_plan(c.object(a), c.object(b), piece.objects[t], 0, id)).first->second;
  };
  std::unordered_map<std::pair<int, int>, cob::GluePlan, PairHash> arrow_plans;
  auto arrow_plan = [&](int obj, int arrow) -> const cob::GluePlan& {
    auto key = std::make_pair(obj, arrow);
    auto it = arrow_plans.find(key);
    if (it != arrow_plans.end()) return it->second;
    const auto& a = piece.arrows[arrow];
    return arrow_plans.emplace(key, cob::horizontal_plan(piece.objects[a.src], piece.objects[a.tgt], c.object(obj), 1, id)).first->second;
  };
  for (int x = 0; x < c.size(); ++x) {
    if (!c.alive(x)) continue;
    const Generator& gx = c.gen(x);
    std::vector<std::pair<int, const Terms*>> outs;
    for (const auto& [y, f] : c.out(x)) outs.push_back({y, &f});
    std::sort(outs.begin(), outs.end());
    for (const auto& [y, f] : outs)
      for (int t = 0; t < np; ++t) {
        Terms terms = cob::apply(plan_for(gx.object, c.gen(y).object, t), *f, nullptr);
        r.add_entry(index[static_cast<std::size_t>(x) * np + t], index[static_cast<std::size_t>(y) * np + t], terms);
      }
    Scalar sign = (gx.h % 2 == 0) ? Scalar(1) : Scalar(-1);
    for (int a = 0; a < static_cast<int>(piece.arrows.size()); ++a) {
      const auto& arrow = piece.arrows[a];
      Terms terms = cob::apply(arrow_plan(gx.object, a), arrow.terms, nullptr);
      r.add_entry(index[static_cast<std::size_t>(x) * np + arrow.src], index[static_cast<std::size_t>(x) * np + arrow.tgt], terms, sign);
    }
  }
  return r;
}

CobComplex deloop(const CobComplex& c, std::vector<DeloopRecord>* records, const std::function<std::vector<int>(int)>& circle_order) {
  CobComplex r(c.ring());
  r.set_labels(c.labels());
  r.hoffset = c.hoffset;
  r.qoffset = c.qoffset;
  if (records) records->clear();
  std::vector<int> first(c.size(), -1);
  // position of original circle i in the label order, per generator
  std::vector<std::vector<int>> rank_of(c.size());
  for (int x = 0; x < c.size(); ++x) {
    if (!c.alive(x)) continue;
    const Generator& g = c.gen(x);
    const Smoothing& s = c.object(g.object);
    int n = s.circles;
    std::vector<int> order;
    if (circle_order) order = circle_order(x);
    else {
      order.resize(n);
      for (int i = 0; i < n; ++i) order[i] = i;
    }
    if (static_cast<int>(order.size()) != n) throw std::logic_error("circle order has wrong length");
    rank_of[x].assign(n, 0);
    for (int i = 0; i < n; ++i) rank_of[x][order[i]] = i;
    Smoothing base = s;
    base.circles = 0;
    int obj = r.intern(base);
    for (int a = 0; a < (1 << n); ++a) {
      int id = r.add_generator({obj, g.q + n - 2 * std::popcount(static_cast<unsigned>(a)), g.h});
      if (a == 0) first[x] = id;
      if (records) records->push_back({x, a});
    }
  }
  std::unordered_map<std::pair<int, int>, int, PairHash> arc_cache;
  auto arc_cycles = [&](int a, int b) {
    auto key = std::make_pair(a, b);
    auto it = arc_cache.find(key);
    if (it != arc_cache.end()) return it->second;
    int v = cob::cycles(c.object(a), c.object(b)).arc_cycles;
    arc_cache.emplace(key, v);
    return v;
  };
  auto relabel = [&](int x, Mask bits) {
    int a = 0;
    for (std::size_t i = 0; i < rank_of[x].size(); ++i)
      if (bits & (Mask(1) << i)) a |= 1 << rank_of[x][i];
    return a;
  };
  for (int x = 0; x < c.size(); ++x) {
    if (!c.alive(x)) continue;
    int nx = c.object(c.gen(x).object).circles;
    Mask fullx = nx ? ((Mask(1) << nx) - 1) : 0;
    std::vector<std::pair<int, const Terms*>> outs;
    for (const auto& [y, f] : c.out(x)) outs.push_back({y, &f});
    std::sort(outs.begin(), outs.end());
    for (const auto& [y, f] : outs) {
      int ny = c.object(c.gen(y).object).circles;
      int arcs = arc_cycles(c.gen(x).object, c.gen(y).object);
      Mask low = arcs ? ((Mask(1) << arcs) - 1) : 0;
      std::map<std::pair<int, int>, Terms> parts;
      for (const auto& t : *f) {
        Mask xb = (t.dots >> arcs) & fullx;
        Mask yb = ny ? (t.dots >> (arcs + nx)) & ((Mask(1) << ny) - 1) : 0;
        int a = relabel(x, ~xb & fullx);
        int b = relabel(y, yb);
        parts[{a, b}].push_back({t.dots & low, t.coef});
      }
      for (auto& [ab, terms] : parts) {
        std::sort(terms.begin(), terms.end(), [](const cob::Term& u, const cob::Term& v) { return u.dots < v.dots; });
        r.add_entry(first[x] + ab.first, first[y] + ab.second, terms);
      }
    }
  }
  return r;
}

CobComplex crossing_complex(int sign, const Ring& ring) {
  ScanState s;
  s.complex = CobComplex::unit(ring);
  s.columns.resize(2);
  s.plan.word.strands = 2;
  return tensor_step(std::move(s), sign > 0 ? 1 : -1).complex;
}

ScanState start(const ClosurePlan& plan, const Ring& ring) {
  ScanState s;
  s.plan = plan;
  s.complex = CobComplex::unit(ring);
  s.columns.assign(plan.word.strands, {});
  return s;
}

ScanState tensor_step(ScanState s, int letter) {
  int j = std::abs(letter);
  if (j < 1 || j + 1 > static_cast<int>(s.columns.size())) throw std::invalid_argument("crossing outside the braid");
  Piece piece = crossing_piece(letter > 0 ? 1 : -1);
  std::vector<std::pair<int, int>> glued;
  std::vector<int> labels(4, -1);
  for (int k = 0; k < 2; ++k) {
    ColumnState& col = s.columns[j - 1 + k];
    if (col.closed) throw std::invalid_argument("crossing on a closed column");
    if (col.end >= 0) glued.push_back({col.end, k});
    else {
      col.top = s.next_label++;
      labels[k] = col.top;
    }
  }
  for (int k = 0; k < 2; ++k) {
    labels[2 + k] = s.next_label++;
    s.columns[j - 1 + k].end = labels[2 + k];
  }
  s.complex = tensor(s.complex, piece, glued, labels);
  if (letter > 0) s.complex.qoffset += 1;
  else {
    s.complex.hoffset -= 1;
    s.complex.qoffset -= 2;
  }
  s.consumed++;
  return s;
}

ScanState deloop_step(ScanState s) {
  s.complex = deloop(s.complex);
  return s;
}

ScanState eliminate_step(ScanState s) {
  s.complex.eliminate();
  s.complex.compact();
  return s;
}

ScanState close_column(ScanState s, int column) {
  ColumnState& col = s.columns.at(column - 1);
  if (col.closed) throw std::invalid_argument("column already closed");
  if (col.end < 0) {
    s.complex = tensor(s.complex, closing_piece(true), {}, {});
  } else {
    s.complex = tensor(s.complex, closing_piece(false), {{col.top, 0}, {col.end, 1}}, {});
  }
  col.closed = true;
  return eliminate_step(deloop_step(std::move(s)));
}

ScanState scan_diagram(const ClosurePlan& plan, const Ring& ring, const ScanOptions& opt) {
  ScanState s = start(plan, ring);
  const int strands = plan.word.strands;
  std::vector<int> last_use(strands, -1);
  for (int i = 0; i < plan.word.length(); ++i) {
    int a = std::abs(plan.word.letters[i]);
    last_use[a - 1] = last_use[a] = i;
  }
  std::vector<char> deferred(strands, 0);
  for (const auto& b : plan.basepoints) deferred.at(b.column - 1) = 1;
  auto check = [&](int step) {
    if (opt.check_steps) s.complex.validate();
    if (opt.on_step) opt.on_step(step, s.complex);
  };
  if (opt.progressive_closure)
    for (int c = 0; c < strands; ++c)
      if (last_use[c] < 0 && !deferred[c]) s = close_column(std::move(s), c + 1);
  for (int i = 0; i < plan.word.length(); ++i) {
    s = tensor_step(std::move(s), plan.word.letters[i]);
    if (opt.check_steps) s.complex.validate();
    s = deloop_step(std::move(s));
    if (opt.check_steps) s.complex.validate();
    s = eliminate_step(std::move(s));
    if (opt.progressive_closure) {
      int a = std::abs(plan.word.letters[i]);
      for (int c : {a - 1, a})
        if (last_use[c] == i && !deferred[c]) s = close_column(std::move(s), c + 1);
    }
    check(i + 1);
  }
  return s;
}

FreeComplex close_with_basepoints(const ScanState& st) {
  const auto& plan = st.plan;
  std::vector<int> remaining;
  for (int c = 0; c < static_cast<int>(st.columns.size()); ++c)
    if (!st.columns[c].closed) remaining.push_back(c);
  for (const auto& b : plan.basepoints)
    if (b.column < 1 || b.column > static_cast<int>(st.columns.size()) || st.columns[b.column - 1].closed)
      throw std::invalid_argument("basepoint arc is not part of the closure");

  // One piece holding every remaining closing arc (and lone circles).
  Piece piece;
  Smoothing closing;
  std::vector<std::pair<int, int>> glued;
  std::vector<int> slot(st.columns.size(), -1), lone(st.columns.size(), -1);
  std::vector<std::pair<int, int>> arcs;
  for (int c : remaining) {
    if (st.columns[c].end < 0) {
      lone[c] = closing.circles++;
      continue;
    }
    int p = static_cast<int>(arcs.size()) * 2;
    slot[c] = p;
    arcs.push_back({p, p + 1});
    glued.push_back({st.columns[c].top, p});
    glued.push_back({st.columns[c].end, p + 1});
  }
  int lone_count = closing.circles;
  closing = Smoothing::from_pairs(static_cast<int>(arcs.size()) * 2, arcs, lone_count);
  piece.points = closing.points();
  piece.objects = {closing};
  piece.q = {0};
  piece.h = {0};
  CobComplex closed = tensor(st.complex, piece, glued, {});

  // Locate the circle through each basepoint for every generator.
  cob::Identification id;
  for (auto [label, point] : glued) id.glued.push_back({st.complex.position(label), point});
  std::vector<std::vector<int>> based(closed.size());
  {
    int k = 0;
    for (int x = 0; x < st.complex.size(); ++x) {
      if (!st.complex.alive(x)) continue;
      cob::Glued g = cob::glue(st.complex.object(st.complex.gen(x).object), closing, id);
      for (const auto& b : plan.basepoints) {
        int c = b.column - 1;
        int circle = slot[c] >= 0 ? g.circle_of[1][slot[c]] : st.complex.object(st.complex.gen(x).object).circles + lone[c];
        based[k].push_back(circle);
      }
      ++k;
    }
  }
  auto order = [&](int x) {
    int n = closed.object(closed.gen(x).object).circles;
    std::vector<int> o;
    for (int c : based[x])
      if (std::find(o.begin(), o.end(), c) == o.end()) o.push_back(c);
    for (int i = 0; i < n; ++i)
      if (std::find(o.begin(), o.end(), i) == o.end()) o.push_back(i);
    return o;
  };
  std::vector<DeloopRecord> records;
  CobComplex flat = deloop(closed, &records, order);

  // Assemble the free complex.
  FreeComplex fc;
  fc.ring = flat.ring();
  int hlo = 0, hhi = -1;
  for (int i = 0; i < flat.size(); ++i) {
    int h = flat.gen(i).h;
    if (hhi < hlo) hlo = hhi = h;
    hlo = std::min(hlo, h);
    hhi = std::max(hhi, h);
  }
  if (flat.size() == 0) return fc;
  int n = hhi - hlo + 1;
  fc.hmin = hlo + flat.hoffset;
  fc.q.assign(n, {});
  fc.blocks.assign(n, {});
  std::vector<int> pos(flat.size());
  for (int i = 0; i < flat.size(); ++i) {
    int k = flat.gen(i).h - hlo;
    pos[i] = static_cast<int>(fc.q[k].size());
    fc.q[k].push_back(flat.gen(i).q + flat.qoffset);
  }
  const int nbp = static_cast<int>(plan.basepoints.size());
  // Blocks: generators sharing a parent and the labels of unbased circles.
  for (int i = 0; i < flat.size(); ++i) {
    int parent = records[i].parent;
    int distinct = 0;
    {
      std::vector<int> seen;
      for (int c : based[parent])
        if (std::find(seen.begin(), seen.end(), c) == seen.end()) seen.push_back(c);
      distinct = static_cast<int>(seen.size());
    }
    int mask = (1 << distinct) - 1;
    if ((records[i].labels & mask) == 0) fc.blocks[flat.gen(i).h - hlo].push_back(1 << distinct);
  }
  for (int k = 0; k < n; ++k) {
    int src = static_cast<int>(fc.q[k].size());
    int tgt = k + 1 < n ? static_cast<int>(fc.q[k + 1].size()) : 0;
    fc.d.emplace_back(tgt, src);
  }
  for (int i = 0; i < flat.size(); ++i)
    for (const auto& [j, terms] : flat.out(i)) {
      if (terms.size() != 1 || terms[0].dots != 0) throw std::logic_error("closed complex has a non-scalar entry");
      fc.d[flat.gen(i).h - hlo].set(pos[j], pos[i], terms[0].coef);
    }
  auto make_action = [&](int which) {
    std::vector<SparseMatrix> a;
    for (int k = 0; k < n; ++k) a.emplace_back(static_cast<int>(fc.q[k].size()), static_cast<int>(fc.q[k].size()));
    for (int i = 0; i < flat.size(); ++i) {
      int parent = records[i].parent;
      int bit = (which == 1 && based[parent][1] != based[parent][0]) ? 1 : 0;
      if (records[i].labels & (1 << bit)) continue;
      // Children of a parent are consecutive and indexed by their labels.
      int target = i + (1 << bit);
      a[flat.gen(i).h - hlo].set(pos[target], pos[i], Scalar(1));
    }
    return a;
  };
  if (nbp >= 1) fc.left = make_action(0);
  if (nbp >= 2) fc.right = make_action(1);
  fc.trim();
  return fc;
}

FreeComplex khovanov_complex(const ClosurePlan& plan, const Ring& ring, const ScanOptions& opt) {
  return close_with_basepoints(scan_diagram(plan, ring, opt));
}

FreeComplex cube_complex(const ClosurePlan& plan, const Ring& ring, int limit) {
  const BraidWord& w = plan.word;
  const int n = w.length();
  if (n > limit) throw std::invalid_argument("cube oracle limited to " + std::to_string(limit) + " crossings");
  const int strands = w.strands;
  // Segments: per column, between consecutive crossings; segment 0 of each
  // column runs through the closure arc.
  std::vector<std::vector<int>> touches(strands);
  for (int i = 0; i < n; ++i) {
    int a = std::abs(w.letters[i]);
    touches[a - 1].push_back(i);
    touches[a].push_back(i);
  }
  std::vector<int> seg_base(strands);
  int nseg = 0;
  for (int c = 0; c < strands; ++c) {
    seg_base[c] = nseg;
    nseg += std::max<int>(1, static_cast<int>(touches[c].size()));
  }
  // ends[i] = {inL, inR, outL, outR}
  std::vector<std::array<int, 4>> ends(n);
  std::vector<int> seen(strands, 0);
  for (int i = 0; i < n; ++i) {
    int a = std::abs(w.letters[i]);
    for (int k = 0; k < 2; ++k) {
      int c = a - 1 + k;
      int m = static_cast<int>(touches[c].size());
      int idx = seen[c]++;
      ends[i][k] = seg_base[c] + idx;
      ends[i][2 + k] = seg_base[c] + (idx + 1) % m;
    }
  }
  const int npos = w.positive(), nneg = w.negative();
  struct Vertex {
    int circles = 0;
    std::vector<int> circle_of_seg;
    std::vector<int> order;  // label bit -> circle
    std::vector<int> bit_of;  // circle -> label bit
    int based = 0;
  };
  std::vector<Vertex> verts(std::size_t(1) << n);
  for (int v = 0; v < (1 << n); ++v) {
    std::vector<int> parent(nseg);
    for (int i = 0; i < nseg; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (int i = 0; i < n; ++i) {
      bool one = (v >> i) & 1;
      bool vertical = (w.letters[i] > 0) != one;
      if (vertical) {
        unite(ends[i][0], ends[i][2]);
        unite(ends[i][1], ends[i][3]);
      } else {
        unite(ends[i][0], ends[i][1]);
        unite(ends[i][2], ends[i][3]);
      }
    }
    Vertex& vx = verts[v];
    vx.circle_of_seg.assign(nseg, -1);
    std::map<int, int> root_id;
    for (int s = 0; s < nseg; ++s) {
      int r = find(s);
      auto it = root_id.find(r);
      if (it == root_id.end()) it = root_id.emplace(r, static_cast<int>(root_id.size())).first;
      vx.circle_of_seg[s] = it->second;
    }
    vx.circles = static_cast<int>(root_id.size());
    for (const auto& b : plan.basepoints) {
      int circle = vx.circle_of_seg[seg_base[b.column - 1]];
      if (std::find(vx.order.begin(), vx.order.end(), circle) == vx.order.end()) vx.order.push_back(circle);
    }
    vx.based = static_cast<int>(vx.order.size());
    for (int c = 0; c < vx.circles; ++c)
      if (std::find(vx.order.begin(), vx.order.end(), c) == vx.order.end()) vx.order.push_back(c);
    vx.bit_of.assign(vx.circles, 0);
    for (int b = 0; b < vx.circles; ++b) vx.bit_of[vx.order[b]] = b;
  }

  int hmin = -nneg;
  FreeComplex fc;
  fc.ring = ring;
  fc.hmin = hmin;
  fc.q.assign(n + 1, {});
  fc.blocks.assign(n + 1, {});
  std::vector<int> offset(std::size_t(1) << n);
  for (int v = 0; v < (1 << n); ++v) {
    int k = std::popcount(static_cast<unsigned>(v));
    offset[v] = static_cast<int>(fc.q[k].size());
    const Vertex& vx = verts[v];
    for (int a = 0; a < (1 << vx.circles); ++a) {
      fc.q[k].push_back(k + vx.circles - 2 * std::popcount(static_cast<unsigned>(a)) + npos - 2 * nneg);
      if ((a & ((1 << vx.based) - 1)) == 0) fc.blocks[k].push_back(1 << vx.based);
    }
  }
  for (int k = 0; k <= n; ++k) fc.d.emplace_back(k < n ? static_cast<int>(fc.q[k + 1].size()) : 0, static_cast<int>(fc.q[k].size()));
  for (int v = 0; v < (1 << n); ++v) {
    const Vertex& vx = verts[v];
    int k = std::popcount(static_cast<unsigned>(v));
    for (int i = 0; i < n; ++i) {
      if ((v >> i) & 1) continue;
      int u = v | (1 << i);
      const Vertex& ux = verts[u];
      Scalar sign = (std::popcount(static_cast<unsigned>(v & ((1 << i) - 1))) % 2) ? Scalar(-1) : Scalar(1);
      // Circles of v and u that touch crossing i.
      std::vector<int> cv, cu;
      for (int e : ends[i]) {
        int a = vx.circle_of_seg[e], b = ux.circle_of_seg[e];
        if (std::find(cv.begin(), cv.end(), a) == cv.end()) cv.push_back(a);
        if (std::find(cu.begin(), cu.end(), b) == cu.end()) cu.push_back(b);
      }
      // Correspondence for the untouched circles.
      std::vector<int> u_from_v(vx.circles, -1);
      for (int s = 0; s < nseg; ++s) {
        int a = vx.circle_of_seg[s];
        if (std::find(cv.begin(), cv.end(), a) != cv.end()) continue;
        u_from_v[a] = ux.circle_of_seg[s];
      }
      for (int a = 0; a < (1 << vx.circles); ++a) {
        auto label = [&](int circle) { return (a >> vx.bit_of[circle]) & 1; };
        int base = 0;
        for (int c = 0; c < vx.circles; ++c)
          if (u_from_v[c] >= 0 && label(c)) base |= 1 << ux.bit_of[u_from_v[c]];
        std::vector<int> targets;
        if (cv.size() == 2 && cu.size() == 1) {
          int x = label(cv[0]) + label(cv[1]);
          if (x == 2) continue;
          targets.push_back(base | (x << ux.bit_of[cu[0]]));
        } else if (cv.size() == 1 && cu.size() == 2) {
          int b0 = 1 << ux.bit_of[cu[0]], b1 = 1 << ux.bit_of[cu[1]];
          if (label(cv[0])) targets.push_back(base | b0 | b1);
          else {
            targets.push_back(base | b0);
            targets.push_back(base | b1);
          }
        } else {
          throw std::logic_error("cube edge is neither a merge nor a split");
        }
        for (int t : targets) fc.d[k].add(offset[u] + t, offset[v] + a, sign);
      }
    }
  }
  auto make_action = [&](int which) {
    std::vector<SparseMatrix> act;
    for (int k = 0; k <= n; ++k) act.emplace_back(static_cast<int>(fc.q[k].size()), static_cast<int>(fc.q[k].size()));
    for (int v = 0; v < (1 << n); ++v) {
      const Vertex& vx = verts[v];
      int k = std::popcount(static_cast<unsigned>(v));
      int circle = vx.circle_of_seg[seg_base[plan.basepoints[which].column - 1]];
      int bit = vx.bit_of[circle];
      for (int a = 0; a < (1 << vx.circles); ++a)
        if (!((a >> bit) & 1)) act[k].set(offset[v] + (a | (1 << bit)), offset[v] + a, Scalar(1));
    }
    return act;
  };
  if (!plan.basepoints.empty()) fc.left = make_action(0);
  if (plan.basepoints.size() >= 2) fc.right = make_action(1);
  fc.trim();
  return fc;
}

}  // namespace kht::scan
