#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kht/scalar.hpp"

namespace kht::cob {

// A crossingless matching of k boundary points (indexed 0..k-1) together with
// a number of closed circles.
struct Smoothing {
  std::vector<int> partner;
  int circles = 0;

  int points() const { return static_cast<int>(partner.size()); }
  bool operator==(const Smoothing& o) const { return circles == o.circles && partner == o.partner; }
  std::string str() const;
  static Smoothing from_pairs(int points, const std::vector<std::pair<int, int>>& pairs, int circles = 0);
};

struct SmoothingHash {
  std::size_t operator()(const Smoothing& s) const noexcept;
};

// Morphisms between two smoothings of the same boundary are combinations of
// disjoint discs, one per cycle of source u target, each carrying at most one
// dot. A term is the set of dotted cycles.
using Mask = std::uint32_t;
constexpr int kMaxCycles = 32;

struct Term {
  Mask dots = 0;
  Scalar coef;
  bool operator==(const Term& o) const { return dots == o.dots && coef == o.coef; }
};

// Sorted by mask, no zero coefficients.
using Terms = std::vector<Term>;

Terms add(const Terms& a, const Terms& b);
Terms scaled(const Terms& a, const Scalar& s);
void add_into(Terms& acc, const Terms& b, const Scalar& s = Scalar(1));

// Cycles of a u b. Cycles through boundary points come first, ordered by
// their least point; then the circles of a, then the circles of b.
struct Cycles {
  int arc_cycles = 0;
  std::vector<int> of_point;
  int a_circles = 0, b_circles = 0;
  int total() const { return arc_cycles + a_circles + b_circles; }
  int a_circle(int i) const { return arc_cycles + i; }
  int b_circle(int j) const { return arc_cycles + a_circles + j; }
};

Cycles cycles(const Smoothing& a, const Smoothing& b);

// Quantum degree of a term: Euler characteristic - points/2 - 2 * dots.
int degree(const Smoothing& a, const Smoothing& b, Mask dots);

// Description of a glued surface: its connected components, which input
// cycles (of the first and second input morphism) each contains, which
// output cycles bound it, and its genus.
struct GlueComponent {
  Mask in_f = 0, in_g = 0;
  Mask out = 0;
  int genus = 0;
};

struct GluePlan {
  std::vector<GlueComponent> components;
  int out_cycles = 0;
};

// Applies the local relations component by component. `g` may be null for
// plans that involve a single input morphism.
Terms apply(const GluePlan& plan, const Terms& f, const Terms* g);

// Plan for g o f with f: a -> b and g: b -> c.
GluePlan vertical_plan(const Smoothing& a, const Smoothing& b, const Smoothing& c);

// Planar gluing of two smoothings along identified boundary points.
// Output boundary points are listed in `order` as (side, index) with side 0
// for x and 1 for y. New circles are listed after the inherited circles of x
// and y, in discovery order.
struct Identification {
  std::vector<std::pair<int, int>> glued;  // (point of x, point of y)
  std::vector<std::pair<int, int>> order;  // output point -> (side, point)
};

struct CircleOrigin {
  int side = 0;   // which input the witness piece belongs to
  int kind = 0;   // 0: inherited circle, 1: arc of that side
  int index = 0;  // circle index or a boundary point on the arc
};

struct Glued {
  Smoothing result;
  std::vector<CircleOrigin> circle_origin;
  // Per side and point: the result circle through that point, or -1.
  std::vector<int> circle_of[2];
};

Glued glue(const Smoothing& x, const Smoothing& y, const Identification& id);

// Plan for extending f: fa -> fb (living on side `f_side`) by the identity of
// s (the other side).
GluePlan horizontal_plan(const Smoothing& fa, const Smoothing& fb, const Smoothing& s, int f_side, const Identification& id);

// A morphism with explicit source and target, for the public operations.
struct PlanarObject {
  Smoothing smoothing;
  int qshift = 0;
  bool operator==(const PlanarObject& o) const { return smoothing == o.smoothing && qshift == o.qshift; }
};

struct Cobordism {
  PlanarObject source, target;
  Terms terms;

  // Net degree of the (homogeneous) morphism including shifts; nullopt when
  // the terms are not homogeneous. Zero morphisms report 0.
  std::optional<int> net_degree() const;
  bool operator==(const Cobordism& o) const { return source == o.source && target == o.target && terms == o.terms; }
};

Cobordism identity(const PlanarObject& o);
Cobordism compose(const Cobordism& g, const Cobordism& f);
Cobordism operator+(const Cobordism& a, const Cobordism& b);

// A surface before applying the relations: each component lists the cycles
// of source u target on its boundary (possibly none for closed pieces) with
// its genus and dot count.
struct RawComponent {
  std::vector<int> cycles;
  int genus = 0;
  int dots = 0;
};

Terms normalize(const Smoothing& source, const Smoothing& target, const std::vector<RawComponent>& comps, const Scalar& coef = Scalar(1));

struct DeloopMaps {
  PlanarObject plus, minus;  // the circle-free replacements (qshift +1 / -1)
  Cobordism out_plus, out_minus, in_plus, in_minus;
};

// Removes the last circle of obj.
DeloopMaps deloop_maps(const PlanarObject& obj);

std::optional<Scalar> is_iso_entry(const Cobordism& m, const Ring& ring);

std::string to_string(const Terms& t);

}  // namespace kht::cob
