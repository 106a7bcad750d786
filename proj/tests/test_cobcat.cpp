#include <doctest.h>

#include <stdexcept>

#include "kht/cobcat.hpp"

using namespace kht;
using namespace kht::cob;

namespace {

Terms closed(std::vector<RawComponent> comps, Scalar coef = Scalar(1)) { return normalize(Smoothing{}, Smoothing{}, comps, coef); }

Scalar value(const Terms& t) {
  if (t.empty()) return Scalar(0);
  REQUIRE(t.size() == 1);
  REQUIRE(t[0].dots == 0);
  return t[0].coef;
}

}  // namespace

TEST_CASE("closed surfaces") {
  CHECK(value(closed({{{}, 0, 0}})) == Scalar(0));
  CHECK(value(closed({{{}, 0, 1}})) == Scalar(1));
  CHECK(value(closed({{{}, 0, 2}})) == Scalar(0));
  CHECK(value(closed({{{}, 1, 0}})) == Scalar(2));
  CHECK(value(closed({{{}, 1, 1}})) == Scalar(0));
  CHECK(value(closed({{{}, 2, 0}})) == Scalar(0));
  CHECK(value(closed({{{}, 0, 1}, {{}, 1, 0}}, Scalar(3))) == Scalar(6));
}

TEST_CASE("neck cutting a tube between two circles") {
  Smoothing one = Smoothing::from_pairs(0, {}, 1);
  Terms tube = normalize(one, one, {{{0, 1}, 0, 0}});
  // dot on either end
  REQUIRE(tube.size() == 2);
  CHECK(tube[0].coef == Scalar(1));
  CHECK(tube[1].coef == Scalar(1));
  CHECK((tube[0].dots | tube[1].dots) == 0b11);
  Terms dotted = normalize(one, one, {{{0, 1}, 0, 1}});
  REQUIRE(dotted.size() == 1);
  CHECK(dotted[0].dots == 0b11);
}

TEST_CASE("degrees") {
  Smoothing a = Smoothing::from_pairs(4, {{0, 1}, {2, 3}});
  Smoothing b = Smoothing::from_pairs(4, {{0, 3}, {1, 2}});
  CHECK(degree(a, a, 0) == 0);
  CHECK(degree(a, b, 0) == -1);
  CHECK(degree(a, a, 0b01) == -2);
}

TEST_CASE("identity is neutral for composition") {
  PlanarObject a{Smoothing::from_pairs(4, {{0, 1}, {2, 3}}), 0};
  PlanarObject b{Smoothing::from_pairs(4, {{0, 3}, {1, 2}}), 1};
  Cobordism saddle{a, b, {{0, Scalar(1)}}};
  CHECK(compose(identity(b), saddle) == saddle);
  CHECK(compose(saddle, identity(a)) == saddle);
  CHECK(saddle.net_degree() == 0);
  Cobordism back{b, a, {{0, Scalar(1)}}};
  Cobordism loop = compose(back, saddle);
  // two saddles on the same arcs: a tube, cut into two dotted terms
  CHECK(loop.terms.size() == 2);
  CHECK(loop.net_degree() == -2);
}

TEST_CASE("delooping identities") {
  for (int arcs = 0; arcs <= 1; ++arcs)
    for (int circles = 1; circles <= 3; ++circles) {
      Smoothing s = arcs ? Smoothing::from_pairs(2, {{0, 1}}, circles) : Smoothing::from_pairs(0, {}, circles);
      PlanarObject o{s, 2};
      DeloopMaps m = deloop_maps(o);
      CHECK(m.plus.qshift == 3);
      CHECK(m.minus.qshift == 1);
      CHECK(compose(m.out_plus, m.in_plus) == identity(m.plus));
      CHECK(compose(m.out_minus, m.in_minus) == identity(m.minus));
      CHECK(compose(m.out_plus, m.in_minus).terms.empty());
      CHECK(compose(m.out_minus, m.in_plus).terms.empty());
      CHECK(compose(m.in_plus, m.out_plus) + compose(m.in_minus, m.out_minus) == identity(o));
      for (const auto* f : {&m.out_plus, &m.out_minus, &m.in_plus, &m.in_minus}) CHECK(f->net_degree() == 0);
    }
  CHECK_THROWS(deloop_maps(PlanarObject{Smoothing::from_pairs(2, {{0, 1}}), 0}));
}

TEST_CASE("iso entries") {
  PlanarObject a{Smoothing::from_pairs(2, {{0, 1}}), 0};
  Cobordism minus_id{a, a, {{0, Scalar(-1)}}};
  CHECK(is_iso_entry(minus_id, Ring::integers()) == Scalar(-1));
  Cobordism two{a, a, {{0, Scalar(2)}}};
  CHECK_FALSE(is_iso_entry(two, Ring::integers()));
  CHECK(is_iso_entry(two, Ring::localized(3)) == Scalar(2));
  Cobordism dotted{a, a, {{1, Scalar(1)}}};
  CHECK_FALSE(is_iso_entry(dotted, Ring::integers()));
}
