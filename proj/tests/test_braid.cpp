#include <doctest.h>

#include <stdexcept>

#include "kht/braid.hpp"

using namespace kht;

TEST_CASE("braid words") {
  BraidWord b = parse_braid("1 -2 1", 3);
  CHECK(b.letters == std::vector<int>{1, -2, 1});
  CHECK(b.positive() == 2);
  CHECK(b.negative() == 1);
  CHECK(b.str() == "1 -2 1");
  CHECK_THROWS_AS(parse_braid("3", 3), std::invalid_argument);
  CHECK_THROWS_AS(parse_braid("1 x", 3), std::invalid_argument);
  CHECK(torus_braid(2, 3) == parse_braid("1 1 1", 2));
  CHECK(torus_braid(3, 4).length() == 8);
}

TEST_CASE("L_n words and components") {
  BraidWord l3 = make_Ln(3);
  CHECK(l3.strands == 4);
  CHECK(l3.length() == 14);
  CHECK(make_Ln(2).length() == 7);
  CHECK(make_Ln(5).length() == 34);
  CHECK(make_Ln(7).length() == 62);
  auto comps = closure_components(l3);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<int>{1, 2, 3});
  CHECK(comps[1] == std::vector<int>{4});
  CHECK(closure_components(torus_braid(3, 4)).size() == 1);
  CHECK(closure_components(torus_braid(2, 4)).size() == 2);
  CHECK(component_of_strand(l3) == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("link expressions") {
  auto e = parse_link_expression("L3 # T(2,3)");
  REQUIRE(e.factors.size() == 2);
  CHECK(e.factors[0] == make_Ln(3));
  CHECK(e.factors[1] == torus_braid(2, 3));
  CHECK(e.joins == std::vector<std::pair<int, int>>{{-1, -1}});
  auto f = parse_link_expression("T(2,3) #[0,0] L3");
  CHECK(f.joins == std::vector<std::pair<int, int>>{{0, 0}});
  auto g = parse_link_expression("B[3: 1 -2 1 -2]");
  CHECK(g.factors[0] == parse_braid("1 -2 1 -2", 3));
  CHECK_THROWS_AS(parse_link_expression("T(2,"), std::invalid_argument);
  CHECK_THROWS_AS(parse_link_expression("L3 #"), std::invalid_argument);
  CHECK_THROWS_AS(compile(parse_link_expression("T(2,3) #[0,5] L3")), std::invalid_argument);
  CHECK_THROWS_AS(parse_link_expression(""), std::invalid_argument);
}

TEST_CASE("compiled connected sums keep crossings and merge components") {
  ClosurePlan p = compile(parse_link_expression("L3 # T(2,3)"));
  CHECK(p.word.length() == 17);
  CHECK(p.num_components == 2);
  ClosurePlan q = compile(parse_link_expression("L3 # L3 # T(2,3)"));
  CHECK(q.word.length() == 31);
  CHECK(q.num_components == 3);
  ClosurePlan r = compile(parse_link_expression("L2 # L2 # T(2,3)"));
  CHECK(r.word.length() == 17);
}

TEST_CASE("basepoints") {
  ClosurePlan p = with_basepoints(plan_for(make_Ln(3)), {0, 1});
  REQUIRE(p.basepoints.size() == 2);
  CHECK(p.basepoints[0].component == 0);
  CHECK(p.basepoints[1].component == 1);
  CHECK(p.basepoints[1].column == 4);
  CHECK(p.component_of[p.basepoints[0].column - 1] == 0);
  ClosurePlan same = with_basepoints(plan_for(torus_braid(3, 4)), {0, 0});
  CHECK(same.basepoints[0].column != same.basepoints[1].column);
  CHECK_THROWS_AS(with_basepoints(plan_for(make_Ln(3)), {2}), std::invalid_argument);
  CHECK_THROWS_AS(with_basepoints(plan_for(make_Ln(3)), {0, 1, 0}), std::invalid_argument);
}

TEST_CASE("arrange_ends conjugates components to the outer strands") {
  auto [w, map] = arrange_ends(make_Ln(3), 1, 0);
  auto comps = component_of_strand(w);
  CHECK(comps.front() == map[1]);
  CHECK(comps.back() == map[0]);
  CHECK(w.positive() - w.negative() == 14);
  CHECK(closure_components(w).size() == 2);
}
