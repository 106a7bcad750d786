#include <doctest.h>

#include "kht/homology.hpp"
#include "kht/scan.hpp"
#include "oracles.hpp"

using namespace kht;

namespace {

HomologyTable scan_homology(const std::string& expr, const Ring& ring = Ring::integers()) {
  return bigraded_homology(scan::khovanov_complex(compile(parse_link_expression(expr)), ring));
}

HomologyTable cube_homology(const std::string& expr, const Ring& ring = Ring::integers()) {
  return bigraded_homology(scan::cube_complex(compile(parse_link_expression(expr)), ring));
}

}  // namespace

TEST_CASE("trefoil") {
  HomologyTable t = scan_homology("T(2,3)");
  HomologyTable expect;
  expect.groups = {{{0, 1}, {1, {}}}, {{0, 3}, {1, {}}}, {{2, 5}, {1, {}}}, {{3, 7}, {0, {2}}}, {{3, 9}, {1, {}}}};
  CHECK(t == expect);
}

TEST_CASE("two-component unlink") {
  HomologyTable t = scan_homology("B[2: 1 -1]");
  CHECK(t.groups.size() == 3);
  CHECK(t.at(0, 0) == HomologyGroup{2, {}});
  CHECK(t.at(0, 2) == HomologyGroup{1, {}});
  CHECK(t.at(0, -2) == HomologyGroup{1, {}});
}

TEST_CASE("crossing complexes") {
  for (int sign : {1, -1}) {
    scan::CobComplex c = scan::crossing_complex(sign);
    CHECK(c.live_count() == 2);
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("scan agrees with the cube of resolutions") {
  const char* words[] = {"B[2: ]", "B[2: 1]", "B[2: -1]", "B[3: 1 2]", "B[2: 1 1]", "B[2: -1 -1]", "B[2: -1 -1 -1]",
                         "B[3: 1 -2 1 -2]", "B[3: 1 2 -1 2 1]", "B[4: 1 2 3 -2 1 -3]", "T(2,5)"};
  for (const char* w : words)
    for (const Ring& r : {Ring::integers(), Ring::localized(2), Ring::localized(3)}) {
      CAPTURE(w);
      CAPTURE(r.name());
      CHECK(scan_homology(w, r) == cube_homology(w, r));
    }
}

TEST_CASE("graded euler characteristic is the Jones polynomial") {
  const char* words[] = {"T(2,3)", "B[2: -1 -1 -1]", "B[3: 1 -2 1 -2]", "T(3,4)", "L2", "B[4: 1 -2 3 -2 1 3]", "T(2,6)"};
  for (const char* w : words) {
    CAPTURE(w);
    auto expr = parse_link_expression(w);
    auto chi = euler_characteristic(scan_homology(w));
    auto jones = oracle::jones(expr.factors[0]);
    CHECK(chi == LaurentPolynomial(jones.begin(), jones.end()));
  }
}

TEST_CASE("progressive closure does not change the result") {
  ClosurePlan p = compile(parse_link_expression("B[4: 1 2 3 -2 1 -3 2]"));
  scan::ScanOptions eager, lazy;
  lazy.progressive_closure = false;
  CHECK(bigraded_homology(scan::khovanov_complex(p, Ring::integers(), eager)) ==
        bigraded_homology(scan::khovanov_complex(p, Ring::integers(), lazy)));
}

TEST_CASE("basepointed complexes carry nilpotent commuting actions") {
  ClosurePlan p = with_basepoints(plan_for(make_Ln(2)), {0, 1});
  FreeComplex c = scan::khovanov_complex(p, Ring::integers());
  REQUIRE(c.left);
  REQUIRE(c.right);
  CHECK_NOTHROW(c.validate());
  CHECK(bigraded_homology(c) == bigraded_homology(scan::khovanov_complex(plan_for(make_Ln(2)), Ring::integers())));
}

TEST_CASE("stage dumps") {
  int steps = 0;
  scan::ScanOptions opt;
  std::string first;
  opt.on_step = [&](int, const scan::CobComplex& c) {
    if (steps++ == 0) first = c.dump();
  };
  scan::scan_diagram(plan_for(torus_braid(2, 3)), Ring::integers(), opt);
  CHECK(steps == 3);
  CHECK(first.rfind("# kht cobordism complex v1", 0) == 0);
}

TEST_CASE("conjugated words give the same homology") {
  auto [w, map] = arrange_ends(make_Ln(2), 1, 0);
  CHECK(bigraded_homology(scan::khovanov_complex(plan_for(w), Ring::integers())) ==
        bigraded_homology(scan::khovanov_complex(plan_for(make_Ln(2)), Ring::integers())));
}

TEST_CASE("cube oracle refuses large diagrams") {
  CHECK_THROWS_AS(scan::cube_complex(plan_for(make_Ln(3)), Ring::integers()), std::invalid_argument);
}
