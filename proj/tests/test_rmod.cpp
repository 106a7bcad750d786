#include <doctest.h>

#include "kht/homology.hpp"
#include "kht/rmod.hpp"

using namespace kht;
using namespace kht::rmod;

namespace {

FreeComplex X(const std::string& p, const Ring& r = Ring::integers()) { return expand(parse_presentation(p), r); }

std::vector<int> ranks(const FreeComplex& c) {
  std::vector<int> out;
  for (int h = c.hmin; h <= c.hmax(); ++h) out.push_back(c.rank_at(h));
  return out;
}

}  // namespace

TEST_CASE("presentation syntax") {
  Presentation p = parse_presentation("C(3)[8]{25}");
  CHECK(p.kind == Presentation::Kind::C);
  CHECK(p.param == 3);
  CHECK(p.hshift == 8);
  CHECK(p.qshift == 25);
  CHECK(p.str() == "C(3)[8]{25}");
  CHECK(parse_presentation("E{12}").str() == "E{12}");
  CHECK(parse_presentation("Dt(-2)").kind == Presentation::Kind::Dt);
  CHECK(parse_presentation(" Runit{3} ").qshift == 3);
  CHECK_THROWS_AS(parse_presentation("F(2)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_presentation("C(3)[8"), std::invalid_argument);
}

TEST_CASE("C(n) in the basis 1(x)1, X(x)1, 1(x)X, X(x)X") {
  FreeComplex c = X("C(5)");
  CHECK(c.hmin == 0);
  CHECK(c.q == std::vector<std::vector<int>>{{1, -1, -1, -3}, {3, 1, 1, -1}});
  Matrix d = c.d[0].to_dense();
  CHECK(d == Matrix::from_rows({{0, 0, 0, 0}, {5, 0, 0, 0}, {-1, 0, 0, 0}, {0, -1, 5, 0}}));
  CHECK_NOTHROW(c.validate());
  HomologyTable t = bigraded_homology(c);
  int free0 = 0, free1 = 0;
  for (const auto& [hq, g] : t.groups) {
    CHECK(g.torsion.empty());
    (hq.first == 0 ? free0 : free1) += g.free;
  }
  CHECK(free0 == 2);
  CHECK(free1 == 2);
}

TEST_CASE("D(m) and shifts") {
  FreeComplex d = X("D(2)[2]{7}");
  CHECK(d.hmin == 2);
  CHECK(d.q == std::vector<std::vector<int>>{{7, 5}, {9, 7}});
  CHECK(d.left);
  CHECK_FALSE(d.right);
  HomologyTable t = bigraded_homology(d);
  CHECK(t.at(3, 7) == HomologyGroup{0, {2}});
  CHECK(t.at(2, 5) == HomologyGroup{1, {}});
  CHECK(t.at(3, 9) == HomologyGroup{1, {}});
  CHECK(X("Dt(2)").right);
  CHECK_FALSE(X("Dt(2)").left);
}

TEST_CASE("free bases over R") {
  RBasis b = r_basis(X("RR"), Side::Left);
  CHECK(b.generators(0) == 2);
  CHECK_THROWS(r_basis(X("D(2)"), Side::Right));
  FreeComplex dead = X("Runit");
  (*dead.left)[0] = SparseMatrix(2, 2);
  CHECK_THROWS_AS(r_basis(dead, Side::Left), NotFree);
}

TEST_CASE("tensoring free bimodules") {
  FreeComplex t = tensor_over_R(X("RR"), X("RR"));
  CHECK(ranks(t) == std::vector<int>{8});
  CHECK(t.blocks[0] == std::vector<int>{4, 4});
  CHECK(match_complex(t, direct_sum(X("RR{1}"), X("RR{-1}")), Window::Top).ok);
}

// Hand elimination of C(1) (x)_R C(1): the degree-0 generator cancels against
// the X-generator of a1(x)b0 (coefficient -1), the degree-1 generator of
// a0(x)b1 cancels against the X-generator of a1(x)b1 (coefficient -1), and the
// zig-zags leave nm X(x)1 - 1(x)X on both surviving pieces.
TEST_CASE("C(1) tensor C(1) by hand") {
  FreeComplex t = tensor_over_R(X("C(1)"), X("C(1)"));
  CHECK(ranks(t) == std::vector<int>{8, 16, 8});
  ReduceStats st;
  FreeComplex r = reduce_equivariant(t, &st);
  CHECK(st.cancelled == 2);
  CHECK(ranks(r) == std::vector<int>{4, 8, 4});
  CHECK(match_complex(r, direct_sum(X("C(1){-2}"), X("C(1)[1]{2}")), Window::Top).ok);
  CHECK_FALSE(match_complex(r, direct_sum(X("C(-1){-2}"), X("C(1)[1]{2}")), Window::Top).ok);
}

TEST_CASE("C(n) tensor C(m) for small parameters") {
  for (const Ring& ring : {Ring::integers(), Ring::localized(3)})
    for (int n = -3; n <= 3; ++n)
      for (int m = -3; m <= 3; ++m) {
        CAPTURE(n);
        CAPTURE(m);
        FreeComplex t = tensor_over_R(X("C(" + std::to_string(n) + ")", ring), X("C(" + std::to_string(m) + ")", ring));
        CHECK_NOTHROW(t.validate());
        FreeComplex rhs = direct_sum(X("C(" + std::to_string(n * m) + "){-2}", ring), X("C(" + std::to_string(n * m) + ")[1]{2}", ring));
        CHECK(bigraded_homology(t) == bigraded_homology(rhs));
        CHECK(match_complex(reduce_equivariant(t), rhs, Window::Top).ok);
      }
}

TEST_CASE("C(n) tensor D(m)") {
  for (int n = -3; n <= 3; ++n)
    for (int m = -3; m <= 3; ++m) {
      FreeComplex t = tensor_over_R(X("C(" + std::to_string(n) + ")"), X("D(" + std::to_string(m) + ")"));
      CHECK_FALSE(t.right);
      FreeComplex rhs = direct_sum(X("D(" + std::to_string(n * m) + "){-2}"), X("D(" + std::to_string(n * m) + ")[1]{2}"));
      CHECK(bigraded_homology(t) == bigraded_homology(rhs));
      CHECK(match_complex(reduce_equivariant(t), rhs, Window::Top).ok);
    }
}

TEST_CASE("removing E") {
  for (int m = -4; m <= 4; ++m) {
    FreeComplex t = tensor_over_R(X("C(" + std::to_string(m) + ")"), X("E"));
    FreeComplex r = remove_E(t);
    CHECK(ranks(r) == std::vector<int>{4, 4});
    CHECK(match_complex(r, X("C(" + std::to_string(-m) + "){-1}"), Window::Top).ok);
  }
  CHECK_THROWS(remove_E(X("C(2)")));
}

TEST_CASE("the right D-action does not pass through C") {
  HomologyTable t = bigraded_homology(tensor_over_R(X("Dt(2)"), X("C(3)")));
  for (const auto& [hq, g] : t.groups)
    for (auto x : g.torsion) CHECK(x % 3 != 0);
}

TEST_CASE("expressions") {
  HomologyTable t = bigraded_homology(evaluate("C(3)[8]{25} (x) D(2)[2]{7}", Ring::localized(3)));
  CHECK(t.at(11, 30) == HomologyGroup{0, {3}});
  CHECK(t.at(12, 34) == HomologyGroup{0, {3}});
  HomologyTable s = bigraded_homology(evaluate("Runit{3} (+) D(2)[2]{7}"));
  CHECK(s.at(0, 3) == HomologyGroup{1, {}});
  CHECK(s.at(0, 1) == HomologyGroup{1, {}});
  CHECK(s.at(3, 7) == HomologyGroup{0, {2}});
  CHECK_THROWS_AS(evaluate("C(3) (x)"), std::invalid_argument);
}

TEST_CASE("summand matching rejects wrong targets") {
  FreeComplex c = X("C(3)[8]{25}");
  CHECK(match_summand(c, parse_presentation("C(3)[8]{25}"), Window::Top).ok);
  CHECK_FALSE(match_summand(c, parse_presentation("C(2)[8]{25}"), Window::Top).ok);
  CHECK_FALSE(match_summand(c, parse_presentation("C(3)[8]{27}"), Window::Top).ok);
  FreeComplex e = X("E{12}");
  CHECK(match_summand(direct_sum(e, X("C(1)[5]{20}")), parse_presentation("E{12}"), Window::Bottom).ok);
}
