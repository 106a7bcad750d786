#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "kht/cobcat.hpp"
#include "kht/homology.hpp"
#include "kht/rmod.hpp"
#include "kht/scan.hpp"

using namespace kht;

namespace {

BraidWord random_braid(std::mt19937& rng) {
  std::uniform_int_distribution<int> strands(2, 4), len(0, 8), coin(0, 1);
  BraidWord b;
  b.strands = strands(rng);
  std::uniform_int_distribution<int> gen(1, b.strands - 1);
  int n = len(rng);
  for (int i = 0; i < n; ++i) b.letters.push_back(coin(rng) ? gen(rng) : -gen(rng));
  return b;
}

// Structural checks written against the raw matrices.
void check_structure(const FreeComplex& c) {
  for (int i = 0; i + 1 < c.num_degrees(); ++i) {
    CHECK((c.d[i + 1] * c.d[i]).is_zero());
    for (int col = 0; col < c.d[i].cols(); ++col)
      for (const auto& e : c.d[i].column(col)) CHECK(c.q[i + 1][e.row] == c.q[i][col]);
  }
  for (const auto* act : {&c.left, &c.right}) {
    if (!*act) continue;
    for (int i = 0; i < c.num_degrees(); ++i) {
      const SparseMatrix& x = (**act)[i];
      CHECK((x * x).is_zero());
      if (i + 1 < c.num_degrees()) CHECK(c.d[i] * x == (**act)[i + 1] * c.d[i]);
    }
  }
  if (c.left && c.right)
    for (int i = 0; i < c.num_degrees(); ++i) CHECK((*c.left)[i] * (*c.right)[i] == (*c.right)[i] * (*c.left)[i]);
}

}  // namespace

TEST_CASE("random braids: d^2 = 0 and homogeneity after every step, cube agreement") {
  std::mt19937 rng(20240601);
  scan::ScanOptions opt;
  opt.check_steps = true;
  int steps = 0;
  opt.on_step = [&](int, const scan::CobComplex& c) {
    CHECK_NOTHROW(c.validate());
    ++steps;
  };
  for (int t = 0; t < 100; ++t) {
    BraidWord b = random_braid(rng);
    CAPTURE(b.strands);
    CAPTURE(b.str());
    ClosurePlan plan = plan_for(b);
    FreeComplex c = scan::khovanov_complex(plan, Ring::integers(), opt);
    check_structure(c);
    CHECK(bigraded_homology(c) == bigraded_homology(scan::cube_complex(plan, Ring::integers())));
  }
  CHECK(steps > 0);
}

TEST_CASE("random basepointed braids: actions square to zero and commute") {
  std::mt19937 rng(99);
  for (int t = 0; t < 40; ++t) {
    BraidWord b = random_braid(rng);
    ClosurePlan plan = plan_for(b);
    std::vector<int> comps{0, plan.num_components - 1};
    FreeComplex c = scan::khovanov_complex(with_basepoints(plan, comps), Ring::integers());
    CAPTURE(b.str());
    REQUIRE(c.left);
    REQUIRE(c.right);
    check_structure(c);
  }
}

TEST_CASE("smith normal form certificates on random matrices") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> dim(1, 12), entry(-9, 9);
  for (int t = 0; t < 500; ++t) {
    Matrix m(dim(rng), dim(rng));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m.at(i, j) = entry(rng);
    const Ring& ring = t % 5 == 4 ? Ring::localized(3) : Ring::integers();
    SmithForm f = smith_normal_form(m, ring);
    CHECK(f.U * m * f.V == f.S);
    CHECK(ring.is_unit(f.U.determinant()));
    CHECK(ring.is_unit(f.V.determinant()));
    for (int i = 0; i < f.S.rows(); ++i)
      for (int j = 0; j < f.S.cols(); ++j)
        if (i != j) CHECK(f.S.at(i, j).is_zero());
    for (std::size_t k = 0; k < f.divisors.size(); ++k) {
      CHECK(f.S.at(static_cast<int>(k), static_cast<int>(k)) == f.divisors[k]);
      if (k) CHECK(ring.divides(f.divisors[k - 1], f.divisors[k]));
    }
    CHECK(static_cast<int>(f.divisors.size()) == rank(m));
  }
}

TEST_CASE("delooping biorthogonality on random objects") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pairs(0, 3), circles(1, 3), shift(-4, 4);
  for (int t = 0; t < 60; ++t) {
    int k = pairs(rng);
    std::vector<int> pts(2 * k);
    std::iota(pts.begin(), pts.end(), 0);
    // non-crossing matching: nested arcs
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < k; ++i) arcs.push_back({i, 2 * k - 1 - i});
    cob::PlanarObject o{cob::Smoothing::from_pairs(2 * k, arcs, circles(rng)), shift(rng)};
    cob::DeloopMaps m = cob::deloop_maps(o);
    CHECK(cob::compose(m.out_plus, m.in_plus) == cob::identity(m.plus));
    CHECK(cob::compose(m.out_minus, m.in_minus) == cob::identity(m.minus));
    CHECK(cob::compose(m.out_plus, m.in_minus).terms.empty());
    CHECK(cob::compose(m.out_minus, m.in_plus).terms.empty());
    CHECK(cob::compose(m.in_plus, m.out_plus) + cob::compose(m.in_minus, m.out_minus) == cob::identity(o));
  }
}

TEST_CASE("actions on presentation complexes and their tensor products") {
  const char* names[] = {"C(3)", "C(-2)", "D(2)", "E", "RR", "Runit{1}", "C(3)[8]{25}"};
  for (const char* a : names) {
    FreeComplex x = rmod::expand(rmod::parse_presentation(a));
    check_structure(x);
    for (const char* b : names) {
      FreeComplex y = rmod::expand(rmod::parse_presentation(b));
      if (!x.right || !y.left) continue;
      CAPTURE(a);
      CAPTURE(b);
      FreeComplex t = rmod::tensor_over_R(x, y);
      check_structure(t);
      check_structure(rmod::reduce_equivariant(t));
    }
  }
}
