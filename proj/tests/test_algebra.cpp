#include <doctest.h>

#include <random>

#include "kht/homology.hpp"
#include "kht/matrix.hpp"
#include "kht/scalar.hpp"
#include "oracles.hpp"

using namespace kht;

TEST_CASE("scalar arithmetic switches to GMP on overflow and back") {
  Scalar big = Scalar(1LL << 62) * Scalar(16);
  CHECK_FALSE(big.is_small());
  CHECK(big.str() == "73786976294838206464");
  Scalar back = big / Scalar(1LL << 62);
  CHECK(back.is_small());
  CHECK(back == Scalar(16));
  CHECK(Scalar::fraction(3, -6) == Scalar::parse("-1/2"));
  CHECK(Scalar::parse("12/4").is_integer());
  CHECK(Scalar(12).valuation(2) == 2);
  CHECK(Scalar::fraction(5, 9).valuation(3) == -2);
}

TEST_CASE("rings") {
  Ring z3 = Ring::parse("Zp:3");
  CHECK(z3 == Ring::localized(3));
  CHECK(Ring::parse("Z(3)") == z3);
  CHECK(z3.name() == "Z(3)");
  CHECK(z3.contains(Scalar::fraction(1, 2)));
  CHECK_FALSE(z3.contains(Scalar::fraction(1, 3)));
  CHECK(z3.is_unit(Scalar(10)));
  CHECK_FALSE(z3.is_unit(Scalar(6)));
  CHECK(z3.canonical_associate(Scalar(-18)) == Scalar(9));
  CHECK(Ring::integers().canonical_associate(Scalar(-18)) == Scalar(18));
  CHECK(Ring::rationals().is_unit(Scalar(7)));
  CHECK_THROWS_AS(Ring::parse("Zp:4"), std::invalid_argument);
  CHECK_THROWS_AS(Ring::parse("R"), std::invalid_argument);
}

TEST_CASE("inverse, rank and nullspace") {
  Matrix a = Matrix::from_rows({{2, 1}, {1, 1}});
  auto inv = inverse(a, Ring::integers());
  REQUIRE(inv);
  CHECK(a * *inv == Matrix::identity(2));
  Matrix b = Matrix::from_rows({{2, 0}, {0, 1}});
  CHECK_FALSE(inverse(b, Ring::integers()));
  CHECK(inverse(b, Ring::localized(3)));
  Matrix c = Matrix::from_rows({{1, 2, 3}, {2, 4, 6}});
  CHECK(rank(c) == 1);
  Matrix ns = nullspace(c);
  CHECK(ns.cols() == 2);
  CHECK((c * ns).is_zero());
  for (int j = 0; j < ns.cols(); ++j)
    for (int i = 0; i < ns.rows(); ++i) CHECK(ns.at(i, j).is_integer());
}

TEST_CASE("smith normal form agrees with determinantal divisors") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> entry(-6, 6), dim(1, 4);
  for (int t = 0; t < 150; ++t) {
    Matrix m(dim(rng), dim(rng));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m.at(i, j) = entry(rng);
    SmithForm f = smith_normal_form(m);
    CHECK(f.U * m * f.V == f.S);
    auto expect = oracle::determinantal_divisors(m);
    REQUIRE(f.divisors.size() == expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(f.divisors[k] == Scalar(expect[k]));
  }
}

TEST_CASE("smith normal form over Z(3) keeps only powers of 3") {
  Matrix m = Matrix::from_rows({{6, 0, 0}, {0, 18, 0}, {0, 0, 5}});
  SmithForm f = smith_normal_form(m, Ring::localized(3));
  CHECK(f.U * m * f.V == f.S);
  REQUIRE(f.divisors.size() == 3);
  CHECK(f.divisors[0] == Scalar(1));
  CHECK(f.divisors[1] == Scalar(3));
  CHECK(f.divisors[2] == Scalar(9));
}

namespace {

FreeComplex two_term(long long k) {
  FreeComplex c;
  c.hmin = 0;
  c.q = {{1}, {1}};
  c.blocks = {{1}, {1}};
  SparseMatrix d(1, 1);
  d.set(0, 0, Scalar(k));
  c.d = {d, SparseMatrix(0, 1)};
  return c;
}

}  // namespace

TEST_CASE("homology of Z --k--> Z") {
  HomologyTable t = bigraded_homology(two_term(12));
  CHECK(t.groups.size() == 1);
  CHECK(t.at(1, 1) == HomologyGroup{0, {12}});
  HomologyTable t3 = bigraded_homology(two_term(12).with_ring(Ring::localized(3)));
  CHECK(t3.at(1, 1) == HomologyGroup{0, {3}});
  HomologyTable t0 = bigraded_homology(two_term(0));
  CHECK(t0.at(0, 1) == HomologyGroup{1, {}});
  CHECK(t0.at(1, 1) == HomologyGroup{1, {}});
  CHECK(bigraded_homology(two_term(-1)).groups.empty());
}

TEST_CASE("homology table serialization round-trips") {
  HomologyTable t = bigraded_homology(two_term(6));
  t.groups[{0, 3}] = HomologyGroup{2, {2, 4}};
  HomologyTable back = HomologyTable::from_json(t.to_json());
  CHECK(back == t);
  CHECK(back.to_json() == t.to_json());
  CHECK(t.to_csv().rfind("ring,h,q,free,torsion\n", 0) == 0);
  CHECK_THROWS(HomologyTable::from_json("{\"ring\": 3}"));
}

TEST_CASE("euler characteristic") {
  HomologyTable t;
  t.groups[{0, 1}] = {1, {}};
  t.groups[{1, 1}] = {0, {2}};
  t.groups[{3, 9}] = {1, {}};
  auto chi = euler_characteristic(t);
  CHECK(chi == LaurentPolynomial{{1, 1}, {9, -1}});
}

TEST_CASE("torsion predictions") {
  auto k1 = predict_all(3, 1);
  std::vector<std::pair<int, int>> odd;
  for (const auto& p : k1)
    if (p.order == 3) odd.push_back({p.h, p.q});
  CHECK(odd == std::vector<std::pair<int, int>>{{11, 30}, {12, 34}});
  auto k2 = predict_all(3, 2);
  CHECK(k2.size() == 6);
  auto p = predict_torsion(3, 2, 2, 0);
  CHECK(p.h == 19);
  CHECK(p.q == 53);
  CHECK(p.order == 9);
  CHECK(predict_torsion(3, 2, 2, 1).multiplicity == 2);
  CHECK_THROWS_AS(predict_torsion(3, 2, 1, 2), std::invalid_argument);
}

TEST_CASE("summand assertions use primary decomposition") {
  HomologyTable t;
  t.groups[{19, 53}] = {0, {18}};
  t.groups[{20, 57}] = {1, {18, 18}};
  CHECK(assert_summand(t, 19, 53, 9, 1).ok);
  CHECK(assert_summand(t, 20, 57, 9, 2).ok);
  CHECK_FALSE(assert_summand(t, 20, 57, 9, 3).ok);
  CHECK_FALSE(assert_summand(t, 19, 53, 27, 1).ok);
  CHECK(assert_summand(t, 19, 53, 2, 1).ok);
}
