#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kht/free_complex.hpp"
#include "kht/matrix.hpp"

namespace kht {

struct SmithForm {
  Matrix S, U, V;  // U * M * V = S
  std::vector<Scalar> divisors;  // nonzero diagonal entries, canonical associates
};

// Smith normal form over the ring. Transforms are only tracked when requested.
SmithForm smith_normal_form(const Matrix& m, const Ring& ring = Ring::integers(), bool with_transforms = true);

struct HomologyGroup {
  int free = 0;
  std::vector<long long> torsion;  // ascending, entries >= 2
  bool operator==(const HomologyGroup& o) const { return free == o.free && torsion == o.torsion; }
  bool empty() const { return free == 0 && torsion.empty(); }
};

struct HomologyTable {
  Ring ring = Ring::integers();
  std::map<std::pair<int, int>, HomologyGroup> groups;  // (h, q) -> group; only nonzero groups stored

  HomologyGroup at(int h, int q) const;
  bool operator==(const HomologyTable& o) const { return ring == o.ring && groups == o.groups; }
  bool operator!=(const HomologyTable& o) const { return !(*this == o); }

  std::string to_text() const;
  std::string to_json() const;
  std::string to_csv() const;
  static HomologyTable from_json(const std::string& text);
};

HomologyTable bigraded_homology(const FreeComplex& c);

// q-exponent -> coefficient.
using LaurentPolynomial = std::map<int, long long>;
LaurentPolynomial euler_characteristic(const HomologyTable& t);
std::string to_string(const LaurentPolynomial& p);

struct TorsionPrediction {
  int p = 3, k = 0, l = 0, m = 0;
  int h = 0, q = 0;
  long long order = 0;
  long long multiplicity = 0;
};

TorsionPrediction predict_torsion(int p, int k, int l, int m);
std::vector<TorsionPrediction> predict_all(int p, int k);

struct SummandReport {
  bool ok = false;
  long long found = 0;
  std::string detail;
};

SummandReport assert_summand(const HomologyTable& t, int h, int q, long long order, long long min_multiplicity);

}  // namespace kht
