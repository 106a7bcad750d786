#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kht/free_complex.hpp"
#include "kht/matrix.hpp"

namespace kht::rmod {

// Named complexes over R = base[X]/(X^2), 1 in q-degree 1 and X in degree -1.
//   C(n)   R(x)R{-1} -> R(x)R{1},  1(x)1 |-> nX(x)1 - 1(x)X      (left and right)
//   D(m)   R{-1} -> R{1},          1 |-> mX                        (left only)
//   Dt(m)  as D(m) with the right action instead
//   E      R(x)R -> R{1}, multiplication                          (left and right)
//   Runit  R{-1} in degree 0                                       (left only)
//   RR     R(x)R in degree 0                                       (left and right)
struct Presentation {
  enum class Kind { C, D, Dt, E, Runit, RR };
  Kind kind = Kind::Runit;
  long long param = 0;
  int hshift = 0;  // [k]
  int qshift = 0;  // {q}

  std::string str() const;
  bool operator==(const Presentation& o) const = default;
};

// One term, e.g. "C(3)[8]{25}", "E{12}", "Runit{3}".
Presentation parse_presentation(std::string_view text);

FreeComplex expand(const Presentation& p, const Ring& ring = Ring::integers());

// Terms combined with "(x)" (tensor over R, binds tighter) and "(+)".
FreeComplex evaluate(std::string_view expression, const Ring& ring = Ring::integers());

enum class Side { Left, Right };

// Graded R-basis for one action. Per degree, the columns of `basis` express
// the new Z-basis in old coordinates: generators first, then X times each
// generator in the same order.
struct RBasis {
  Side side = Side::Left;
  std::vector<SparseMatrix> basis, inverse;
  std::vector<std::vector<int>> gen_q;
  int generators(int degree_index) const { return static_cast<int>(gen_q[degree_index].size()); }
};

// Throws NotFree when the action does not make the complex free over R.
struct NotFree : std::runtime_error {
  using std::runtime_error::runtime_error;
};
RBasis r_basis(const FreeComplex& m, Side side);

// M (x)_R N, M acting on the right and N on the left. The result keeps the
// left action of M and the right action of N.
FreeComplex tensor_over_R(const FreeComplex& m, const FreeComplex& n);

// Rewrites every degree as a direct sum of cyclic sub-bimodules, one per
// homogeneous generator. Returns false (complex unchanged) when no such
// decomposition exists in the chosen basis.
bool refine_blocks(FreeComplex& m);

struct ReduceStats {
  int cancelled = 0;  // block pairs
  std::vector<std::string> log;
};

// Cancels pairs of blocks joined by an invertible (over the ring) block of d.
FreeComplex reduce_equivariant(const FreeComplex& m, ReduceStats* stats = nullptr);

enum class Window { Top, Bottom };

struct MatchResult {
  bool ok = false;
  std::string detail;
  // Per window degree: columns are the images of the target basis in M.
  std::vector<Matrix> witness;
  int hmin = 0;
};

MatchResult match_summand(const FreeComplex& m, const Presentation& target, Window window);
// Same with an arbitrary target complex.
MatchResult match_complex(const FreeComplex& m, const FreeComplex& target, Window window);

// C(m) (x)_R E  ~>  C(-m){-1}. Throws when the input does not have that shape.
FreeComplex remove_E(const FreeComplex& m);

}  // namespace kht::rmod
