#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kht/matrix.hpp"
#include "kht/scalar.hpp"

namespace kht {

// A bigraded cochain complex of free modules over the coefficient ring, with
// up to two commuting nilpotent actions (left and right basepoint actions).
//
// Generators of degree hmin + i are indexed 0..q[i].size()-1. d[i] maps degree
// hmin + i to hmin + i + 1 (rows index the target). Each degree is partitioned
// into consecutive blocks; both actions preserve every block.
struct FreeComplex {
  Ring ring = Ring::integers();
  int hmin = 0;
  std::vector<std::vector<int>> q;
  std::vector<std::vector<int>> blocks;
  std::vector<SparseMatrix> d;
  std::optional<std::vector<SparseMatrix>> left;
  std::optional<std::vector<SparseMatrix>> right;

  int num_degrees() const { return static_cast<int>(q.size()); }
  int hmax() const { return hmin + num_degrees() - 1; }
  int rank_at(int h) const;
  int total_rank() const;
  // Index of degree h, or -1 when outside the stored range.
  int index(int h) const { return (h >= hmin && h <= hmax()) ? h - hmin : -1; }

  // Empty degree slots are appended at both ends so that every differential
  // has a well-defined target.
  void resize_degrees(int new_hmin, int new_hmax);
  // Drops empty degrees at both ends.
  void trim();
  FreeComplex shifted(int dh, int dq) const;
  FreeComplex with_ring(const Ring& r) const;
  // One block per generator when no action is present; otherwise unchanged.
  void ensure_blocks();
  // Throws std::logic_error describing the first violated invariant.
  void validate() const;

  bool operator==(const FreeComplex& o) const;
  bool operator!=(const FreeComplex& o) const { return !(*this == o); }
};

// Direct sum; both summands must carry the same set of actions.
FreeComplex direct_sum(const FreeComplex& a, const FreeComplex& b);

}  // namespace kht
