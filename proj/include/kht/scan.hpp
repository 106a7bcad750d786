#pragma once

#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kht/braid.hpp"
#include "kht/cobcat.hpp"
#include "kht/free_complex.hpp"

namespace kht::scan {

struct Generator {
  int object = 0;  // index into the complex's object table
  int q = 0;       // quantum shift
  int h = 0;       // local homological degree
};

// Complex over the dotted cobordism category on a labelled boundary.
// Generators are never renumbered while entries are edited; dead generators
// are dropped by compact().
class CobComplex {
 public:
  explicit CobComplex(Ring ring = Ring::integers());

  // The one-generator complex on the empty boundary.
  static CobComplex unit(Ring ring);

  const Ring& ring() const { return ring_; }
  const std::vector<int>& labels() const { return labels_; }
  int position(int label) const;
  int hoffset = 0, qoffset = 0;

  int intern(const cob::Smoothing& s);
  const cob::Smoothing& object(int id) const { return objects_[id]; }
  int num_objects() const { return static_cast<int>(objects_.size()); }

  int add_generator(const Generator& g);
  const Generator& gen(int i) const { return gens_[i]; }
  bool alive(int i) const { return alive_[i] != 0; }
  int size() const { return static_cast<int>(gens_.size()); }
  int live_count() const;
  std::vector<int> degree_counts() const;  // live generators per local degree, from min degree
  int min_degree() const;

  const std::unordered_map<int, cob::Terms>& out(int g) const { return out_[g]; }
  const std::unordered_set<int>& in(int g) const { return in_[g]; }
  const cob::Terms* entry(int src, int tgt) const;
  void add_entry(int src, int tgt, const cob::Terms& t, const Scalar& s = Scalar(1));

  // Cancels every isomorphism entry (deterministic order).
  int eliminate();
  void compact();

  // Throws std::logic_error when d o d != 0 or an entry is inhomogeneous.
  void validate() const;
  std::string dump() const;

  cob::Cobordism morphism(int src, int tgt) const;

  void set_labels(std::vector<int> labels);

 private:
  friend class Builder;
  bool is_iso(int src, int tgt, Scalar* unit) const;
  void touch(int src, int tgt);
  void drop_entry(int src, int tgt);
  const cob::GluePlan& compose_plan(int a, int b, int c);

  Ring ring_;
  std::vector<int> labels_;
  std::vector<cob::Smoothing> objects_;
  std::unordered_map<cob::Smoothing, int, cob::SmoothingHash> object_index_;
  std::vector<Generator> gens_;
  std::vector<char> alive_;
  std::vector<std::unordered_map<int, cob::Terms>> out_;
  std::vector<std::unordered_set<int>> in_;
  struct Candidate {
    int cls, h, tgt, src;
    auto operator<=>(const Candidate&) const = default;
  };
  std::set<Candidate>* candidates_ = nullptr;
  struct TripleHash {
    std::size_t operator()(const std::tuple<int, int, int>& t) const noexcept {
      return (static_cast<std::size_t>(std::get<0>(t)) * 1000003u + std::get<1>(t)) * 1000003u + std::get<2>(t);
    }
  };
  std::unordered_map<std::tuple<int, int, int>, cob::GluePlan, TripleHash> compose_cache_;
};

// A small complex on its own boundary points, tensored into a CobComplex.
struct Piece {
  int points = 0;
  std::vector<cob::Smoothing> objects;
  std::vector<int> q, h;
  struct Arrow {
    int src, tgt;
    cob::Terms terms;
  };
  std::vector<Arrow> arrows;
};

// Crossing smoothings on points (in_j, in_j+1, out_j, out_j+1) = (0, 1, 2, 3).
Piece crossing_piece(int sign);
// Closing arc joining points 0 and 1; or a lone circle when `circle` is set.
Piece closing_piece(bool circle);

// Tensors `piece` into `c`. `glued` lists (label in c, point of piece);
// `piece_labels` assigns labels to the piece points that stay open.
CobComplex tensor(const CobComplex& c, const Piece& piece, const std::vector<std::pair<int, int>>& glued, const std::vector<int>& piece_labels);

// Replaces every generator whose object has circles by its circle-free
// replacements. `circle_order`, when given, supplies for each generator the
// order in which circles become label bits.
struct DeloopRecord {
  int parent = 0;
  int labels = 0;  // bit i set: i-th circle (in circle order) carries a dot
};
CobComplex deloop(const CobComplex& c, std::vector<DeloopRecord>* records = nullptr,
                  const std::function<std::vector<int>(int)>& circle_order = nullptr);

struct ColumnState {
  int top = -1;
  int end = -1;
  bool closed = false;
};

struct ScanOptions {
  bool progressive_closure = true;
  bool check_steps = false;  // validate d o d = 0 and homogeneity after each step
  std::function<void(int step, const CobComplex&)> on_step;
};

struct ScanState {
  CobComplex complex;
  std::vector<ColumnState> columns;
  int consumed = 0;
  int next_label = 0;
  ClosurePlan plan;
};

ScanState start(const ClosurePlan& plan, const Ring& ring);
CobComplex crossing_complex(int sign, const Ring& ring = Ring::integers());
ScanState tensor_step(ScanState s, int letter);
ScanState deloop_step(ScanState s);
ScanState eliminate_step(ScanState s);
// Closes column (1-based) of the plan and simplifies.
ScanState close_column(ScanState s, int column);

ScanState scan_diagram(const ClosurePlan& plan, const Ring& ring, const ScanOptions& opt = {});
// Closes every remaining column. Basepoints come from the plan.
FreeComplex close_with_basepoints(const ScanState& s);

// Convenience: scan + close.
FreeComplex khovanov_complex(const ClosurePlan& plan, const Ring& ring, const ScanOptions& opt = {});

// Brute-force cube of resolutions.
FreeComplex cube_complex(const ClosurePlan& plan, const Ring& ring, int limit = 12);

}  // namespace kht::scan
