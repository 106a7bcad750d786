#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kht {

// A braid word on `strands` strands; letter +i is the positive generator
// crossing strands i and i+1 (1-based), -i its inverse. Read top to bottom.
struct BraidWord {
  int strands = 2;
  std::vector<int> letters;

  int positive() const;
  int negative() const;
  int length() const { return static_cast<int>(letters.size()); }
  std::string str() const;  // "i1 i2 ..."
  bool operator==(const BraidWord& o) const { return strands == o.strands && letters == o.letters; }
};

BraidWord parse_braid(std::string_view text, int strands);
BraidWord torus_braid(int p, int q);
// (s1 ... sn)^(n+1) s1 ... s(n-1) on n+1 strands.
BraidWord make_Ln(int n);

// Components as sorted lists of 1-based strands, ordered by least strand.
std::vector<std::vector<int>> closure_components(const BraidWord& b);
// component_of[strand-1] = component id.
std::vector<int> component_of_strand(const BraidWord& b);

struct LinkExpression {
  std::vector<BraidWord> factors;
  // joins[i] joins factors i and i+1: (component of factor i, component of
  // factor i+1). A value of -1 selects the default.
  std::vector<std::pair<int, int>> joins;
  std::vector<std::string> names;  // token text per factor
};

// Grammar: factor ('#' ('[' i ',' j ']')? factor)*, factor = T(p,q) | L<n> | B[s: w].
LinkExpression parse_link_expression(std::string_view text);

struct Basepoint {
  int column = 0;     // 1-based strand whose closure arc carries the basepoint
  int component = 0;  // canonical component id
};

struct ClosurePlan {
  BraidWord word;
  std::vector<int> component_of;  // per strand (0-based index), canonical ids
  int num_components = 0;
  std::vector<Basepoint> basepoints;  // [0] acts on the left, [1] on the right
  // For each factor of the source expression: factor component id -> compiled id.
  std::vector<std::vector<int>> factor_components;
};

ClosurePlan compile(const LinkExpression& expr);
ClosurePlan plan_for(const BraidWord& b);

// Chooses closure arcs for basepoints on the given components (at most two).
// Each basepoint goes on the closure arc of the component strand that is
// used last by the word; a second basepoint on the same component takes the
// next such strand when the component has one.
ClosurePlan with_basepoints(ClosurePlan plan, const std::vector<int>& components);

// Conjugates b so that component `first` contains strand 1 and component
// `last` contains the last strand. Returns the new word and a map from old
// component ids to new ones.
std::pair<BraidWord, std::vector<int>> arrange_ends(const BraidWord& b, int first, int last);

}  // namespace kht
