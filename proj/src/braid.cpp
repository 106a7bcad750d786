#include "kht/braid.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kht {

int BraidWord::positive() const {
  return static_cast<int>(std::count_if(letters.begin(), letters.end(), [](int l) { return l > 0; }));
}

int BraidWord::negative() const {
  return static_cast<int>(std::count_if(letters.begin(), letters.end(), [](int l) { return l < 0; }));
}

std::string BraidWord::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < letters.size(); ++i) os << (i ? " " : "") << letters[i];
  return os.str();
}

BraidWord parse_braid(std::string_view text, int strands) {
  if (strands < 2) throw std::invalid_argument("a braid needs at least 2 strands");
  BraidWord b;
  b.strands = strands;
  std::istringstream is{std::string(text)};
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad braid letter '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("bad braid letter '" + tok + "'");
    if (v == 0) throw std::invalid_argument("braid letter 0 is not allowed");
    if (std::abs(v) >= strands) throw std::invalid_argument("braid letter " + tok + " out of range for " + std::to_string(strands) + " strands");
    b.letters.push_back(v);
  }
  return b;
}

BraidWord torus_braid(int p, int q) {
  if (p < 2 || q < 1) throw std::invalid_argument("torus_braid needs p >= 2, q >= 1");
  BraidWord b;
  b.strands = p;
  for (int r = 0; r < q; ++r)
    for (int i = 1; i < p; ++i) b.letters.push_back(i);
  return b;
}

BraidWord make_Ln(int n) {
  if (n < 2) throw std::invalid_argument("L_n needs n >= 2");
  BraidWord b;
  b.strands = n + 1;
  for (int r = 0; r < n + 1; ++r)
    for (int i = 1; i <= n; ++i) b.letters.push_back(i);
  for (int i = 1; i < n; ++i) b.letters.push_back(i);
  return b;
}

namespace {

// end[s] = bottom position (0-based) of the strand starting at top position s.
std::vector<int> end_positions(int strands, const std::vector<int>& letters) {
  std::vector<int> at(strands);
  std::iota(at.begin(), at.end(), 0);
  for (int l : letters) std::swap(at[std::abs(l) - 1], at[std::abs(l)]);
  std::vector<int> end(strands);
  for (int pos = 0; pos < strands; ++pos) end[at[pos]] = pos;
  return end;
}

}  // namespace

std::vector<std::vector<int>> closure_components(const BraidWord& b) {
  auto end = end_positions(b.strands, b.letters);
  std::vector<int> seen(b.strands, 0);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < b.strands; ++s) {
    if (seen[s]) continue;
    std::vector<int> c;
    for (int x = s; !seen[x]; x = end[x]) {
      seen[x] = 1;
      c.push_back(x + 1);
    }
    std::sort(c.begin(), c.end());
    comps.push_back(c);
  }
  return comps;  // already ordered by least strand
}

std::vector<int> component_of_strand(const BraidWord& b) {
  std::vector<int> of(b.strands);
  auto comps = closure_components(b);
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (int s : comps[i]) of[s - 1] = static_cast<int>(i);
  return of;
}

namespace {

// Conjugate b by g (result g^-1 b g) and map old component ids to new ones.
std::pair<BraidWord, std::vector<int>> conjugate(const BraidWord& b, const std::vector<int>& g) {
  BraidWord r;
  r.strands = b.strands;
  for (auto it = g.rbegin(); it != g.rend(); ++it) r.letters.push_back(-*it);
  r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
  r.letters.insert(r.letters.end(), g.begin(), g.end());
  std::vector<int> ginv;
  for (auto it = g.rbegin(); it != g.rend(); ++it) ginv.push_back(-*it);
  auto through = end_positions(b.strands, ginv);
  auto old_of = component_of_strand(b);
  auto new_of = component_of_strand(r);
  std::vector<int> map(closure_components(b).size(), -1);
  for (int y = 0; y < b.strands; ++y) map[old_of[through[y]]] = new_of[y];
  return {r, map};
}

}  // namespace

std::pair<BraidWord, std::vector<int>> arrange_ends(const BraidWord& b, int first, int last) {
  auto comps = closure_components(b);
  int nc = static_cast<int>(comps.size());
  if (first < 0 || first >= nc || last < 0 || last >= nc) throw std::invalid_argument("invalid component reference");
  std::vector<int> id(nc);
  std::iota(id.begin(), id.end(), 0);
  BraidWord cur = b;
  auto of = component_of_strand(cur);
  if (of[0] != first) {
    int x = comps[first].front();
    std::vector<int> g;
    for (int i = x - 1; i >= 1; --i) g.push_back(i);
    auto [w, m] = conjugate(cur, g);
    cur = w;
    for (auto& v : id) v = m[v];
  }
  int s = cur.strands;
  of = component_of_strand(cur);
  int target = id[last];
  if (of[s - 1] != target) {
    int y = -1;
    for (int k = s; k >= 2; --k)
      if (of[k - 1] == target) { y = k; break; }
    if (y < 0) throw std::invalid_argument("cannot place component " + std::to_string(last) + " on the last strand without moving the first strand");
    std::vector<int> g;
    for (int i = y; i <= s - 1; ++i) g.push_back(i);
    auto [w, m] = conjugate(cur, g);
    cur = w;
    for (auto& v : id) v = m[v];
  }
  return {cur, id};
}

namespace {

struct ExprParser {
  std::string_view s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool peek(char c) {
    skip();
    return i < s.size() && s[i] == c;
  }
  void expect(char c) {
    skip();
    if (i >= s.size() || s[i] != c) throw std::invalid_argument(std::string("expected '") + c + "' at position " + std::to_string(i) + " in link expression");
    ++i;
  }
  int integer() {
    skip();
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
      throw std::invalid_argument("expected integer at position " + std::to_string(start) + " in link expression");
    return std::stoi(std::string(s.substr(start, i - start)));
  }
  BraidWord factor(std::string& name) {
    skip();
    if (i >= s.size()) throw std::invalid_argument("expected a link factor");
    std::size_t start = i;
    char c = s[i++];
    BraidWord b;
    if (c == 'T') {
      expect('(');
      int p = integer();
      expect(',');
      int q = integer();
      expect(')');
      b = torus_braid(p, q);
    } else if (c == 'L') {
      b = make_Ln(integer());
    } else if (c == 'B') {
      expect('[');
      int strands = integer();
      expect(':');
      std::size_t close = s.find(']', i);
      if (close == std::string_view::npos) throw std::invalid_argument("unterminated B[...] factor");
      b = parse_braid(s.substr(i, close - i), strands);
      i = close + 1;
    } else {
      throw std::invalid_argument(std::string("unknown link factor '") + c + "'");
    }
    name = std::string(s.substr(start, i - start));
    return b;
  }
};

}  // namespace

LinkExpression parse_link_expression(std::string_view text) {
  ExprParser p{text};
  LinkExpression e;
  std::string name;
  e.factors.push_back(p.factor(name));
  e.names.push_back(name);
  while (p.peek('#')) {
    p.expect('#');
    std::pair<int, int> j{-1, -1};
    if (p.peek('[')) {
      p.expect('[');
      j.first = p.integer();
      p.expect(',');
      j.second = p.integer();
      p.expect(']');
    }
    e.joins.push_back(j);
    e.factors.push_back(p.factor(name));
    e.names.push_back(name);
  }
  p.skip();
  if (p.i != text.size()) throw std::invalid_argument("trailing characters in link expression");
  return e;
}

ClosurePlan plan_for(const BraidWord& b) {
  ClosurePlan p;
  p.word = b;
  p.component_of = component_of_strand(b);
  p.num_components = static_cast<int>(closure_components(b).size());
  std::vector<int> ids(p.num_components);
  std::iota(ids.begin(), ids.end(), 0);
  p.factor_components.push_back(ids);
  return p;
}

ClosurePlan compile(const LinkExpression& expr) {
  if (expr.factors.empty()) throw std::invalid_argument("empty link expression");
  if (expr.joins.size() + 1 != expr.factors.size()) throw std::invalid_argument("join count must be factor count - 1");
  const int n = static_cast<int>(expr.factors.size());
  if (n == 1) return plan_for(expr.factors[0]);

  std::vector<BraidWord> words;
  std::vector<std::vector<int>> idmaps;
  for (int f = 0; f < n; ++f) {
    const BraidWord& b = expr.factors[f];
    int nc = static_cast<int>(closure_components(b).size());
    auto of = component_of_strand(b);
    int first = of.front(), last = of.back();
    if (f > 0) {
      first = expr.joins[f - 1].second < 0 ? 0 : expr.joins[f - 1].second;
      if (first >= nc) throw std::invalid_argument("invalid component reference " + std::to_string(first) + " in factor " + std::to_string(f));
    }
    if (f + 1 < n) {
      last = expr.joins[f].first < 0 ? nc - 1 : expr.joins[f].first;
      if (last >= nc) throw std::invalid_argument("invalid component reference " + std::to_string(last) + " in factor " + std::to_string(f));
    }
    if (f > 0 && f + 1 < n && first == last && nc > 0 && closure_components(b)[first].size() < 2)
      throw std::invalid_argument("a one-strand component cannot be joined on both sides");
    auto [w, m] = arrange_ends(b, first, last);
    words.push_back(w);
    idmaps.push_back(m);
  }

  ClosurePlan plan;
  BraidWord& out = plan.word;
  out.strands = 0;
  std::vector<int> offsets;
  for (int f = 0; f < n; ++f) {
    int offset = f == 0 ? 0 : out.strands - 1;
    offsets.push_back(offset);
    for (int l : words[f].letters) out.letters.push_back(l > 0 ? l + offset : l - offset);
    out.strands = offset + words[f].strands;
  }
  plan.component_of = component_of_strand(out);
  plan.num_components = static_cast<int>(closure_components(out).size());
  for (int f = 0; f < n; ++f) {
    auto of = component_of_strand(words[f]);
    std::vector<int> fc(idmaps[f].size());
    for (std::size_t c = 0; c < idmaps[f].size(); ++c) {
      int newid = idmaps[f][c];
      int strand = static_cast<int>(std::find(of.begin(), of.end(), newid) - of.begin());
      fc[c] = plan.component_of[strand + offsets[f]];
    }
    plan.factor_components.push_back(fc);
  }
  return plan;
}

ClosurePlan with_basepoints(ClosurePlan plan, const std::vector<int>& components) {
  if (components.size() > 2) throw std::invalid_argument("at most two basepoints are supported");
  const int s = plan.word.strands;
  std::vector<int> last_use(s, -1);
  for (int i = 0; i < plan.word.length(); ++i) {
    int a = std::abs(plan.word.letters[i]);
    last_use[a - 1] = i;
    last_use[a] = i;
  }
  plan.basepoints.clear();
  for (int c : components) {
    if (c < 0 || c >= plan.num_components) throw std::invalid_argument("basepoint on nonexistent component " + std::to_string(c));
    int best = -1;
    for (int col = 0; col < s; ++col) {
      if (plan.component_of[col] != c) continue;
      // A second basepoint on the same component takes another column when there is one.
      bool taken = !plan.basepoints.empty() && plan.basepoints[0].column == col + 1;
      if (best >= 0 && taken) continue;
      bool best_taken = best >= 0 && !plan.basepoints.empty() && plan.basepoints[0].column == best + 1;
      if (best < 0 || best_taken || last_use[col] >= last_use[best]) best = col;
    }
    plan.basepoints.push_back({best + 1, c});
  }
  return plan;
}

}  // namespace kht
