#pragma once

// Independent reference computations used only by the tests.

#include <map>
#include <numeric>
#include <vector>

#include "kht/braid.hpp"
#include "kht/matrix.hpp"

namespace oracle {

// Elementary divisors of an integer matrix from its determinantal divisors:
// d_k = gcd of all k x k minors, s_k = d_k / d_(k-1). Exponential; small inputs.
inline std::vector<long long> determinantal_divisors(const kht::Matrix& m) {
  const int r = m.rows(), c = m.cols();
  std::vector<long long> dk{1};
  for (int k = 1; k <= std::min(r, c); ++k) {
    long long g = 0;
    std::vector<int> rs(k), cs(k);
    std::vector<bool> rsel(r, false), csel(c, false);
    std::fill(rsel.begin(), rsel.begin() + k, true);
    do {
      int a = 0;
      for (int i = 0; i < r; ++i)
        if (rsel[i]) rs[a++] = i;
      std::fill(csel.begin(), csel.end(), false);
      std::fill(csel.begin(), csel.begin() + k, true);
      do {
        int b = 0;
        for (int j = 0; j < c; ++j)
          if (csel[j]) cs[b++] = j;
        kht::Matrix sub(k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) sub.at(i, j) = m.at(rs[i], cs[j]);
        long long det = std::stoll(sub.determinant().str());
        g = std::gcd(g, det < 0 ? -det : det);
      } while (std::prev_permutation(csel.begin(), csel.end()));
    } while (std::prev_permutation(rsel.begin(), rsel.end()));
    if (g == 0) break;
    dk.push_back(g);
  }
  std::vector<long long> s;
  for (std::size_t k = 1; k < dk.size(); ++k) s.push_back(dk[k] / dk[k - 1]);
  return s;
}

// Unnormalized Jones polynomial of a braid closure by the Kauffman state sum
// (q-exponent -> coefficient): sum over resolutions of (-1)^r q^r (q + 1/q)^circles,
// times (-1)^(n-) q^(n+ - 2 n-). The 0-resolution of a positive crossing keeps
// the strands; for a negative crossing it is the turnback.
inline std::map<int, long long> jones(const kht::BraidWord& b) {
  const int n = b.length(), s = b.strands;
  int npos = b.positive(), nneg = b.negative();
  std::map<int, long long> total;
  if (n == 0) {
    std::map<int, long long> term{{0, 1}};
    for (int k = 0; k < s; ++k) {
      std::map<int, long long> next;
      for (auto [e, v] : term) {
        next[e + 1] += v;
        next[e - 1] += v;
      }
      term = next;
    }
    return term;
  }
  for (long state = 0; state < (1L << n); ++state) {
    std::vector<int> parent((n + 1) * s);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto join = [&](int a, int c) { parent[find(a)] = find(c); };
    auto node = [&](int level, int strand) { return (level % n) * s + strand; };
    int r = 0;
    for (int t = 0; t < n; ++t) {
      int letter = b.letters[t], i = std::abs(letter) - 1;
      bool one = (state >> t) & 1;
      r += one;
      bool straight = (letter > 0) != one;
      for (int j = 0; j < s; ++j)
        if (j != i && j != i + 1) join(node(t, j), node(t + 1, j));
      if (straight) {
        join(node(t, i), node(t + 1, i));
        join(node(t, i + 1), node(t + 1, i + 1));
      } else {
        join(node(t, i), node(t, i + 1));
        join(node(t + 1, i), node(t + 1, i + 1));
      }
    }
    int circles = 0;
    for (int x = 0; x < n * s; ++x) circles += find(x) == x;
    // (q + 1/q)^circles
    std::map<int, long long> term{{0, 1}};
    for (int k = 0; k < circles; ++k) {
      std::map<int, long long> next;
      for (auto [e, v] : term) {
        next[e + 1] += v;
        next[e - 1] += v;
      }
      term = next;
    }
    long long sign = ((r + nneg) % 2) ? -1 : 1;
    for (auto [e, v] : term) total[e + r + npos - 2 * nneg] += sign * v;
  }
  std::erase_if(total, [](const auto& kv) { return kv.second == 0; });
  return total;
}

}  // namespace oracle
