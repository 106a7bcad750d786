#include <mutex>
#include <sstream>

#include "kht/cli.hpp"
#include "kht/rmod.hpp"

namespace kht::cli {

using rmod::expand;
using rmod::match_complex;
using rmod::match_summand;
using rmod::parse_presentation;
using rmod::reduce_equivariant;
using rmod::tensor_over_R;
using rmod::Window;

void VerifyReport::check(bool cond, const std::string& what) {
  lines.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
  ok = ok && cond;
}

namespace {

std::string P(const char* kind, long long n, int h = 0, int q = 0) {
  std::ostringstream os;
  os << kind;
  if (std::string(kind) == "C" || std::string(kind) == "D" || std::string(kind) == "Dt") os << "(" << n << ")";
  if (h) os << "[" << h << "]";
  if (q) os << "{" << q << "}";
  return os.str();
}

FreeComplex X(const std::string& p, const Ring& r) { return expand(parse_presentation(p), r); }

const std::vector<Ring>& check_rings() {
  static const std::vector<Ring> rings{Ring::integers(), Ring::localized(3)};
  return rings;
}

// Checks lhs ~ rhs: equal homology, and the equivariant reduction of lhs is
// isomorphic to rhs.
void compare(VerifyReport& rep, std::mutex& mu, const std::string& label, const FreeComplex& lhs, const FreeComplex& rhs) {
  bool same = bigraded_homology(lhs) == bigraded_homology(rhs);
  FreeComplex red = reduce_equivariant(lhs);
  auto m = match_complex(red, rhs, Window::Top);
  std::lock_guard<std::mutex> lock(mu);
  rep.check(same, label + ": homology");
  rep.check(m.ok, label + ": reduced complex isomorphic (" + m.detail + ")");
}

template <class F>
void over_pairs(VerifyReport& rep, int range, int jobs, F body) {
  std::vector<std::tuple<int, int, int>> cases;
  for (int ri = 0; ri < static_cast<int>(check_rings().size()); ++ri)
    for (int n = -range; n <= range; ++n)
      for (int m = -range; m <= range; ++m) cases.push_back({ri, n, m});
  std::vector<VerifyReport> parts(cases.size());
  std::vector<std::mutex> mus(cases.size());
  parallel_for(static_cast<int>(cases.size()), jobs, [&](int i) {
    auto [ri, n, m] = cases[i];
    body(parts[i], mus[i], check_rings()[ri], n, m);
  });
  for (auto& p : parts) {
    rep.ok = rep.ok && p.ok;
    for (auto& l : p.lines) rep.lines.push_back(std::move(l));
  }
}

std::string table_at(const HomologyTable& t, int h, int q) {
  auto g = t.at(h, q);
  std::ostringstream os;
  os << "rank " << g.free;
  for (auto x : g.torsion) os << " +Z/" << x;
  return os.str();
}

// Top summand C(p)[h]{q} of L_n over Z(p), with the free ranks it implies.
void top_summand(VerifyReport& rep, int n, long p, int h, int q) {
  Ring ring = Ring::localized(p);
  Cache cache = Cache::from_env();
  ClosurePlan plan = with_basepoints(plan_for(make_Ln(n)), {0, 1});
  FreeComplex c = link_complex(plan, ring, &cache);
  rmod::ReduceStats st;
  FreeComplex red = reduce_equivariant(c, &st);
  std::ostringstream head;
  head << "L" << n << " over " << ring.name() << ": " << c.total_rank() << " generators in degrees " << c.hmin << ".." << c.hmax()
       << ", " << st.cancelled << " further equivariant cancellations";
  rep.lines.push_back(head.str());
  std::string target = P("C", p, h, q);
  auto m = match_summand(red, parse_presentation(target), Window::Top);
  rep.check(m.ok, "top summand " + target + ": " + m.detail);
  if (m.ok)
    for (std::size_t w = 0; w < m.witness.size(); ++w) rep.lines.push_back("     witness h=" + std::to_string(m.hmin + static_cast<int>(w)) + " " + m.witness[w].str());
  HomologyTable t = bigraded_homology(red);
  for (int dh = 0; dh <= 1; ++dh) {
    int hh = h + dh;
    int qa = q - 3 + 4 * dh, qb = q - 1 + 4 * dh;
    bool good = t.at(hh, qa) == HomologyGroup{1, {}} && t.at(hh, qb) == HomologyGroup{1, {}};
    int total = 0;
    for (const auto& [hq, g] : t.groups)
      if (hq.first == hh) total += g.free + static_cast<int>(g.torsion.size());
    rep.check(good && total == 2, "H^" + std::to_string(hh) + " = free of rank 2 at q in {" + std::to_string(qa) + "," + std::to_string(qb) + "} (" +
                                      table_at(t, hh, qa) + "; " + table_at(t, hh, qb) + ")");
  }
}

}  // namespace

std::vector<std::string> verify_ids() {
  return {"tensorR", "tensorC", "tensorCD", "removeE", "asymmetry", "mainlemma", "beginner", "extraD", "M5", "M7"};
}

VerifyReport verify(const std::string& id, int range, int jobs) {
  VerifyReport rep;
  if (id == "tensorR") {
    for (const Ring& r : check_rings()) {
      FreeComplex t = tensor_over_R(X("RR", r), X("RR", r));
      rep.check(t.blocks.size() == 1 && t.blocks[0] == std::vector<int>{4, 4}, r.name() + ": two free bimodule generators");
      rep.check(t.q[0].size() == 8 && t.q[0][0] == 3 && t.q[0][4] == 1, r.name() + ": generators in q-degrees 3 and 1");
      auto m = match_complex(t, direct_sum(X("RR{1}", r), X("RR{-1}", r)), Window::Top);
      rep.check(m.ok, r.name() + ": isomorphic to RR{1} + RR{-1} (" + m.detail + ")");
    }
  } else if (id == "tensorC") {
    over_pairs(rep, range, jobs, [](VerifyReport& part, std::mutex& mu, const Ring& r, int n, int m) {
      FreeComplex lhs = tensor_over_R(X(P("C", n), r), X(P("C", m), r));
      FreeComplex rhs = direct_sum(X(P("C", n * m, 0, -2), r), X(P("C", n * m, 1, 2), r));
      std::string label = r.name() + " C(" + std::to_string(n) + ") x C(" + std::to_string(m) + ")";
      compare(part, mu, label, lhs, rhs);
      if (n * m != 0) {
        // The Koszul sign on the first differential fixes the sign of nm.
        FreeComplex flipped = direct_sum(X(P("C", -n * m, 0, -2), r), X(P("C", n * m, 1, 2), r));
        bool iso = match_complex(reduce_equivariant(lhs), flipped, Window::Top).ok;
        std::lock_guard<std::mutex> lock(mu);
        part.check(!iso, label + ": not isomorphic to the form with C(" + std::to_string(-n * m) + "){-2}");
      }
    });
  } else if (id == "tensorCD") {
    over_pairs(rep, range, jobs, [](VerifyReport& part, std::mutex& mu, const Ring& r, int n, int m) {
      FreeComplex lhs = tensor_over_R(X(P("C", n), r), X(P("D", m), r));
      FreeComplex rhs = direct_sum(X(P("D", n * m, 0, -2), r), X(P("D", n * m, 1, 2), r));
      compare(part, mu, r.name() + " C(" + std::to_string(n) + ") x D(" + std::to_string(m) + ")", lhs, rhs);
    });
  } else if (id == "removeE") {
    over_pairs(rep, range, jobs, [](VerifyReport& part, std::mutex& mu, const Ring& r, int n, int m) {
      if (n != 0) return;
      FreeComplex lhs = tensor_over_R(X(P("C", m), r), X("E", r));
      FreeComplex rhs = X(P("C", -m, 0, -1), r);
      bool same = bigraded_homology(lhs) == bigraded_homology(rhs);
      FreeComplex red = rmod::remove_E(lhs);
      auto mr = match_complex(red, rhs, Window::Top);
      std::lock_guard<std::mutex> lock(mu);
      std::string label = r.name() + " C(" + std::to_string(m) + ") x E";
      part.check(same, label + ": homology");
      part.check(mr.ok, label + ": two cancellations leave C(" + std::to_string(-m) + "){-1} (" + mr.detail + ")");
    });
  } else if (id == "asymmetry") {
    for (const Ring& r : check_rings()) {
      HomologyTable t = bigraded_homology(tensor_over_R(X("Dt(2)", r), X("C(3)", r)));
      bool three = false;
      for (const auto& [hq, g] : t.groups)
        for (auto x : g.torsion) three = three || x % 3 == 0;
      rep.check(!three, r.name() + ": Dt(2) x C(3) has no 3-torsion");
    }
    Cache cache = Cache::from_env();
    HomologyTable t = bigraded_homology(link_complex(compile(parse_link_expression("T(2,3) #[0,0] L3")), Ring::integers(), &cache));
    bool three = false;
    for (const auto& [hq, g] : t.groups)
      for (auto x : g.torsion) three = three || x % 3 == 0;
    rep.check(!three, "T(2,3) joined to the T(3,4) component of L3 has no 3-torsion");
  } else if (id == "mainlemma") {
    top_summand(rep, 3, 3, 8, 25);
    // The integral complex needs 2 inverted before the top summand splits off.
    Cache cache = Cache::from_env();
    ClosurePlan plan = with_basepoints(plan_for(make_Ln(3)), {0, 1});
    FreeComplex z = link_complex(plan, Ring::integers(), &cache);
    auto mz = match_summand(reduce_equivariant(z), parse_presentation("C(3)[8]{25}"), Window::Top);
    rep.lines.push_back("info over Z: " + std::string(mz.ok ? "summand found" : "no summand (" + mz.detail + ")"));
    rmod::ReduceStats st;
    FreeComplex local = reduce_equivariant(z.with_ring(Ring::localized(3)), &st);
    for (const auto& l : st.log) rep.lines.push_back("     " + l);
    auto ml = match_summand(local, parse_presentation("C(3)[8]{25}"), Window::Top);
    rep.check(st.cancelled > 0 && ml.ok, "integral endgame localized at 3: " + std::to_string(st.cancelled) + " cancellations, then C(3)[8]{25} (" + ml.detail + ")");
  } else if (id == "beginner") {
    Cache cache = Cache::from_env();
    for (int n = 2; n <= range; ++n) {
      ClosurePlan plan = with_basepoints(plan_for(make_Ln(n)), {0, 1});
      FreeComplex red = reduce_equivariant(link_complex(plan, Ring::integers(), &cache));
      std::string target = P("E", 0, 0, n * (n + 1));
      auto m = match_summand(red, parse_presentation(target), Window::Bottom);
      rep.check(m.ok, "L" + std::to_string(n) + " over Z: bottom summand " + target + " (" + m.detail + ")");
    }
  } else if (id == "extraD") {
    // Reports only: low-degree homology where a D(2) summand would show up as 2-torsion.
    Cache cache = Cache::from_env();
    for (int n = 2; n <= range; ++n) {
      HomologyTable t = bigraded_homology(link_complex(plan_for(make_Ln(n)), Ring::integers(), &cache));
      std::ostringstream os;
      os << "info L" << n << " degrees 2-3:";
      for (const auto& [hq, g] : t.groups) {
        if (hq.first < 2 || hq.first > 3) continue;
        os << " (" << hq.first << "," << hq.second << ") rank " << g.free;
        for (auto x : g.torsion) os << " +Z/" << x;
        os << ";";
      }
      rep.lines.push_back(os.str());
    }
  } else if (id == "M5") {
    top_summand(rep, 5, 5, 18, 55);
  } else if (id == "M7") {
    top_summand(rep, 7, 7, 32, 97);
  } else {
    throw std::invalid_argument("unknown verification id '" + id + "'");
  }
  return rep;
}

}  // namespace kht::cli
