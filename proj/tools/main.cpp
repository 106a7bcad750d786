#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kht/cli.hpp"

using namespace kht;

namespace {

std::vector<int> parse_basepoints(const std::string& spec) {
  std::vector<int> out;
  if (spec.empty()) return out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = std::stoi(item, &used);
    if (used != item.size() || v < 0) throw std::invalid_argument("bad basepoint spec '" + spec + "'");
    out.push_back(v);
  }
  if (out.size() > 2) throw std::invalid_argument("at most two basepoints");
  return out;
}

std::string predictions(const std::vector<TorsionPrediction>& ps, cli::Format f) {
  std::ostringstream os;
  if (f == cli::Format::Json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : ps)
      arr.push_back({{"p", p.p}, {"k", p.k}, {"l", p.l}, {"m", p.m}, {"h", p.h}, {"q", p.q}, {"order", p.order}, {"multiplicity", p.multiplicity}});
    os << arr.dump() << "\n";
  } else if (f == cli::Format::Csv) {
    os << "p,k,l,m,h,q,order,multiplicity\n";
    for (const auto& p : ps) os << p.p << "," << p.k << "," << p.l << "," << p.m << "," << p.h << "," << p.q << "," << p.order << "," << p.multiplicity << "\n";
  } else {
    for (const auto& p : ps)
      os << "k=" << p.k << " l=" << p.l << " m=" << p.m << ": at least " << p.multiplicity << " x Z/" << p.order << " at (" << p.h << "," << p.q << ")\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Khovanov cohomology with torsion via dotted cobordism scanning"};
  app.require_subcommand(1);

  std::string expression, ring_text = "Z", basepoints, dump_dir;
  bool tensor_sums = false, oracle = false, json = false, csv = false, no_cache = false;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--ring", ring_text, "Z, Q or Zp:<p>");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--json", json, "JSON output");
    sub->add_flag("--csv", csv, "CSV output");
    sub->add_flag("--no-cache", no_cache, "bypass the complex cache");
  };

  auto* compute = app.add_subcommand("compute", "bigraded homology of a link or presentation expression");
  compute->add_option("expression", expression, "e.g. \"T(2,3)\", \"L3 # T(2,3)\", \"C(3)[8]{25} (x) D(2)\"")->required();
  add_common(compute);
  compute->add_option("--basepoints", basepoints, "component ids, e.g. 0,1");
  compute->add_flag("--tensor-sums", tensor_sums, "combine connected-sum factors by tensor product over R");
  compute->add_flag("--oracle", oracle, "cross-check against the cube of resolutions");
  compute->add_option("--dump-stages", dump_dir, "write per-crossing complexes to this directory");

  std::string verify_id;
  int range = 5;
  auto* verify = app.add_subcommand("verify", "run a structural check");
  verify->add_option("id", verify_id, "one of: " + [] {
    std::string s;
    for (const auto& id : cli::verify_ids()) s += (s.empty() ? "" : ", ") + id;
    return s;
  }())->required();
  verify->add_option("--range", range, "parameter bound")->check(CLI::NonNegativeNumber);
  verify->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  int k = 1, p = 3;
  std::optional<int> l, m;
  auto* predict = app.add_subcommand("predict", "predicted p-torsion bidegrees");
  predict->add_option("-k,--k", k, "number of L3 summands")->required();
  predict->add_option("-l,--l", l);
  predict->add_option("-m,--m", m);
  predict->add_option("-p,--p", p);
  predict->add_flag("--json", json, "JSON output");
  predict->add_flag("--csv", csv, "CSV output");

  auto* dump = app.add_subcommand("dump-stages", "write per-crossing complexes of a link diagram");
  dump->add_option("expression", expression)->required();
  dump->add_option("dir", dump_dir)->required();
  dump->add_option("--ring", ring_text, "Z, Q or Zp:<p>");
  dump->add_option("--basepoints", basepoints, "component ids, e.g. 0,1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  cli::Format format = json ? cli::Format::Json : csv ? cli::Format::Csv : cli::Format::Text;
  if (json && csv) {
    std::cerr << "error: --json and --csv are exclusive\n";
    return 1;
  }

  try {
    if (*compute) {
      cli::Job job;
      job.expression = expression;
      job.ring = Ring::parse(ring_text);
      job.basepoints = parse_basepoints(basepoints);
      job.format = format;
      job.tensor_sums = tensor_sums;
      job.oracle = oracle;
      job.use_cache = !no_cache;
      job.dump_dir = dump_dir;
      job.jobs = jobs;
      std::cout << cli::format_table(cli::compute(job, &std::cerr), format);
      return 0;
    }
    if (*verify) {
      cli::VerifyReport rep = cli::verify(verify_id, range, jobs);
      for (const auto& line : rep.lines) std::cout << line << "\n";
      std::cout << (rep.ok ? "PASS " : "FAIL ") << verify_id << "\n";
      return rep.ok ? 0 : 2;
    }
    if (*predict) {
      std::vector<TorsionPrediction> ps;
      if (m && !l) throw std::invalid_argument("-m requires -l");
      if (l && m) {
        ps.push_back(predict_torsion(p, k, *l, *m));
      } else if (l) {
        for (int mm = 0; mm <= *l; ++mm) ps.push_back(predict_torsion(p, k, *l, mm));
      } else {
        ps = predict_all(p, k);
      }
      std::cout << predictions(ps, format);
      return 0;
    }
    if (*dump) {
      ClosurePlan plan = compile(parse_link_expression(expression));
      auto bp = parse_basepoints(basepoints);
      if (!bp.empty()) plan = with_basepoints(plan, bp);
      for (const auto& f : cli::dump_stages(plan, Ring::parse(ring_text), dump_dir)) std::cout << f << "\n";
      return 0;
    }
  } catch (const cli::OracleMismatch& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
