#include "kht/cli.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kht/rmod.hpp"

namespace kht::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json matrices_to_json(const std::vector<SparseMatrix>& ms) {
  ordered_json out = ordered_json::array();
  for (const auto& m : ms) {
    ordered_json entries = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c)
      for (const auto& e : m.column(c)) entries.push_back({e.row, c, e.value.str()});
    out.push_back({{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}});
  }
  return out;
}

std::vector<SparseMatrix> matrices_from_json(const json& j) {
  std::vector<SparseMatrix> out;
  for (const auto& m : j) {
    SparseMatrix s(m.at("rows").get<int>(), m.at("cols").get<int>());
    for (const auto& e : m.at("entries")) {
      int r = e.at(0).get<int>(), c = e.at(1).get<int>();
      if (r < 0 || r >= s.rows() || c < 0 || c >= s.cols()) throw std::runtime_error("matrix entry out of range");
      s.set(r, c, Scalar::parse(e.at(2).get<std::string>()));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::string complex_to_json(const FreeComplex& c) {
  ordered_json j;
  j["format"] = "kht-free-complex";
  j["version"] = 1;
  j["ring"] = c.ring.name();
  j["hmin"] = c.hmin;
  j["q"] = c.q;
  j["blocks"] = c.blocks;
  j["d"] = matrices_to_json(c.d);
  j["left"] = c.left ? matrices_to_json(*c.left) : ordered_json(nullptr);
  j["right"] = c.right ? matrices_to_json(*c.right) : ordered_json(nullptr);
  return j.dump();
}

FreeComplex complex_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.at("format") != "kht-free-complex" || j.at("version") != 1) throw std::runtime_error("unknown complex format");
    FreeComplex c;
    c.ring = Ring::parse(j.at("ring").get<std::string>());
    c.hmin = j.at("hmin").get<int>();
    c.q = j.at("q").get<std::vector<std::vector<int>>>();
    c.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
    c.d = matrices_from_json(j.at("d"));
    if (!j.at("left").is_null()) c.left = matrices_from_json(j.at("left"));
    if (!j.at("right").is_null()) c.right = matrices_from_json(j.at("right"));
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed complex: ") + e.what());
  } catch (const std::logic_error& e) {
    throw std::runtime_error(std::string("invalid complex: ") + e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

Cache::Cache(std::filesystem::path dir, std::string version) : dir_(std::move(dir)), version_(std::move(version)) {}

Cache Cache::from_env() {
  if (const char* p = std::getenv("KH_CACHE"); p && *p) return Cache(p);
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p) return Cache(std::filesystem::path(p) / "khtorsion");
  if (const char* p = std::getenv("HOME"); p && *p) return Cache(std::filesystem::path(p) / ".cache" / "khtorsion");
  return Cache(std::filesystem::temp_directory_path() / "khtorsion");
}

std::string Cache::key(const ClosurePlan& plan, const Ring& ring) const {
  std::ostringstream os;
  os << version_ << "\n" << plan.word.strands << ":" << plan.word.str() << "\n" << ring.name() << "\n";
  for (const auto& b : plan.basepoints) os << b.column << ",";
  return sha256_hex(os.str());
}

std::optional<FreeComplex> Cache::get(const std::string& key, std::ostream* log) const {
  auto path = dir_ / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    json j = json::parse(ss.str());
    if (j.at("engine") != version_) return std::nullopt;
    return complex_from_json(j.at("complex").get<std::string>());
  } catch (const std::exception& e) {
    if (log) *log << "cache: ignoring corrupt entry " << path.string() << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

void Cache::put(const std::string& key, const FreeComplex& c) const {
  std::filesystem::create_directories(dir_);
  ordered_json j;
  j["engine"] = version_;
  j["complex"] = complex_to_json(c);
  std::random_device rd;
  auto tmp = dir_ / (key + ".tmp." + std::to_string(rd()));
  {
    std::ofstream out(tmp);
    out << j.dump();
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / (key + ".json"));
}

FreeComplex link_complex(const ClosurePlan& plan, const Ring& ring, const Cache* cache, const scan::ScanOptions& opt) {
  std::string key;
  if (cache) {
    key = cache->key(plan, ring);
    if (auto hit = cache->get(key)) return *hit;
  }
  FreeComplex c = scan::khovanov_complex(plan, ring, opt);
  if (cache) cache->put(key, c);
  return c;
}

bool is_presentation(const std::string& expression) {
  std::size_t i = expression.find_first_not_of(" \t");
  if (i == std::string::npos) return false;
  for (const char* name : {"C(", "D(", "Dt(", "E", "Runit", "RR"})
    if (expression.compare(i, std::string(name).size(), name) == 0) return true;
  return false;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(jobs, n); ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<FreeComplex> factor_complexes(const LinkExpression& expr, const Ring& ring, const Cache* cache, int jobs) {
  const int n = static_cast<int>(expr.factors.size());
  std::vector<FreeComplex> out(n);
  parallel_for(n, jobs, [&](int f) {
    ClosurePlan plan = plan_for(expr.factors[f]);
    std::vector<int> comps;
    bool has_left = f > 0, has_right = f + 1 < n;
    if (has_left) comps.push_back(expr.joins[f - 1].second < 0 ? 0 : expr.joins[f - 1].second);
    if (has_right) comps.push_back(expr.joins[f].first < 0 ? plan.num_components - 1 : expr.joins[f].first);
    plan = with_basepoints(plan, comps);
    FreeComplex c = link_complex(plan, ring, cache);
    if (has_right && !has_left) {
      c.right = std::move(c.left);
      c.left.reset();
    }
    out[f] = std::move(c);
  });
  return out;
}

FreeComplex tensor_sum_complex(const LinkExpression& expr, const Ring& ring, const Cache* cache, int jobs) {
  auto parts = factor_complexes(expr, ring, cache, jobs);
  FreeComplex acc = parts[0];
  for (std::size_t f = 1; f < parts.size(); ++f) {
    acc = rmod::tensor_over_R(acc, parts[f]);
    if (f + 1 < parts.size()) acc = rmod::reduce_equivariant(acc);
  }
  return acc;
}

std::string format_table(const HomologyTable& t, Format f) {
  switch (f) {
    case Format::Json: return t.to_json() + "\n";
    case Format::Csv: return t.to_csv();
    case Format::Text: break;
  }
  return t.to_text();
}

std::vector<std::string> dump_stages(const ClosurePlan& plan, const Ring& ring, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  scan::ScanOptions opt;
  opt.on_step = [&](int step, const scan::CobComplex& c) {
    std::ostringstream name;
    name << "stage_" << std::setw(3) << std::setfill('0') << step << ".txt";
    std::ofstream out(dir / name.str());
    out << "# word " << plan.word.strands << ": " << plan.word.str() << "\n# after crossing " << step << "\n" << c.dump();
    names.push_back(name.str());
  };
  FreeComplex closed = close_with_basepoints(scan::scan_diagram(plan, ring, opt));
  std::ofstream out(dir / "closed.json");
  out << complex_to_json(closed) << "\n";
  names.push_back("closed.json");
  return names;
}

HomologyTable compute(const Job& job, std::ostream* log) {
  std::optional<Cache> cache;
  if (job.use_cache) cache = Cache::from_env();
  const Cache* cp = cache ? &*cache : nullptr;
  if (is_presentation(job.expression)) {
    if (job.tensor_sums || job.oracle || !job.dump_dir.empty() || !job.basepoints.empty())
      throw std::invalid_argument("link options do not apply to presentation expressions");
    return bigraded_homology(rmod::evaluate(job.expression, job.ring));
  }
  LinkExpression expr = parse_link_expression(job.expression);
  ClosurePlan plan = compile(expr);
  if (!job.basepoints.empty()) plan = with_basepoints(plan, job.basepoints);
  if (!job.dump_dir.empty()) {
    auto files = dump_stages(plan, job.ring, job.dump_dir);
    if (log) *log << "wrote " << files.size() << " stage files to " << job.dump_dir << "\n";
  }
  FreeComplex c;
  if (job.tensor_sums && expr.factors.size() > 1) {
    c = tensor_sum_complex(expr, job.ring, cp, job.jobs);
  } else {
    c = link_complex(plan, job.ring, cp);
  }
  HomologyTable t = bigraded_homology(c);
  if (job.oracle) {
    HomologyTable o = bigraded_homology(scan::cube_complex(plan, job.ring));
    if (o != t) throw OracleMismatch("cube oracle disagrees:\n" + o.to_text());
    if (log) *log << "cube oracle agrees\n";
  }
  return t;
}

}  // namespace kht::cli
