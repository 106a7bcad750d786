#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kht/cli.hpp"
#include "kht/rmod.hpp"

using namespace kht;
using namespace kht::cli;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kht-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("complex serialization round-trips") {
  ClosurePlan p = with_basepoints(plan_for(make_Ln(2)), {0, 1});
  FreeComplex c = link_complex(p, Ring::localized(3));
  FreeComplex back = complex_from_json(complex_to_json(c));
  CHECK(back == c);
  CHECK(complex_to_json(back) == complex_to_json(c));
  CHECK_THROWS_AS(complex_from_json("{}"), std::runtime_error);
  CHECK_THROWS_AS(complex_from_json("not json"), std::runtime_error);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cache put, get, version and corruption") {
  auto dir = fresh_dir("cache");
  Cache cache(dir);
  ClosurePlan p = plan_for(torus_braid(2, 3));
  std::string key = cache.key(p, Ring::integers());
  CHECK(key != cache.key(p, Ring::localized(3)));
  CHECK(key != cache.key(with_basepoints(p, {0}), Ring::integers()));
  CHECK_FALSE(cache.get(key));
  FreeComplex c = link_complex(p, Ring::integers(), &cache);
  auto hit = cache.get(key);
  REQUIRE(hit);
  CHECK(*hit == c);

  Cache bumped(dir, "kht-engine-test");
  CHECK(bumped.key(p, Ring::integers()) != key);
  CHECK_FALSE(bumped.get(key));

  { std::ofstream(dir / (key + ".json")) << "{ truncated"; }
  std::ostringstream log;
  CHECK_FALSE(cache.get(key, &log));
  CHECK(log.str().find("corrupt") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("compute jobs") {
  Job job;
  job.use_cache = false;
  job.expression = "T(2,3)";
  job.oracle = true;
  HomologyTable t = compute(job);
  CHECK(t.at(3, 7) == HomologyGroup{0, {2}});
  job.expression = "C(3)[8]{25} (x) D(2)[2]{7}";
  job.oracle = false;
  job.ring = Ring::localized(3);
  CHECK(compute(job).at(11, 30) == HomologyGroup{0, {3}});
  job.tensor_sums = true;
  CHECK_THROWS_AS(compute(job), std::invalid_argument);
  job = Job{};
  job.use_cache = false;
  job.expression = "L3";
  job.oracle = true;
  CHECK_THROWS_AS(compute(job), std::invalid_argument);
}

TEST_CASE("tensor path matches the flat scan") {
  for (const char* e : {"T(2,3) # T(2,3)", "L2 # T(2,3)", "L3 # L3 # T(2,3)", "T(2,3) # B[2: -1 -1 -1] # T(2,3)"}) {
    CAPTURE(e);
    Job job;
    job.use_cache = false;
    job.expression = e;
    HomologyTable flat = compute(job);
    job.tensor_sums = true;
    CHECK(compute(job) == flat);
  }
}

TEST_CASE("json output is byte-stable") {
  Job job;
  job.use_cache = false;
  job.expression = "T(3,4)";
  std::string a = format_table(compute(job), Format::Json);
  std::string b = format_table(compute(job), Format::Json);
  CHECK(a == b);
  CHECK(HomologyTable::from_json(a) == compute(job));
}

TEST_CASE("stage dumps are written per crossing") {
  auto dir = fresh_dir("stages");
  auto files = dump_stages(plan_for(torus_braid(2, 3)), Ring::integers(), dir);
  CHECK(files.size() == 4);
  CHECK(std::filesystem::exists(dir / "stage_001.txt"));
  std::ifstream in(dir / "closed.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK_NOTHROW(complex_from_json(ss.str()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](int i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(10, 3, [](int i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
}

TEST_CASE("verify rejects unknown ids") {
  CHECK_THROWS_AS(verify("nope"), std::invalid_argument);
  CHECK(verify("tensorR").ok);
}
