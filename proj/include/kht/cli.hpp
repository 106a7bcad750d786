#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "kht/braid.hpp"
#include "kht/free_complex.hpp"
#include "kht/homology.hpp"
#include "kht/scan.hpp"

namespace kht::cli {

inline constexpr const char* kEngineVersion = "kht-engine-1";

std::string complex_to_json(const FreeComplex& c);
// Throws std::runtime_error on malformed input.
FreeComplex complex_from_json(const std::string& text);

// Content-addressed store of closed complexes. Writers go through a temporary
// file and a rename, so concurrent processes never see partial entries.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir, std::string version = kEngineVersion);
  // KH_CACHE, else $XDG_CACHE_HOME/khtorsion, else ~/.cache/khtorsion.
  static Cache from_env();

  const std::filesystem::path& dir() const { return dir_; }
  std::string key(const ClosurePlan& plan, const Ring& ring) const;
  std::optional<FreeComplex> get(const std::string& key, std::ostream* log = nullptr) const;
  void put(const std::string& key, const FreeComplex& c) const;

 private:
  std::filesystem::path dir_;
  std::string version_;
};

std::string sha256_hex(const std::string& data);

// Closed complex of a planned diagram, through the cache when given.
FreeComplex link_complex(const ClosurePlan& plan, const Ring& ring, const Cache* cache = nullptr, const scan::ScanOptions& opt = {});

enum class Format { Text, Json, Csv };

struct Job {
  std::string expression;
  Ring ring = Ring::integers();
  std::vector<int> basepoints;  // component ids, at most two
  Format format = Format::Text;
  bool tensor_sums = false;
  bool oracle = false;
  bool use_cache = true;
  std::string dump_dir;
  int jobs = 1;
};

bool is_presentation(const std::string& expression);

struct OracleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-factor closed complexes for the tensor path: factor f carries a left
// action on the component joined to factor f-1 and a right action on the
// component joined to factor f+1.
std::vector<FreeComplex> factor_complexes(const LinkExpression& expr, const Ring& ring, const Cache* cache, int jobs);
FreeComplex tensor_sum_complex(const LinkExpression& expr, const Ring& ring, const Cache* cache, int jobs);

// Runs a job. Throws std::invalid_argument for bad input and OracleMismatch
// when the cube oracle disagrees.
HomologyTable compute(const Job& job, std::ostream* log = nullptr);
std::string format_table(const HomologyTable& t, Format f);

// Writes the reduced complex after every crossing into `dir`; returns the
// file names.
std::vector<std::string> dump_stages(const ClosurePlan& plan, const Ring& ring, const std::filesystem::path& dir);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines;
  void check(bool cond, const std::string& what);
};

// Known ids: tensorR, tensorC, tensorCD, removeE, asymmetry, mainlemma,
// beginner, extraD, M5, M7. `range` bounds the parameters where it applies.
VerifyReport verify(const std::string& id, int range = 5, int jobs = 1);
std::vector<std::string> verify_ids();

// Runs f(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

}  // namespace kht::cli
