#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "permgraph/asymptotics.hpp"
#include "permgraph/counting.hpp"
#include "permgraph/stats.hpp"

namespace permgraph {

// Pass thresholds for the Monte Carlo checks.
inline constexpr double kMeanStdErrors = 3.0;
inline constexpr double kPoissonTvTolerance = 0.1;
inline constexpr double kBlockKsTolerance = 0.08;
inline constexpr double kFirstLastMinPValue = 1e-3;
inline constexpr double kMarkedAgreementMin = 0.9;
inline constexpr double kClosePairMax = 0.1;
inline constexpr double kBlockCensusMaxMu = -2.0;
inline constexpr int kMonotonicityMaxN = 9;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CensusMode { components, blocks, monotonicity, marked };

std::string to_string(CensusMode mode);
CensusMode parse_mode(const std::string& text);  // throws ConfigError

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  CensusMode mode = CensusMode::components;
  std::int64_t n = 0;
  std::vector<double> mu_list;
  std::vector<std::int64_t> m_list;  // used when mu_list is empty
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int parallelism = 1;
  std::string out_dir;  // empty: no files written
  bool write_csv = false;
  int n_max = 8;  // monotonicity mode

  // Throws ConfigError on a malformed or out-of-range config.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct BudgetPoint {
  std::optional<double> mu;
  std::int64_t m = 0;
  ThresholdParams params;
  double implied_mu = 0;  // mu whose alpha formula gives m / n
};

std::vector<BudgetPoint> budget_points(const ExperimentConfig& cfg);

struct ComponentEntry {
  BudgetPoint point;
  std::vector<std::int64_t> extra_blocks;  // per trial: blocks - 1
  std::vector<std::int64_t> histogram;     // of extra_blocks
  Moments stats;
  double tv = 0;
  bool mean_ok = false;
  bool tv_ok = false;
  bool passed = false;
};

struct BlockEntry {
  BudgetPoint point;
  std::vector<std::int64_t> smallest, largest, first, last;
  std::vector<double> u;  // smallest * n * h^2
  std::vector<double> v;  // h * largest - log(n h)
  Moments u_stats, v_stats;
  KsResult ks_u, ks_v, first_vs_last;
  bool structure_ok = true;
  bool passed = false;
};

struct MarkedEntry {
  BudgetPoint point;
  std::int64_t nu = 0;
  std::int64_t trials = 0;
  std::int64_t agreements = 0;
  std::int64_t close_pairs = 0;
  std::int64_t containment_failures = 0;
  std::vector<char> agree;       // per trial
  std::vector<char> close_pair;  // per trial
  double agreement_frequency = 0;
  double close_pair_frequency = 0;
  bool passed = false;
};

struct MonotonicityRow {
  int n = 0;
  std::vector<Rational> indecomposable;          // p(n, m), m = 0..C(n,2)
  std::vector<std::vector<BigInt>> block_counts;  // [m][c] permutations with c blocks
  BigInt indecomposable_total;
  BigInt recurrence_total;  // from n! - f(n) = sum (n-i)! f(i)
  bool monotone = false;
  bool dominated = false;
  bool totals_match = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ComponentEntry> components;
  std::vector<BlockEntry> blocks;
  std::vector<MarkedEntry> marked;
  std::vector<MonotonicityRow> monotonicity;
  double wall_seconds = 0;

  bool passed() const;
  nlohmann::json to_json() const;
  // Per-trial rows; empty for monotonicity.
  std::string to_csv() const;
};

ExperimentReport run_component_census(const ExperimentConfig& cfg);
ExperimentReport run_block_census(const ExperimentConfig& cfg);
ExperimentReport run_marked_vs_decomposition(const ExperimentConfig& cfg);
ExperimentReport run_monotonicity_check(int n_max);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes report.json (and trials.csv when requested) into cfg.out_dir.
void write_report(const ExperimentReport& report);

// Number of indecomposable permutations of [n], from n! = sum_{i<=n} f(i) (n-i)!.
BigInt indecomposable_count(int n);

}  // namespace permgraph
