#include "permgraph/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "permgraph/permutation.hpp"
#include "permgraph/random.hpp"
#include "permgraph/sampler.hpp"

namespace permgraph {

namespace {

template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Stream id of trial i for the k-th budget of a run.
std::uint64_t stream_of(std::size_t entry, std::int64_t trial) {
  return (static_cast<std::uint64_t>(entry) << 40) | static_cast<std::uint64_t>(trial);
}

double mu_offset(std::int64_t n) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double ln = std::log(static_cast<double>(n));
  return ln + 0.5 * std::log(ln) + 0.5 * std::log(12 / std::numbers::pi) - pi2 / 12;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

nlohmann::json params_json(const BudgetPoint& p) {
  nlohmann::json j;
  if (p.mu) j["mu"] = *p.mu;
  j["implied_mu"] = p.implied_mu;
  j["m"] = p.m;
  j["regime"] = to_string(p.params.regime);
  j["alpha"] = p.params.alpha;
  j["q"] = p.params.q;
  j["nu"] = p.params.nu;
  j["h"] = p.params.h;
  j["lambda"] = p.params.lambda;
  return j;
}

nlohmann::json moments_json(const Moments& m) {
  return {{"mean", m.mean}, {"variance", m.variance}, {"std_error", m.std_error}};
}

nlohmann::json ks_json(const KsResult& r) { return {{"statistic", r.statistic}, {"p_value", r.p_value}}; }

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::string to_string(CensusMode mode) {
  switch (mode) {
    case CensusMode::components: return "components";
    case CensusMode::blocks: return "blocks";
    case CensusMode::monotonicity: return "monotonicity";
    case CensusMode::marked: return "marked";
  }
  return "unknown";
}

CensusMode parse_mode(const std::string& text) {
  if (text == "components") return CensusMode::components;
  if (text == "blocks") return CensusMode::blocks;
  if (text == "monotonicity") return CensusMode::monotonicity;
  if (text == "marked" || text == "marked-vs-decomp") return CensusMode::marked;
  throw ConfigError("unknown mode '" + text + "' (expected components, blocks, monotonicity or marked)");
}

void ExperimentConfig::validate() const {
  if (mode == CensusMode::monotonicity) {
    if (n_max < 1 || n_max > kMonotonicityMaxN)
      throw ConfigError("n_max must lie in [1, " + std::to_string(kMonotonicityMaxN) + "]");
    return;
  }
  if (n < 3) throw ConfigError("n must be at least 3");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (trials >= (std::int64_t{1} << 40)) throw ConfigError("too many trials");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (mu_list.empty() && m_list.empty()) throw ConfigError("one of mu_list or m_list is required");
  for (double mu : mu_list)
    if (!std::isfinite(mu)) throw ConfigError("mu values must be finite");
  for (auto m : m_list)
    if (m < 0 || m > max_inversions(n)) throw ConfigError("m outside [0, C(n,2)]: " + std::to_string(m));
  if (write_csv && out_dir.empty()) throw ConfigError("csv output requested without an output directory");
  const auto points = budget_points(*this);
  for (const auto& p : points) {
    if (mode == CensusMode::blocks) {
      if (p.params.regime != Regime::nontrivial || p.implied_mu > kBlockCensusMaxMu + 1e-9)
        throw ConfigError("block census needs mu <= " + std::to_string(kBlockCensusMaxMu) +
                          " (many blocks); m=" + std::to_string(p.m) + " gives mu=" + std::to_string(p.implied_mu));
    }
    if (mode == CensusMode::marked) {
      if (p.params.regime != Regime::nontrivial) throw ConfigError("marked census needs a nontrivial budget");
      if (n - 3 * p.params.nu < 1)
        throw ConfigError("marked census: n=" + std::to_string(n) + " too small for nu=" + std::to_string(p.params.nu));
    }
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const int version = j.value("schema_version", ExperimentConfig::kSchemaVersion);
    if (version != ExperimentConfig::kSchemaVersion)
      throw ConfigError("unsupported schema_version " + std::to_string(version));
    if (!j.contains("mode")) throw ConfigError("missing field 'mode'");
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    cfg.n = j.value("n", std::int64_t{0});
    if (j.contains("mu_list")) cfg.mu_list = j.at("mu_list").get<std::vector<double>>();
    if (j.contains("m_list")) cfg.m_list = j.at("m_list").get<std::vector<std::int64_t>>();
    cfg.trials = j.value("trials", std::int64_t{0});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.parallelism = j.value("parallelism", 1);
    cfg.n_max = j.value("n_max", 8);
    if (j.contains("outputs")) {
      const auto& out = j.at("outputs");
      cfg.out_dir = out.value("dir", std::string{});
      cfg.write_csv = out.value("csv", false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = ExperimentConfig::kSchemaVersion;
  j["mode"] = to_string(cfg.mode);
  if (cfg.mode == CensusMode::monotonicity) {
    j["n_max"] = cfg.n_max;
  } else {
    j["n"] = cfg.n;
    if (!cfg.mu_list.empty()) j["mu_list"] = cfg.mu_list;
    else j["m_list"] = cfg.m_list;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["parallelism"] = cfg.parallelism;
  }
  j["outputs"] = {{"dir", cfg.out_dir}, {"csv", cfg.write_csv}};
  return j;
}

std::vector<BudgetPoint> budget_points(const ExperimentConfig& cfg) {
  std::vector<BudgetPoint> out;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  auto finish = [&](BudgetPoint p) {
    p.params = threshold_params(cfg.n, p.m);
    p.implied_mu = p.params.alpha * pi2 / 6 - mu_offset(cfg.n);
    out.push_back(p);
  };
  if (!cfg.mu_list.empty()) {
    for (double mu : cfg.mu_list) {
      BudgetPoint p;
      p.mu = mu;
      p.m = alpha_for_mu(cfg.n, mu).m;
      finish(p);
    }
  } else {
    for (auto m : cfg.m_list) {
      BudgetPoint p;
      p.m = m;
      finish(p);
    }
  }
  return out;
}

ExperimentReport run_component_census(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  const auto points = budget_points(cfg);
  for (std::size_t e = 0; e < points.size(); ++e) {
    ComponentEntry entry;
    entry.point = points[e];
    const InversionSampler sampler(static_cast<int>(cfg.n), entry.point.m);
    entry.extra_blocks.assign(cfg.trials, 0);
    parallel_for(cfg.trials, cfg.parallelism, [&](std::int64_t i) {
      Rng rng(cfg.seed, stream_of(e, i));
      entry.extra_blocks[i] = blocks(sampler.sample(rng)).count() - 1;
    });
    const auto top = *std::max_element(entry.extra_blocks.begin(), entry.extra_blocks.end());
    entry.histogram.assign(top + 1, 0);
    for (auto c : entry.extra_blocks) ++entry.histogram[c];
    entry.stats = moments(as_double(entry.extra_blocks));
    const auto& params = entry.point.params;
    switch (params.regime) {
      case Regime::always_decomposable:
        entry.mean_ok = entry.tv_ok = entry.histogram[0] == 0;
        break;
      case Regime::always_indecomposable:
        entry.mean_ok = entry.tv_ok = entry.histogram[0] == cfg.trials;
        break;
      case Regime::nontrivial:
        entry.tv = tv_distance_poisson(entry.histogram, params.lambda);
        entry.mean_ok = std::abs(entry.stats.mean - params.lambda) <= kMeanStdErrors * entry.stats.std_error;
        entry.tv_ok = entry.tv <= kPoissonTvTolerance;
        break;
    }
    entry.passed = entry.mean_ok && entry.tv_ok;
    report.components.push_back(std::move(entry));
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_block_census(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  const auto points = budget_points(cfg);
  for (std::size_t e = 0; e < points.size(); ++e) {
    BlockEntry entry;
    entry.point = points[e];
    const InversionSampler sampler(static_cast<int>(cfg.n), entry.point.m);
    const auto trials = static_cast<std::size_t>(cfg.trials);
    entry.smallest.assign(trials, 0);
    entry.largest.assign(trials, 0);
    entry.first.assign(trials, 0);
    entry.last.assign(trials, 0);
    std::vector<char> ok(trials, 0);
    parallel_for(cfg.trials, cfg.parallelism, [&](std::int64_t i) {
      Rng rng(cfg.seed, stream_of(e, i));
      const auto b = blocks(sampler.sample(rng));
      entry.smallest[i] = b.smallest();
      entry.largest[i] = b.largest();
      entry.first[i] = b.first();
      entry.last[i] = b.last();
      std::int64_t sum = 0;
      for (int s : b.sizes) sum += s;
      ok[i] = b.smallest() >= 1 && sum == cfg.n;
    });
    entry.structure_ok = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
    const double n = static_cast<double>(cfg.n);
    const double h = entry.point.params.h;
    for (std::size_t i = 0; i < trials; ++i) {
      entry.u.push_back(static_cast<double>(entry.smallest[i]) * n * h * h);
      entry.v.push_back(h * static_cast<double>(entry.largest[i]) - std::log(n * h));
    }
    entry.u_stats = moments(entry.u);
    entry.v_stats = moments(entry.v);
    entry.ks_u = ks_one_sample(entry.u, exponential_cdf);
    entry.ks_v = ks_one_sample(entry.v, gumbel_cdf);
    entry.first_vs_last = ks_two_sample(as_double(entry.first), as_double(entry.last));
    entry.passed = entry.structure_ok && entry.ks_u.statistic <= kBlockKsTolerance &&
                   entry.ks_v.statistic <= kBlockKsTolerance && entry.first_vs_last.p_value > kFirstLastMinPValue;
    report.blocks.push_back(std::move(entry));
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_marked_vs_decomposition(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  const auto points = budget_points(cfg);
  for (std::size_t e = 0; e < points.size(); ++e) {
    MarkedEntry entry;
    entry.point = points[e];
    entry.nu = entry.point.params.nu;
    entry.trials = cfg.trials;
    const InversionSampler sampler(static_cast<int>(cfg.n), entry.point.m);
    const std::int64_t nu = entry.nu;
    const std::int64_t len = cfg.n - nu;
    entry.agree.assign(cfg.trials, 0);
    entry.close_pair.assign(cfg.trials, 0);
    std::vector<char> contained(cfg.trials, 0);
    parallel_for(cfg.trials, cfg.parallelism, [&](std::int64_t i) {
      Rng rng(cfg.seed, stream_of(e, i));
      // The first nu coordinates of a uniform sequence fix the total a; the
      // remaining coordinates are replaced by a uniform composition of m - a.
      const auto x = sampler.sample(rng);
      std::int64_t a = 0;
      for (std::int64_t k = 1; k <= nu; ++k) a += x.at(static_cast<int>(k));
      const auto y = sample_composition(len, entry.point.m - a, rng);
      const auto marked = marked_points(y, nu);
      std::vector<int> y_int(y.begin(), y.end());
      std::vector<std::int64_t> decomp;
      for (int p : decomposition_points(y_int))
        if (p <= len - 2 * nu) decomp.push_back(p);
      entry.agree[i] = marked == decomp;
      contained[i] = std::includes(marked.begin(), marked.end(), decomp.begin(), decomp.end());
      for (std::size_t k = 1; k < marked.size(); ++k)
        if (marked[k] - marked[k - 1] <= nu) entry.close_pair[i] = 1;
    });
    for (std::int64_t i = 0; i < cfg.trials; ++i) {
      entry.agreements += entry.agree[i];
      entry.close_pairs += entry.close_pair[i];
      entry.containment_failures += contained[i] ? 0 : 1;
    }
    entry.agreement_frequency = static_cast<double>(entry.agreements) / static_cast<double>(cfg.trials);
    entry.close_pair_frequency = static_cast<double>(entry.close_pairs) / static_cast<double>(cfg.trials);
    entry.passed = entry.containment_failures == 0 && entry.agreement_frequency >= kMarkedAgreementMin &&
                   entry.close_pair_frequency <= kClosePairMax;
    report.marked.push_back(std::move(entry));
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

BigInt indecomposable_count(int n) {
  if (n < 1) throw std::invalid_argument("indecomposable_count: n must be at least 1");
  std::vector<BigInt> fact(n + 1, BigInt(1));
  for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  std::vector<BigInt> f(n + 1);
  f[1] = 1;
  for (int k = 2; k <= n; ++k) {
    BigInt sum = 0;
    for (int i = 1; i < k; ++i) sum += fact[k - i] * f[i];
    f[k] = fact[k] - sum;
  }
  return f[n];
}

ExperimentReport run_monotonicity_check(int n_max) {
  ExperimentConfig cfg;
  cfg.mode = CensusMode::monotonicity;
  cfg.n_max = n_max;
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = cfg;
  for (int n = 1; n <= n_max; ++n) {
    MonotonicityRow row;
    row.n = n;
    const std::int64_t top = max_inversions(n);
    std::vector<std::vector<std::int64_t>> counts(top + 1, std::vector<std::int64_t>(n + 1, 0));
    // Odometer over all inversion sequences: coordinate i runs over [0, i-1].
    std::vector<int> x(n, 0);
    std::int64_t total = 0;
    for (;;) {
      const int c = static_cast<int>(decomposition_points(x).size()) + 1;
      ++counts[total][c];
      int i = n - 1;
      while (i >= 0 && x[i] == i) {
        total -= x[i];
        x[i] = 0;
        --i;
      }
      if (i < 0) break;
      ++x[i];
      ++total;
    }
    row.block_counts.resize(top + 1);
    std::vector<BigInt> level(top + 1);
    for (std::int64_t m = 0; m <= top; ++m) {
      for (int c = 0; c <= n; ++c) {
        row.block_counts[m].emplace_back(static_cast<long>(counts[m][c]));
        level[m] += row.block_counts[m].back();
      }
      row.indecomposable.push_back(make_rational(row.block_counts[m][1], level[m]));
      row.indecomposable_total += row.block_counts[m][1];
    }
    row.monotone = true;
    row.dominated = true;
    for (std::int64_t m = 0; m < top; ++m) {
      if (row.indecomposable[m] > row.indecomposable[m + 1]) row.monotone = false;
      BigInt tail_lo = 0;
      BigInt tail_hi = 0;
      for (int j = n; j >= 1; --j) {
        tail_lo += row.block_counts[m][j];
        tail_hi += row.block_counts[m + 1][j];
        // P[C(m+1) >= j] <= P[C(m) >= j], cross-multiplied.
        if (tail_hi * level[m] > tail_lo * level[m + 1]) row.dominated = false;
      }
    }
    row.recurrence_total = indecomposable_count(n);
    row.totals_match = row.recurrence_total == row.indecomposable_total;
    report.monotonicity.push_back(std::move(row));
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case CensusMode::components: return run_component_census(cfg);
    case CensusMode::blocks: return run_block_census(cfg);
    case CensusMode::marked: return run_marked_vs_decomposition(cfg);
    case CensusMode::monotonicity: return run_monotonicity_check(cfg.n_max);
  }
  throw ConfigError("unknown mode");
}

bool ExperimentReport::passed() const {
  auto ok = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.passed; }); };
  const bool mono = std::all_of(monotonicity.begin(), monotonicity.end(), [](const MonotonicityRow& r) {
    return r.monotone && r.dominated && r.totals_match;
  });
  return ok(components) && ok(blocks) && ok(marked) && mono;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["config"] = permgraph::to_json(config);
  j["passed"] = passed();
  j["wall_seconds"] = wall_seconds;
  j["tolerances"] = {{"mean_std_errors", kMeanStdErrors},
                     {"poisson_tv", kPoissonTvTolerance},
                     {"block_ks", kBlockKsTolerance},
                     {"first_last_min_p", kFirstLastMinPValue},
                     {"marked_agreement_min", kMarkedAgreementMin},
                     {"close_pair_max", kClosePairMax}};
  auto& entries = j["entries"] = nlohmann::json::array();
  for (const auto& e : components) {
    auto je = params_json(e.point);
    je["trials"] = e.extra_blocks.size();
    je["histogram"] = e.histogram;
    je["extra_blocks"] = moments_json(e.stats);
    je["tv_to_poisson"] = e.tv;
    je["mean_ok"] = e.mean_ok;
    je["tv_ok"] = e.tv_ok;
    je["passed"] = e.passed;
    entries.push_back(je);
  }
  for (const auto& e : blocks) {
    auto je = params_json(e.point);
    je["trials"] = e.u.size();
    je["scaled_smallest"] = moments_json(e.u_stats);
    je["scaled_largest"] = moments_json(e.v_stats);
    je["ks_smallest_vs_exponential"] = ks_json(e.ks_u);
    je["ks_largest_vs_gumbel"] = ks_json(e.ks_v);
    je["ks_first_vs_last"] = ks_json(e.first_vs_last);
    je["structure_ok"] = e.structure_ok;
    je["passed"] = e.passed;
    entries.push_back(je);
  }
  for (const auto& e : marked) {
    auto je = params_json(e.point);
    je["trials"] = e.trials;
    je["agreement_frequency"] = e.agreement_frequency;
    je["close_pair_frequency"] = e.close_pair_frequency;
    je["containment_failures"] = e.containment_failures;
    je["passed"] = e.passed;
    entries.push_back(je);
  }
  for (const auto& r : monotonicity) {
    nlohmann::json je;
    je["n"] = r.n;
    auto& probs = je["indecomposable_probability"] = nlohmann::json::array();
    for (const auto& p : r.indecomposable) probs.push_back(p.get_str());
    je["indecomposable_total"] = r.indecomposable_total.get_str();
    je["recurrence_total"] = r.recurrence_total.get_str();
    je["monotone"] = r.monotone;
    je["dominated"] = r.dominated;
    je["totals_match"] = r.totals_match;
    entries.push_back(je);
  }
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  if (!components.empty()) {
    out << "m,trial,extra_blocks\n";
    for (const auto& e : components)
      for (std::size_t i = 0; i < e.extra_blocks.size(); ++i) out << e.point.m << ',' << i << ',' << e.extra_blocks[i] << '\n';
  } else if (!blocks.empty()) {
    out << "m,trial,smallest,largest,first,last,u,v\n";
    for (const auto& e : blocks)
      for (std::size_t i = 0; i < e.u.size(); ++i)
        out << e.point.m << ',' << i << ',' << e.smallest[i] << ',' << e.largest[i] << ',' << e.first[i] << ','
            << e.last[i] << ',' << e.u[i] << ',' << e.v[i] << '\n';
  } else if (!marked.empty()) {
    out << "m,trial,agree,close_pair\n";
    for (const auto& e : marked)
      for (std::size_t i = 0; i < e.agree.size(); ++i)
        out << e.point.m << ',' << i << ',' << int(e.agree[i]) << ',' << int(e.close_pair[i]) << '\n';
  }
  return out.str();
}

void write_report(const ExperimentReport& report) {
  const auto& dir = report.config.out_dir;
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  const auto json_path = std::filesystem::path(dir) / "report.json";
  std::ofstream json_out(json_path);
  json_out << report.to_json().dump(2) << '\n';
  if (!json_out) throw std::runtime_error("cannot write " + json_path.string());
  if (report.config.write_csv && report.config.mode != CensusMode::monotonicity) {
    const auto csv_path = std::filesystem::path(dir) / "trials.csv";
    std::ofstream csv_out(csv_path);
    csv_out << report.to_csv();
    if (!csv_out) throw std::runtime_error("cannot write " + csv_path.string());
  }
}

}  // namespace permgraph
