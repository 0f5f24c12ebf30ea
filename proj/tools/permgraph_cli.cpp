// Command line front end: counting, conversions, sampling, the coupling
// chain and Monte Carlo censuses.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "permgraph/asymptotics.hpp"
#include "permgraph/counting.hpp"
#include "permgraph/coupling.hpp"
#include "permgraph/experiments.hpp"
#include "permgraph/permutation.hpp"
#include "permgraph/sampler.hpp"

using namespace permgraph;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatFailure = 1;
constexpr int kExitConfigError = 2;

// Comma-separated values, the line format for sequences and permutations.
std::string join_csv(std::span<const int> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

json edges_json(const std::vector<std::pair<int, int>>& edges) {
  json out = json::array();
  for (const auto& [a, b] : edges) out.push_back({a, b});
  return out;
}

json describe(const Permutation& p) {
  const auto x = inversion_sequence(p);
  const auto pts = decomposition_points(x);
  const auto b = blocks_from_points(p.size(), pts);
  json blocks_out = json::array();
  int start = 0;
  for (int size : b.sizes) {
    std::vector<int> part(p.word().begin() + start, p.word().begin() + start + size);
    blocks_out.push_back(part);
    start += size;
  }
  const auto reversed = block_reversal(p);
  return {{"permutation", p.to_string()},
          {"inversion_sequence", x.to_string()},
          {"inversions", x.total()},
          {"decomposition_points", pts},
          {"blocks", blocks_out},
          {"block_sizes", b.sizes},
          {"components", b.count()},
          {"edges", edges_json(permutation_graph_edges(p))},
          {"block_reversal", reversed.to_string()}};
}

int run_census(const ExperimentConfig& cfg) {
  const auto report = run_experiment(cfg);
  write_report(report);
  std::cout << report.to_json().dump(2) << '\n';
  return report.passed() ? kExitOk : kExitStatFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inversion-constrained permutations: counting, sampling, block structure"};
  app.require_subcommand(1);

  int n = 0;
  std::int64_t m = 0;

  auto* count_cmd = app.add_subcommand("count", "Print s(n, m), the number of permutations of [n] with m inversions");
  count_cmd->add_option("n", n)->required()->check(CLI::Range(1, 100000));
  count_cmd->add_option("m", m)->required();

  int max_n = 0;
  std::string out_file;
  std::uint64_t cap = kNoBudgetCap;
  auto* table_cmd = app.add_subcommand("table", "Build the counting table and save it in binary form");
  table_cmd->add_option("--max-n", max_n, "Largest row")->required()->check(CLI::Range(1, 100000));
  table_cmd->add_option("--out", out_file, "Output file")->required();
  table_cmd->add_option("--cap", cap, "Largest stored column");

  std::string perm_text;
  auto* blocks_cmd = app.add_subcommand("blocks", "Describe the blocks and graph of a permutation (JSON)");
  blocks_cmd->add_option("--perm", perm_text, "One-line notation, e.g. 24135867 or \"2 4 1 3\"")->required();

  std::string seq_text;
  auto* invseq_cmd = app.add_subcommand("invseq", "Convert between a permutation and its inversion sequence");
  auto* perm_opt = invseq_cmd->add_option("--perm", perm_text, "Permutation to encode");
  auto* seq_opt = invseq_cmd->add_option("--seq", seq_text, "Inversion sequence to decode");
  perm_opt->excludes(seq_opt);
  invseq_cmd->require_option(1);

  std::int64_t count = 1;
  std::uint64_t seed = 1;
  std::string format = "invseq";
  auto* sample_cmd = app.add_subcommand("sample", "Draw uniform inversion sequences with a fixed total");
  sample_cmd->add_option("--n", n)->required()->check(CLI::Range(1, 10000000));
  sample_cmd->add_option("--m", m)->required();
  sample_cmd->add_option("--count", count)->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
  sample_cmd->add_option("--seed", seed);
  sample_cmd->add_option("--format", format)->check(CLI::IsMember({"perm", "invseq"}));

  std::int64_t target = 0;
  bool trace = false;
  auto* chain_cmd = app.add_subcommand("chain", "Run the coupling chain from the zero sequence");
  chain_cmd->add_option("--n", n)->required()->check(CLI::Range(1, 100000));
  chain_cmd->add_option("--to", target, "Final total")->required();
  chain_cmd->add_option("--seed", seed);
  chain_cmd->add_flag("--trace", trace, "Print the state after every step");

  auto* rho_cmd = app.add_subcommand("rho", "Print the exact transition matrix from total m to m+1 (JSON)");
  rho_cmd->add_option("--n", n)->required()->check(CLI::Range(2, kRhoMaxN));
  rho_cmd->add_option("--m", m)->required();

  std::optional<std::int64_t> params_m;
  std::optional<double> params_mu;
  auto* params_cmd = app.add_subcommand("params", "Print threshold parameters (JSON)");
  params_cmd->add_option("--n", n)->required()->check(CLI::Range(3, 1000000000));
  auto* pm = params_cmd->add_option("--m", params_m);
  auto* pmu = params_cmd->add_option("--mu", params_mu);
  pm->excludes(pmu);
  params_cmd->require_option(2);

  std::string config_file;
  std::string mode = "components";
  std::vector<double> mus;
  std::int64_t trials = 0;
  std::string out_dir;
  int threads = 1;
  bool csv = false;
  int census_n_max = 8;
  auto* census_cmd = app.add_subcommand("census", "Monte Carlo census; exit 0 pass, 1 statistical failure, 2 config error");
  census_cmd->add_option("--config", config_file, "JSON config file");
  census_cmd->add_option("--n", n);
  census_cmd->add_option("--mu", mus, "One or more mu values");
  census_cmd->add_option("--trials", trials);
  census_cmd->add_option("--seed", seed);
  census_cmd->add_option("--mode", mode);
  census_cmd->add_option("--out", out_dir, "Output directory");
  census_cmd->add_option("--threads", threads);
  census_cmd->add_option("--n-max", census_n_max, "Largest n for the monotonicity mode");
  census_cmd->add_flag("--csv", csv, "Also write per-trial rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*count_cmd) {
      const auto table = build_table(n, static_cast<std::uint64_t>(std::max<std::int64_t>(0, std::min(m, max_inversions(n) - m))));
      std::cout << table.count(n, m).get_str() << '\n';
    } else if (*table_cmd) {
      const auto table = build_table(max_n, cap);
      std::ofstream out(out_file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + out_file);
      table.save(out);
      std::cout << "wrote rows 1.." << max_n << " to " << out_file << '\n';
    } else if (*blocks_cmd) {
      std::cout << describe(Permutation::parse(perm_text)).dump(2) << '\n';
    } else if (*invseq_cmd) {
      if (!perm_text.empty())
        std::cout << join_csv(inversion_sequence(Permutation::parse(perm_text)).values()) << '\n';
      else
        std::cout << join_csv(permutation_from_inversion_sequence(InversionSequence::parse(seq_text)).word()) << '\n';
    } else if (*sample_cmd) {
      const InversionSampler sampler(n, m);
      for (std::int64_t i = 0; i < count; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const auto x = sampler.sample(rng);
        std::cout << (format == "perm" ? join_csv(permutation_from_inversion_sequence(x).word()) : join_csv(x.values())) << '\n';
      }
    } else if (*chain_cmd) {
      if (target < 0 || target > max_inversions(n)) throw std::invalid_argument("--to outside [0, C(n,2)]");
      SamplerContext ctx(nullptr, seed, 0);
      std::vector<int> steps;
      const auto state = run_chain(n, target, ctx, trace ? &steps : nullptr);
      if (trace) {
        auto x = InversionSequence::zeros(n);
        std::cout << "0 " << join_csv(x.values()) << '\n';
        for (std::size_t t = 0; t < steps.size(); ++t) {
          x.increment(steps[t]);
          std::cout << t + 1 << ' ' << join_csv(x.values()) << " +" << steps[t] << '\n';
        }
      } else {
        std::cout << join_csv(state.x.values()) << '\n';
      }
    } else if (*rho_cmd) {
      const BetaTable betas(std::make_shared<const InversionTable>(build_table(n)));
      const auto rho = materialize_rho(n, m, betas);
      json rows = json::array();
      json cols = json::array();
      for (const auto& r : rho.rows) rows.push_back(r.to_string());
      for (const auto& c : rho.cols) cols.push_back(c.to_string());
      json entries = json::array();
      for (std::size_t i = 0; i < rho.rows.size(); ++i)
        for (const auto& [c, p] : rho.entries[i]) entries.push_back({rho.rows[i].to_string(), rho.cols[c].to_string(), p.get_str()});
      const auto& sol = betas.get(n, m);
      json beta_out = json::array();
      for (const auto& b : sol.betas) beta_out.push_back(b.get_str());
      std::cout << json{{"n", n}, {"m", m}, {"reflected", sol.reflected}, {"source_budget", sol.source_budget},
                        {"betas", beta_out}, {"rows", rows}, {"cols", cols}, {"entries", entries}}
                       .dump(2)
                << '\n';
    } else if (*params_cmd) {
      json out;
      std::int64_t budget = 0;
      if (params_mu) {
        const auto choice = alpha_for_mu(n, *params_mu);
        out["mu"] = *params_mu;
        out["alpha_formula"] = choice.alpha;
        budget = choice.m;
      } else {
        budget = *params_m;
      }
      const auto p = threshold_params(n, budget);
      out["n"] = p.n;
      out["m"] = p.m;
      out["regime"] = to_string(p.regime);
      out["alpha"] = p.alpha;
      out["q"] = p.q;
      out["nu"] = p.nu;
      out["h"] = p.h;
      out["lambda"] = p.lambda;
      std::cout << out.dump(2) << '\n';
    } else if (*census_cmd) {
      ExperimentConfig cfg;
      try {
        if (!config_file.empty()) {
          std::ifstream in(config_file);
          if (!in) throw ConfigError("cannot read " + config_file);
          json j;
          try {
            j = json::parse(in);
          } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
          }
          cfg = config_from_json(j);
        } else {
          cfg.mode = parse_mode(mode);
          cfg.n = n;
          cfg.mu_list = mus;
          cfg.trials = trials;
          cfg.seed = seed;
          cfg.parallelism = threads;
          cfg.out_dir = out_dir;
          cfg.write_csv = csv;
          cfg.n_max = census_n_max;
          cfg.validate();
        }
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
      }
      return run_census(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}
