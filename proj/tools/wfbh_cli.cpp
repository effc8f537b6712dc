// Command-line front end: converge, sweep and oracle-check experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wfbh/config.hpp"
#include "wfbh/errors.hpp"
#include "wfbh/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerification = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config")->required();
  cmd->add_option("--seed", opts.seed, "Override scenario.rng_seed");
  cmd->add_option("--out", opts.out, "Override experiment.output_path (directory)");
  cmd->add_option("--jobs", opts.jobs, "Worker threads for Monte Carlo trials (0 = all cores)");
  cmd->add_flag("--quiet", opts.quiet, "Only print errors");
}

wfbh::ExperimentConfig resolve(const CommonOptions& opts, wfbh::ExperimentKind kind) {
  wfbh::ExperimentConfig config = wfbh::load_config(opts.config_path);
  if (config.experiment.kind && *config.experiment.kind != kind) {
    throw wfbh::ConfigError("experiment.kind", std::string("config is for '") +
                                                   wfbh::to_string(*config.experiment.kind) +
                                                   "' but the '" + wfbh::to_string(kind) +
                                                   "' command was run");
  }
  config.experiment.kind = kind;
  if (opts.seed) config.scenario.rng_seed = *opts.seed;
  if (opts.out) config.experiment.output_path = *opts.out;
  if (opts.jobs) config.experiment.jobs = *opts.jobs;
  return config;
}

int converge(const CommonOptions& opts) {
  const auto config = resolve(opts, wfbh::ExperimentKind::kConverge);
  const std::filesystem::path out_dir = config.experiment.output_path;
  const auto run = wfbh::run_converge(config, out_dir);

  nlohmann::json results = nlohmann::json::array();
  for (const auto& s : run.summaries) {
    if (!s.z_within_stability_bound) {
      std::cerr << "warning: Z=" << s.z_factor << " is not above 2^(-tau/max W) for tau=" << s.tau_bps
                << "; the run may oscillate\n";
    }
    if (!opts.quiet) {
      std::printf("tau=%s bps  Z=%s  iterations=%zu  %s  R_N=%s  R*=%s  classic=%s  gap=%s\n",
                  wfbh::format_number(s.tau_bps).c_str(), wfbh::format_number(s.z_factor).c_str(),
                  s.iterations, s.converged ? "converged" : "max-iterations",
                  wfbh::format_number(s.final_rate_bps).c_str(),
                  wfbh::format_number(s.optimal_rate_bps).c_str(),
                  wfbh::format_number(s.classic_rate_bps).c_str(),
                  wfbh::format_number(s.optimal_rate_bps - s.final_rate_bps).c_str());
    }
    results.push_back({{"tau_bps", s.tau_bps},
                       {"z_factor", s.z_factor},
                       {"iterations", s.iterations},
                       {"converged", s.converged},
                       {"final_rate_bps", s.final_rate_bps},
                       {"optimal_rate_bps", s.optimal_rate_bps},
                       {"classic_rate_bps", s.classic_rate_bps},
                       {"csv", s.csv_path.filename().string()}});
  }
  wfbh::write_manifest(out_dir, config, "converge", results.dump());
  return kExitOk;
}

int sweep(const CommonOptions& opts) {
  const auto config = resolve(opts, wfbh::ExperimentKind::kSweep);
  const std::filesystem::path out_dir = config.experiment.output_path;
  const auto rows = wfbh::run_sweep(config);
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / "sweep.csv";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    wfbh::write_sweep_csv(csv, rows);
  }

  nlohmann::json results = nlohmann::json::array();
  for (const double radius : config.experiment.radius_grid_m) {
    double prop = 0.0, classic = 0.0, opt = 0.0;
    int n = 0, unconverged = 0;
    for (const auto& row : rows) {
      if (row.radius_m != radius) continue;
      prop += row.se_proposed();
      classic += row.se_classic();
      opt += row.se_optimal();
      if (!row.converged) ++unconverged;
      ++n;
    }
    results.push_back({{"D_m", radius},
                       {"mean_se_proposed", prop / n},
                       {"mean_se_classic", classic / n},
                       {"mean_se_optimal", opt / n},
                       {"unconverged_trials", unconverged}});
    if (!opts.quiet) {
      std::printf("D=%s m  se_optimal=%s  se_proposed=%s  se_classic=%s bps/Hz\n",
                  wfbh::format_number(radius).c_str(), wfbh::format_number(opt / n).c_str(),
                  wfbh::format_number(prop / n).c_str(), wfbh::format_number(classic / n).c_str());
    }
  }
  if (!opts.quiet) std::printf("wrote %s\n", csv_path.string().c_str());
  wfbh::write_manifest(out_dir, config, "sweep", results.dump());
  return kExitOk;
}

int oracle_check(const CommonOptions& opts) {
  const auto config = resolve(opts, wfbh::ExperimentKind::kOracleCheck);
  const auto report = wfbh::run_oracle_check(config);
  if (!opts.quiet) {
    std::printf("trials=%d  max |R* - R*_grid|=%s bps  worst bound excess=%s bps  uncertified=%d\n",
                report.trials, wfbh::format_number(report.max_discrepancy_bps).c_str(),
                wfbh::format_number(report.max_bound_excess_bps).c_str(), report.uncertified);
  }
  std::printf("oracle-check %s\n", report.passed ? "PASS" : "FAIL");
  wfbh::write_manifest(config.experiment.output_path, config, "oracle-check",
                       nlohmann::json{{"trials", report.trials},
                                      {"max_discrepancy_bps", report.max_discrepancy_bps},
                                      {"max_bound_excess_bps", report.max_bound_excess_bps},
                                      {"uncertified", report.uncertified},
                                      {"passed", report.passed}}
                           .dump());
  return report.passed ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waterfilling power allocation over a capacity-constrained tree backhaul"};
  app.require_subcommand(1);

  CommonOptions converge_opts, sweep_opts, check_opts;
  auto* converge_cmd = app.add_subcommand("converge", "Trace the adaptation on a fixed instance");
  add_common(converge_cmd, converge_opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "Spectral efficiency versus cluster radius");
  add_common(sweep_cmd, sweep_opts);
  auto* check_cmd = app.add_subcommand("oracle-check", "Cross-check the optimum against a grid search");
  add_common(check_cmd, check_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*converge_cmd) return converge(converge_opts);
    if (*sweep_cmd) return sweep(sweep_opts);
    return oracle_check(check_opts);
  } catch (const wfbh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const wfbh::ProblemTooLarge& e) {
    std::cerr << "refused: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitConfig;
}
