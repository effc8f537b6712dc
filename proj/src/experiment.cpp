#include "wfbh/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "wfbh/errors.hpp"

namespace wfbh {

namespace {

// Runs fn(0..n-1) on a small worker pool; the first exception is rethrown.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const TreeSpec& require_tree(const ExperimentConfig& config) {
  if (!config.tree) throw ConfigError("tree", "this experiment requires a backhaul tree");
  return *config.tree;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::vector<std::string> converge_csv_header(std::size_t num_aps) {
  std::vector<std::string> cols = {"t", "R_N_bps", "R_star_bps", "R_classicWF_bps", "residual_w"};
  for (std::size_t k = 1; k <= num_aps; ++k) cols.push_back("P_" + std::to_string(k));
  for (std::size_t k = 1; k <= num_aps; ++k) cols.push_back("S_eff_" + std::to_string(k));
  return cols;
}

void write_converge_csv(std::ostream& out, const AdaptationTrace& trace, double optimal_rate_bps,
                        double classic_rate_bps) {
  const std::size_t num_aps = trace.records.empty() ? 0 : trace.records.front().allocation.powers_w.size();
  const auto header = converge_csv_header(num_aps);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& rec : trace.records) {
    out << rec.step << ',' << format_number(rec.destination_rate_bps) << ','
        << format_number(optimal_rate_bps) << ',' << format_number(classic_rate_bps) << ','
        << format_number(rec.residual_w);
    for (double p : rec.allocation.powers_w) out << ',' << format_number(p);
    for (NodeState s : rec.effective_states) out << ',' << to_int(s);
    out << '\n';
  }
}

ConvergeRun run_converge(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (!config.channels) {
    throw ConfigError("scenario.effective_noise_w", "converge needs explicit effective_noise_w and bandwidth_hz");
  }
  const BackhaulTree tree = require_tree(config).build();
  const std::vector<UplinkChannel> channels = config.channels->build();
  const double p_max = config.scenario.p_max_w;

  ConvergeRun run;
  run.optimum = optimal_rate(channels, tree, p_max, config.oracle.tol_bps);
  run.classic = classic_wf_rate(channels, tree, p_max);
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  for (const double tau : config.allocator.tau_bps) {
    const AllocatorParams params = config.allocator.params_for(tau, channels, p_max);
    AdaptationTrace trace = run_adaptation(channels, tree, params);

    ConvergeSummary summary;
    summary.tau_bps = tau;
    summary.z_factor = params.z_factor;
    summary.z_within_stability_bound = trace.z_within_stability_bound;
    summary.iterations = trace.iterations();
    summary.converged = trace.converged();
    summary.final_rate_bps = trace.final_record().destination_rate_bps;
    summary.optimal_rate_bps = run.optimum.optimal_rate_bps;
    summary.classic_rate_bps = run.classic.rate_bps;
    if (!out_dir.empty()) {
      summary.csv_path = out_dir / ("converge_tau_" + format_number(tau) + ".csv");
      std::ofstream csv(summary.csv_path, std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write " + summary.csv_path.string());
      write_converge_csv(csv, trace, run.optimum.optimal_rate_bps, run.classic.rate_bps);
    }
    run.summaries.push_back(std::move(summary));
    run.traces.push_back(std::move(trace));
  }
  return run;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t radius_index, std::size_t trial) {
  return splitmix64(splitmix64(base_seed ^ splitmix64(radius_index)) + trial);
}

TrialInstance make_trial_instance(const ExperimentConfig& config, double radius_m, std::uint64_t seed) {
  const TreeSpec& spec = require_tree(config);
  ScenarioConfig scenario = config.scenario;
  scenario.cluster_radius_m = radius_m;
  Rng rng(seed);
  auto channels = generate_scenario(scenario, rng);
  return {std::move(channels), spec.build_jittered(rng)};
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  const auto& radii = config.experiment.radius_grid_m;
  if (radii.empty()) throw ConfigError("experiment.radius_grid_m", "sweep needs at least one radius");
  if (config.allocator.tau_bps.size() != 1) {
    throw ConfigError("allocator.tau_bps", "sweep takes exactly one tau value");
  }
  (void)require_tree(config);
  const double tau = config.allocator.tau_bps.front();
  const double p_max = config.scenario.p_max_w;
  const auto trials = static_cast<std::size_t>(config.experiment.trials);

  std::vector<SweepRow> rows(radii.size() * trials);
  parallel_for(rows.size(), config.experiment.jobs, [&](std::size_t slot) {
    const std::size_t r = slot / trials;
    const std::size_t trial = slot % trials;
    SweepRow row;
    row.radius_m = radii[r];
    row.trial = static_cast<int>(trial);
    row.seed = trial_seed(config.scenario.rng_seed, r, trial);
    const TrialInstance inst = make_trial_instance(config, row.radius_m, row.seed);
    row.total_bandwidth_hz = total_bandwidth(inst.channels);

    const AdaptationTrace trace =
        run_adaptation(inst.channels, inst.tree, config.allocator.params_for(tau, inst.channels, p_max));
    row.proposed_bps = trace.final_record().destination_rate_bps;
    row.converged = trace.converged();
    row.classic_bps = classic_wf_rate(inst.channels, inst.tree, p_max).rate_bps;
    const OracleResult opt = optimal_rate(inst.channels, inst.tree, p_max, config.oracle.tol_bps);
    row.optimal_bps = opt.optimal_rate_bps;
    row.optimum_certified = opt.certified;
    rows[slot] = row;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& row : rows) {
    out << format_number(row.radius_m) << ',' << row.trial << ',' << row.seed << ','
        << format_number(row.se_proposed()) << ',' << format_number(row.se_classic()) << ','
        << format_number(row.se_optimal()) << '\n';
  }
}

OracleCheckReport run_oracle_check(const ExperimentConfig& config) {
  if (static_cast<std::size_t>(config.scenario.num_aps) > kMaxGridAps) {
    throw ProblemTooLarge("oracle-check compares against exhaustive grids and supports at most " +
                          std::to_string(kMaxGridAps) + " APs; config asks for " +
                          std::to_string(config.scenario.num_aps));
  }
  (void)require_tree(config);
  const double p_max = config.scenario.p_max_w;
  const double step = p_max / config.oracle.grid_steps;
  const double tol = config.oracle.tol_bps;
  const auto trials = static_cast<std::size_t>(config.experiment.trials);

  struct Outcome {
    double discrepancy = 0.0;
    double excess = 0.0;
    bool certified = false;
  };
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, config.experiment.jobs, [&](std::size_t trial) {
    const auto inst = make_trial_instance(config, config.scenario.cluster_radius_m,
                                          trial_seed(config.scenario.rng_seed, 0, trial));
    const OracleResult opt = optimal_rate(inst.channels, inst.tree, p_max, tol);
    const GridResult grid = grid_oracle(inst.channels, inst.tree, p_max, step);
    const double bound = grid_resolution_bound(inst.channels, opt.optimal_powers_w, step);
    Outcome& o = outcomes[trial];
    o.discrepancy = std::abs(opt.optimal_rate_bps - grid.rate_bps);
    // The grid can never beat the true optimum, and trails it by at most
    // the snapping bound.
    o.excess = std::max(grid.rate_bps - opt.optimal_rate_bps - tol,
                        opt.optimal_rate_bps - grid.rate_bps - bound - tol);
    o.certified = opt.certified;
  });

  OracleCheckReport report;
  report.trials = static_cast<int>(trials);
  report.max_bound_excess_bps = -std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    report.max_discrepancy_bps = std::max(report.max_discrepancy_bps, o.discrepancy);
    report.max_bound_excess_bps = std::max(report.max_bound_excess_bps, o.excess);
    if (!o.certified) ++report.uncertified;
  }
  report.passed = report.max_bound_excess_bps <= 0.0 && report.uncertified == 0;
  return report;
}

void write_manifest(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                    const std::string& command, const std::string& results_json) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = nlohmann::json::parse(to_json_string(config));
  manifest["results"] = nlohmann::json::parse(results_json);
  std::ofstream out(out_dir / "run_manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write run manifest in " + out_dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace wfbh
