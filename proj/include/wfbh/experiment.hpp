#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wfbh/allocator.hpp"
#include "wfbh/config.hpp"
#include "wfbh/oracle.hpp"

namespace wfbh {

// Column order of the adaptation trace CSV (P_k and S_eff_k expand per AP).
std::vector<std::string> converge_csv_header(std::size_t num_aps);
inline constexpr const char* kSweepCsvHeader = "D_m,trial,seed,se_proposed,se_classic,se_optimal";

// Floats are printed with 9 significant digits.
std::string format_number(double value);

void write_converge_csv(std::ostream& out, const AdaptationTrace& trace, double optimal_rate_bps,
                        double classic_rate_bps);

struct ConvergeSummary {
  double tau_bps = 0.0;
  double z_factor = 0.0;
  bool z_within_stability_bound = true;
  std::size_t iterations = 0;
  bool converged = false;
  double final_rate_bps = 0.0;
  double optimal_rate_bps = 0.0;
  double classic_rate_bps = 0.0;
  std::filesystem::path csv_path;
};

struct ConvergeRun {
  std::vector<AdaptationTrace> traces;  // one per tau, config order
  OracleResult optimum;
  BaselineResult classic;
  std::vector<ConvergeSummary> summaries;
};

// Fixed-instance adaptation for every configured tau. Writes
// converge_tau_<tau>.csv per tau into `out_dir` unless it is empty.
ConvergeRun run_converge(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct SweepRow {
  double radius_m = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double total_bandwidth_hz = 0.0;
  double proposed_bps = 0.0;
  double classic_bps = 0.0;
  double optimal_bps = 0.0;
  bool converged = false;
  bool optimum_certified = false;

  double se_proposed() const { return proposed_bps / total_bandwidth_hz; }
  double se_classic() const { return classic_bps / total_bandwidth_hz; }
  double se_optimal() const { return optimal_bps / total_bandwidth_hz; }
};

// Per-trial seed derived from the base seed and the (radius, trial) slot.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t radius_index, std::size_t trial);

// Random channels and jittered capacities for one trial.
struct TrialInstance {
  std::vector<UplinkChannel> channels;
  BackhaulTree tree;
};
TrialInstance make_trial_instance(const ExperimentConfig& config, double radius_m, std::uint64_t seed);

// Rows ordered by (radius, trial) regardless of worker scheduling.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct OracleCheckReport {
  int trials = 0;
  double max_discrepancy_bps = 0.0;  // max |R* - R*_grid|
  double max_bound_excess_bps = 0.0;  // worst violation of the agreement bound (<= 0 passes)
  int uncertified = 0;
  bool passed = false;
};

// Compares optimal_rate against grid_oracle on `trials` random instances.
// Throws ProblemTooLarge when the configured K exceeds the grid limit.
OracleCheckReport run_oracle_check(const ExperimentConfig& config);

// Writes the resolved config plus a free-form results object.
void write_manifest(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                    const std::string& command, const std::string& results_json);

}  // namespace wfbh
