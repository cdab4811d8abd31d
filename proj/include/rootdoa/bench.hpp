#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rootdoa/estimators.hpp"

namespace rootdoa {

struct SweepConfig {
  int num_sensors = 10;
  std::vector<double> doas_deg;
  int snapshots = 100;
  double snr_start_db = -15.0;
  double snr_stop_db = 30.0;
  double snr_step_db = 3.0;
  int trials = 500;
  std::vector<Method> methods;
  std::uint64_t master_seed = 0;

  std::optional<double> delta;  // fixed cluster radius; default follows SNR
  DeltaSchedule schedule{};
  RootSource roots = RootSource::all;
  GcdOptions gcd{};
  unsigned workers = 0;  // 0 = hardware concurrency

  /// Throws ConfigError.
  void validate() const;
  std::vector<double> snr_grid() const;
};

struct TrialRecord {
  double snr_db = 0.0;
  Method method = Method::mdl;
  int trial_index = 0;
  int l_hat = 0;
  std::vector<double> doas_deg;
  double wall_time_s = 0.0;
  std::optional<int> iterations;
};

struct MetricRow {
  double snr_db = 0.0;
  Method method = Method::mdl;
  int trials = 0;
  double p_correct = 0.0;
  double rmse_deg = 0.0;  // NaN when no trial qualifies
  int rmse_trials_used = 0;
  double mean_l_hat = 0.0;
  std::vector<int> histogram;  // counts for l_hat = 0..N-1
};

struct RmseResult {
  double rmse_deg = 0.0;  // NaN when nothing was used
  int used = 0;
  int excluded = 0;       // estimate count differs from the truth
};

/// Sorted matching per trial, pooled over trials and sources.
RmseResult rmse(const std::vector<std::vector<double>>& estimates, std::span<const double> truth);

/// Counts per l_hat in [0, n_bins); out-of-range values are clamped to the last bin.
std::vector<int> detection_histogram(std::span<const TrialRecord> records, int n_bins);

/// Seed of the scenario drawn for (snr, trial); shared by all methods.
std::uint64_t trial_seed(std::uint64_t master_seed, double snr_db, int trial_index);

/// Every (snr, method, trial) record, ordered by snr, method, trial.
std::vector<TrialRecord> run_trials(const SweepConfig& cfg);

std::vector<MetricRow> summarize(const SweepConfig& cfg, std::span<const TrialRecord> records);

std::vector<MetricRow> run_sweep(const SweepConfig& cfg);

/// snr_db,method,trials,p_correct,rmse_deg,rmse_trials_used,mean_l_hat,hist_0..hist_{N-1}
void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows, int num_sensors);

nlohmann::json sweep_config_to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);

}  // namespace rootdoa
