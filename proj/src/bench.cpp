#include "rootdoa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "rootdoa/model.hpp"
#include "rootdoa/rng.hpp"

namespace rootdoa {

namespace {

std::string num12(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

void SweepConfig::validate() const {
  if (num_sensors < 2) throw ConfigError("num_sensors must be >= 2");
  if (snapshots < 1) throw ConfigError("snapshots must be >= 1");
  if (!(snr_step_db > 0.0)) throw ConfigError("snr_step_db must be positive");
  if (snr_stop_db < snr_start_db) throw ConfigError("snr_stop_db must be >= snr_start_db");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (delta && !(*delta > 0.0)) throw ConfigError("delta must be positive");
  Scenario probe{num_sensors, doas_deg, snapshots, snr_start_db, 0};
  try {
    probe.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid base scenario: ") + e.what());
  }
}

std::vector<double> SweepConfig::snr_grid() const {
  const auto count = static_cast<int>(std::floor((snr_stop_db - snr_start_db) / snr_step_db + 1e-9)) + 1;
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(snr_start_db + i * snr_step_db);
  return grid;
}

RmseResult rmse(const std::vector<std::vector<double>>& estimates, std::span<const double> truth) {
  std::vector<double> ref(truth.begin(), truth.end());
  std::sort(ref.begin(), ref.end());
  RmseResult out;
  double sum = 0.0;
  for (const auto& est : estimates) {
    if (est.size() != ref.size()) {
      ++out.excluded;
      continue;
    }
    std::vector<double> e(est);
    std::sort(e.begin(), e.end());
    for (std::size_t l = 0; l < ref.size(); ++l) sum += (e[l] - ref[l]) * (e[l] - ref[l]);
    ++out.used;
  }
  out.rmse_deg = (out.used == 0 || ref.empty())
                     ? std::numeric_limits<double>::quiet_NaN()
                     : std::sqrt(sum / (static_cast<double>(out.used) * static_cast<double>(ref.size())));
  return out;
}

std::vector<int> detection_histogram(std::span<const TrialRecord> records, int n_bins) {
  std::vector<int> hist(static_cast<std::size_t>(std::max(n_bins, 1)), 0);
  for (const auto& r : records) {
    const int bin = std::clamp(r.l_hat, 0, static_cast<int>(hist.size()) - 1);
    ++hist[static_cast<std::size_t>(bin)];
  }
  return hist;
}

std::uint64_t trial_seed(std::uint64_t master_seed, double snr_db, int trial_index) {
  return derive_seed(master_seed, std::bit_cast<std::uint64_t>(snr_db),
                     static_cast<std::uint64_t>(trial_index));
}

std::vector<TrialRecord> run_trials(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = cfg.snr_grid();
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t jobs = grid.size() * n_trials;
  std::vector<TrialRecord> records(jobs * n_methods);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t s = job / n_trials;
      const int t = static_cast<int>(job % n_trials);
      try {
        const Scenario sc{cfg.num_sensors, cfg.doas_deg, cfg.snapshots, grid[s],
                          trial_seed(cfg.master_seed, grid[s], t)};
        const SubspaceDecomposition d = hermitian_eig(sample_covariance(generate_snapshots(sc)));
        EstimatorSettings settings;
        settings.snapshots = cfg.snapshots;
        settings.snr_db = grid[s];
        settings.delta = cfg.delta;
        settings.schedule = cfg.schedule;
        settings.roots = cfg.roots;
        settings.true_sources = sc.num_sources();
        settings.gcd = cfg.gcd;
        for (std::size_t m = 0; m < n_methods; ++m) {
          const auto start = std::chrono::steady_clock::now();
          Estimate est;
          try {
            est = run_method(cfg.methods[m], d, settings);
          } catch (const DegradedEstimateError&) {
            est = {};
          } catch (const UnmappedPhaseError&) {
            est = {};
          }
          const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
          TrialRecord& rec = records[(s * n_methods + m) * n_trials + static_cast<std::size_t>(t)];
          rec = {grid[s], cfg.methods[m], t, est.l_hat, std::move(est.doas_deg), took.count(),
                 est.iterations};
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };

  unsigned n_workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, std::max<std::size_t>(jobs, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<MetricRow> summarize(const SweepConfig& cfg, std::span<const TrialRecord> records) {
  const std::vector<double> grid = cfg.snr_grid();
  const int truth_l = static_cast<int>(cfg.doas_deg.size());
  std::vector<MetricRow> rows;
  for (double snr : grid) {
    for (Method m : cfg.methods) {
      std::vector<TrialRecord> subset;
      for (const auto& r : records) {
        if (r.snr_db == snr && r.method == m) subset.push_back(r);
      }
      MetricRow row;
      row.snr_db = snr;
      row.method = m;
      row.trials = static_cast<int>(subset.size());
      std::vector<std::vector<double>> correct;
      double l_sum = 0.0;
      int hits = 0;
      for (const auto& r : subset) {
        l_sum += r.l_hat;
        if (r.l_hat == truth_l) {
          ++hits;
          correct.push_back(r.doas_deg);
        }
      }
      if (row.trials > 0) {
        row.p_correct = static_cast<double>(hits) / row.trials;
        row.mean_l_hat = l_sum / row.trials;
      }
      const RmseResult e = rmse(correct, cfg.doas_deg);
      row.rmse_deg = e.rmse_deg;
      row.rmse_trials_used = e.used;
      row.histogram = detection_histogram(subset, cfg.num_sensors);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<MetricRow> run_sweep(const SweepConfig& cfg) {
  const auto records = run_trials(cfg);
  return summarize(cfg, records);
}

void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows, int num_sensors) {
  os << "snr_db,method,trials,p_correct,rmse_deg,rmse_trials_used,mean_l_hat";
  for (int k = 0; k < num_sensors; ++k) os << ",hist_" << k;
  os << '\n';
  for (const auto& r : rows) {
    os << num12(r.snr_db) << ',' << method_name(r.method) << ',' << r.trials << ','
       << num12(r.p_correct) << ',' << num12(r.rmse_deg) << ',' << r.rmse_trials_used << ','
       << num12(r.mean_l_hat);
    for (int k = 0; k < num_sensors; ++k) {
      os << ',' << (k < static_cast<int>(r.histogram.size()) ? r.histogram[static_cast<std::size_t>(k)] : 0);
    }
    os << '\n';
  }
}

nlohmann::json sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : cfg.methods) methods.push_back(std::string(method_name(m)));
  nlohmann::json j{{"n_sensors", cfg.num_sensors},
                   {"doas_deg", cfg.doas_deg},
                   {"snapshots", cfg.snapshots},
                   {"snr_start_db", cfg.snr_start_db},
                   {"snr_stop_db", cfg.snr_stop_db},
                   {"snr_step_db", cfg.snr_step_db},
                   {"trials", cfg.trials},
                   {"methods", methods},
                   {"master_seed", cfg.master_seed},
                   {"roots", cfg.roots == RootSource::all ? "all" : "noise"},
                   {"gcd_tol", cfg.gcd.tol},
                   {"gcd_max_iter", cfg.gcd.max_iter},
                   {"delta_schedule_deg",
                    {{"low", cfg.schedule.low_snr_deg},
                     {"mid", cfg.schedule.mid_snr_deg},
                     {"high", cfg.schedule.high_snr_deg},
                     {"low_edge_db", cfg.schedule.low_edge_db},
                     {"high_edge_db", cfg.schedule.high_edge_db}}}};
  if (cfg.delta) j["delta"] = *cfg.delta;
  return j;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  try {
    cfg.num_sensors = j.at("n_sensors").get<int>();
    cfg.doas_deg = j.at("doas_deg").get<std::vector<double>>();
    cfg.snapshots = j.value("snapshots", cfg.snapshots);
    cfg.snr_start_db = j.at("snr_start_db").get<double>();
    cfg.snr_stop_db = j.value("snr_stop_db", cfg.snr_start_db);
    cfg.snr_step_db = j.value("snr_step_db", cfg.snr_step_db);
    cfg.trials = j.value("trials", cfg.trials);
    for (const auto& name : j.at("methods")) cfg.methods.push_back(parse_method(name.get<std::string>()));
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    const std::string roots = j.value("roots", std::string("all"));
    if (roots == "all") {
      cfg.roots = RootSource::all;
    } else if (roots == "noise") {
      cfg.roots = RootSource::noise;
    } else {
      throw ConfigError("roots must be 'all' or 'noise'");
    }
    cfg.gcd.tol = j.value("gcd_tol", cfg.gcd.tol);
    cfg.gcd.max_iter = j.value("gcd_max_iter", cfg.gcd.max_iter);
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("delta_schedule_deg")) {
      const auto& s = j.at("delta_schedule_deg");
      cfg.schedule.low_snr_deg = s.value("low", cfg.schedule.low_snr_deg);
      cfg.schedule.mid_snr_deg = s.value("mid", cfg.schedule.mid_snr_deg);
      cfg.schedule.high_snr_deg = s.value("high", cfg.schedule.high_snr_deg);
      cfg.schedule.low_edge_db = s.value("low_edge_db", cfg.schedule.low_edge_db);
      cfg.schedule.high_edge_db = s.value("high_edge_db", cfg.schedule.high_edge_db);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep config JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace rootdoa
