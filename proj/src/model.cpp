#include "rootdoa/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rootdoa/rng.hpp"

namespace rootdoa {

namespace {

void check_angle(double theta_deg) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
    throw DomainError("angle " + std::to_string(theta_deg) +
                      " deg outside the open interval (-90, 90)");
  }
}

void check_doas(std::span<const double> doas_deg, int n_sensors) {
  for (double theta : doas_deg) check_angle(theta);
  if (static_cast<int>(doas_deg.size()) >= n_sensors) {
    throw DomainError("number of sources must be below the number of sensors");
  }
  std::vector<double> sorted(doas_deg.begin(), doas_deg.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("DOAs must be pairwise distinct");
  }
}

}  // namespace

double Scenario::noise_power() const { return std::pow(10.0, -snr_db / 10.0); }

void Scenario::validate() const {
  if (num_sensors < 2) throw DomainError("scenario needs at least 2 sensors");
  if (snapshots < 1) throw DomainError("scenario needs at least 1 snapshot");
  if (!std::isfinite(snr_db)) throw DomainError("snr_db must be finite");
  check_doas(doas_deg, num_sensors);
}

CVector steering_vector(double theta_deg, int n_sensors) {
  check_angle(theta_deg);
  if (n_sensors < 1) throw DomainError("steering vector needs at least one sensor");
  const double phase = kPi * std::sin(deg2rad(theta_deg));
  CVector a(n_sensors);
  for (int n = 0; n < n_sensors; ++n) a[n] = std::polar(1.0, phase * n);
  return a;
}

CMatrix steering_matrix(std::span<const double> doas_deg, int n_sensors) {
  CMatrix a(n_sensors, static_cast<Eigen::Index>(doas_deg.size()));
  for (std::size_t l = 0; l < doas_deg.size(); ++l) {
    a.col(static_cast<Eigen::Index>(l)) = steering_vector(doas_deg[l], n_sensors);
  }
  return a;
}

SnapshotMatrix generate_snapshots(const Scenario& scenario) {
  scenario.validate();
  const int n = scenario.num_sensors;
  const int l = scenario.num_sources();
  const int t_count = scenario.snapshots;
  const CMatrix a = steering_matrix(scenario.doas_deg, n);
  const double sigma_s2 = scenario.signal_power();
  const double sigma_n2 = scenario.noise_power();

  // Draw order per snapshot: L source samples, then N noise samples.
  CounterRng rng(scenario.seed);
  SnapshotMatrix out{CMatrix(n, t_count), scenario};
  CVector s(l);
  for (int t = 0; t < t_count; ++t) {
    for (int k = 0; k < l; ++k) s[k] = rng.complex_gaussian(sigma_s2);
    auto col = out.data.col(t);
    if (l > 0) {
      col = a * s;
    } else {
      col.setZero();
    }
    for (int k = 0; k < n; ++k) col[k] += rng.complex_gaussian(sigma_n2);
  }
  return out;
}

CovarianceMatrix sample_covariance(const CMatrix& snapshots) {
  const auto t_count = snapshots.cols();
  if (t_count < 1) throw DomainError("sample covariance needs at least one snapshot");
  CMatrix r = snapshots * snapshots.adjoint() / static_cast<double>(t_count);
  CMatrix sym = 0.5 * (r + r.adjoint());
  return {std::move(sym)};
}

CovarianceMatrix sample_covariance(const SnapshotMatrix& x) { return sample_covariance(x.data); }

CovarianceMatrix exact_covariance(std::span<const double> doas_deg, double sigma_s2,
                                  double sigma_n2, int n_sensors) {
  if (n_sensors < 1) throw DomainError("covariance needs at least one sensor");
  check_doas(doas_deg, n_sensors);
  const CMatrix a = steering_matrix(doas_deg, n_sensors);
  CMatrix r = sigma_s2 * (a * a.adjoint());
  r.diagonal().array() += sigma_n2;
  return {std::move(r)};
}

}  // namespace rootdoa
