#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rootdoa/common.hpp"

namespace rootdoa {

/// Far-field narrowband sources impinging on a half-wavelength ULA.
/// Source power is fixed at 1; noise power follows from snr_db.
struct Scenario {
  int num_sensors = 10;
  std::vector<double> doas_deg;
  int snapshots = 100;
  double snr_db = 10.0;
  std::uint64_t seed = 0;

  int num_sources() const { return static_cast<int>(doas_deg.size()); }
  double signal_power() const { return 1.0; }
  double noise_power() const;

  /// Throws DomainError when an invariant is broken.
  void validate() const;
};

struct SnapshotMatrix {
  CMatrix data;  // sensors x time
  std::optional<Scenario> scenario;

  int num_sensors() const { return static_cast<int>(data.rows()); }
  int snapshots() const { return static_cast<int>(data.cols()); }
};

struct CovarianceMatrix {
  CMatrix data;

  int size() const { return static_cast<int>(data.rows()); }
};

/// Entry n equals exp(j*pi*n*sin(theta)).
CVector steering_vector(double theta_deg, int n_sensors);

/// Columns are steering vectors, one per DOA.
CMatrix steering_matrix(std::span<const double> doas_deg, int n_sensors);

/// x(t) = A s(t) + n(t); a pure function of the scenario (seed included).
SnapshotMatrix generate_snapshots(const Scenario& scenario);

CovarianceMatrix sample_covariance(const CMatrix& snapshots);
CovarianceMatrix sample_covariance(const SnapshotMatrix& x);

/// sigma_s2 * A A^H + sigma_n2 * I, the infinite-sample covariance.
CovarianceMatrix exact_covariance(std::span<const double> doas_deg, double sigma_s2,
                                  double sigma_n2, int n_sensors);

}  // namespace rootdoa
