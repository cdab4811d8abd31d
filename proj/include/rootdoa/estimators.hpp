#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rootdoa/agcd.hpp"
#include "rootdoa/cluster.hpp"
#include "rootdoa/subspace.hpp"

namespace rootdoa {

enum class Method { aic, mdl, cluster, rootmusic, rootmusic_mdl, cluster_certify };

/// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);
std::string_view method_name(Method m);

enum class RootSource { all, noise };

struct EstimatorSettings {
  int snapshots = 100;
  double snr_db = 10.0;              // selects delta when delta is unset
  std::optional<double> delta;       // cluster radius override
  DeltaSchedule schedule{};
  RootSource roots = RootSource::all;
  std::optional<int> true_sources;   // required by `rootmusic`
  GcdOptions gcd{};
};

struct Estimate {
  int l_hat = 0;
  std::vector<double> doas_deg;      // empty for order-only methods
  std::optional<double> certificate_residual;
  std::optional<double> epsilon;
  std::optional<int> iterations;
};

/// Runs one method on an eigendecomposition of the covariance.
Estimate run_method(Method method, const SubspaceDecomposition& d,
                    const EstimatorSettings& settings);

/// Cluster detection followed by Gauss-Newton refinement of the cluster
/// roots against disjoint pairs of noise eigenvectors (smallest eigenvalues
/// first). Refined DOAs are averaged over the pairs that converge; the
/// certificate fields report the worst pair. Falls back to the cluster DOAs
/// when no pair converges.
Estimate cluster_then_certify(const SubspaceDecomposition& d, const EstimatorSettings& settings);

}  // namespace rootdoa
