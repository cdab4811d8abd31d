#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rootdoa/common.hpp"

namespace rootdoa {

struct RootCluster {
  std::vector<std::size_t> members;  // indices into the clustered root list, ascending
  std::vector<Complex> roots;
  double dissimilarity = 0.0;        // height at which the cluster was completed

  std::size_t size() const { return members.size(); }
};

struct RootClusterSet {
  std::vector<RootCluster> clusters;  // ordered by smallest member index
  double delta = 0.0;
};

/// One merge of the single-linkage dendrogram, in merge order.
struct LinkageStep {
  std::size_t a = 0;  // representative root indices of the merged clusters
  std::size_t b = 0;
  double distance = 0.0;
};

struct DetectionResult {
  int l_hat = 0;
  std::vector<double> doas_deg;    // ascending
  std::vector<int> cluster_sizes;  // paired with doas_deg
  bool forced_split = false;       // a split fell back to index bisection
};

/// Roots of every column's eigenvector polynomial, column by column.
std::vector<Complex> collect_roots(const CMatrix& q);

/// Single-linkage dendrogram on Euclidean distance (Prim's MST, ties broken
/// by lower index). n - 1 steps for n roots.
std::vector<LinkageStep> single_linkage(std::span<const Complex> roots);

/// Cuts the single-linkage dendrogram at delta: two roots share a cluster
/// iff a chain of pairwise distances <= delta connects them.
RootClusterSet agglomerative_cluster(std::span<const Complex> roots, double delta);

struct PhaseGroup {
  double mean_phase = 0.0;  // wrapped to (-pi, pi]
  std::vector<double> phases;
};

struct SplitResult {
  std::vector<PhaseGroup> groups;
  bool forced_bisection = false;
};

/// While a group holds more than N - 1 roots, split it at its mean phase.
/// Phases are unwrapped around the circular mean before averaging.
SplitResult split_cluster(std::span<const Complex> cluster, int n_sensors);

/// Clusters the roots, splits oversized clusters, counts groups with more
/// than two members as sources and maps each group's mean phase to a DOA.
/// At most N - 1 sources are reported (largest groups first).
DetectionResult detect_and_localize(std::span<const Complex> roots, double delta, int n_sensors);

/// Circular mean of the phases of the given points, in (-pi, pi].
double circular_mean_phase(std::span<const Complex> points);

/// delta = |1 - exp(-j*pi*dtheta)| with dtheta in radians.
double delta_from_uncertainty(double delta_theta_deg);

/// Angular uncertainty per SNR band, in degrees.
struct DeltaSchedule {
  double low_snr_deg = 2.0;   // below low_edge_db
  double mid_snr_deg = 0.5;   // [low_edge_db, high_edge_db]
  double high_snr_deg = 0.1;  // above high_edge_db
  double low_edge_db = 0.0;
  double high_edge_db = 15.0;

  double uncertainty_deg(double snr_db) const;
};

/// Root-space clustering radius for the given SNR.
double default_delta(double snr_db, int n_sensors, const DeltaSchedule& schedule = {});

}  // namespace rootdoa
