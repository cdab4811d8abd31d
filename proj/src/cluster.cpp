#include "rootdoa/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rootdoa/poly.hpp"
#include "rootdoa/subspace.hpp"

namespace rootdoa {

std::vector<Complex> collect_roots(const CMatrix& q) {
  std::vector<Complex> all;
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const ComplexPolynomial p = eigenvector_polynomial(q.col(c));
    if (p.is_zero()) throw DomainError("cannot take roots of a zero eigenvector column");
    const auto r = roots(p);
    all.insert(all.end(), r.begin(), r.end());
  }
  return all;
}

std::vector<LinkageStep> single_linkage(std::span<const Complex> pts) {
  const std::size_t n = pts.size();
  std::vector<LinkageStep> steps;
  if (n < 2) return steps;

  // Prim's algorithm: the MST edges sorted by length are the single-linkage merges.
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  in_tree[0] = true;
  for (std::size_t j = 1; j < n; ++j) {
    best[j] = std::abs(pts[j] - pts[0]);
    parent[j] = 0;
  }
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
    }
    in_tree[next] = true;
    steps.push_back({std::min(parent[next], next), std::max(parent[next], next), best[next]});
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double d = std::abs(pts[j] - pts[next]);
      if (d < best[j]) {
        best[j] = d;
        parent[j] = next;
      }
    }
  }
  std::stable_sort(steps.begin(), steps.end(), [](const LinkageStep& x, const LinkageStep& y) {
    return x.distance < y.distance;
  });
  return steps;
}

namespace {

struct DisjointSet {
  explicit DisjointSet(std::size_t n) : parent(n), height(n, 0.0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b, double d) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    height[a] = std::max({height[a], height[b], d});
  }
  std::vector<std::size_t> parent;
  std::vector<double> height;
};

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RootClusterSet agglomerative_cluster(std::span<const Complex> pts, double delta) {
  if (!(delta > 0.0)) throw DomainError("clustering radius delta must be positive");
  RootClusterSet out;
  out.delta = delta;
  const std::size_t n = pts.size();
  if (n == 0) return out;

  DisjointSet sets(n);
  for (const LinkageStep& step : single_linkage(pts)) {
    if (step.distance > delta) break;
    sets.unite(step.a, step.b, step.distance);
  }
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == n) {
      slot[root] = out.clusters.size();
      out.clusters.push_back({{}, {}, sets.height[root]});
    }
    RootCluster& c = out.clusters[slot[root]];
    c.members.push_back(i);
    c.roots.push_back(pts[i]);
  }
  return out;
}

double circular_mean_phase(std::span<const Complex> points) {
  Complex acc{};
  for (const Complex z : points) {
    const double r = std::abs(z);
    if (r > 0.0) acc += z / r;
  }
  return std::arg(acc);
}

SplitResult split_cluster(std::span<const Complex> cluster, int n_sensors) {
  if (n_sensors < 2) throw DomainError("split_cluster needs at least 2 sensors");
  const std::size_t capacity = static_cast<std::size_t>(n_sensors - 1);
  SplitResult out;
  if (cluster.empty()) return out;

  const double center = circular_mean_phase(cluster);
  const Complex rotate = std::polar(1.0, -center);
  std::vector<double> phases;
  phases.reserve(cluster.size());
  for (const Complex z : cluster) phases.push_back(center + std::arg(z * rotate));

  std::vector<std::vector<double>> pending{std::move(phases)};
  std::vector<std::vector<double>> done;
  while (!pending.empty()) {
    std::vector<double> group = std::move(pending.back());
    pending.pop_back();
    if (group.size() <= capacity) {
      done.push_back(std::move(group));
      continue;
    }
    const double avg = mean(group);
    std::vector<double> low;
    std::vector<double> high;
    for (double phi : group) (phi <= avg ? low : high).push_back(phi);
    if (low.empty() || high.empty()) {
      out.forced_bisection = true;
      const auto half = static_cast<std::ptrdiff_t>(group.size() / 2);
      low.assign(group.begin(), group.begin() + half);
      high.assign(group.begin() + half, group.end());
    }
    pending.push_back(std::move(high));
    pending.push_back(std::move(low));
  }

  for (auto& g : done) out.groups.push_back({mean(g), std::move(g)});
  std::stable_sort(out.groups.begin(), out.groups.end(),
                   [](const PhaseGroup& a, const PhaseGroup& b) { return a.mean_phase < b.mean_phase; });
  for (auto& g : out.groups) g.mean_phase = wrap_phase(g.mean_phase);
  return out;
}

DetectionResult detect_and_localize(std::span<const Complex> roots, double delta, int n_sensors) {
  if (n_sensors < 2) throw DomainError("detection needs at least 2 sensors");
  const RootClusterSet set = agglomerative_cluster(roots, delta);

  struct Candidate {
    double phase;
    int size;
  };
  std::vector<Candidate> found;
  DetectionResult result;
  for (const RootCluster& c : set.clusters) {
    if (c.size() <= 2) continue;
    const SplitResult split = split_cluster(c.roots, n_sensors);
    result.forced_split = result.forced_split || split.forced_bisection;
    for (const PhaseGroup& g : split.groups) {
      if (g.phases.size() > 2) found.push_back({g.mean_phase, static_cast<int>(g.phases.size())});
    }
  }

  const auto capacity = static_cast<std::size_t>(n_sensors - 1);
  if (found.size() > capacity) {
    std::stable_sort(found.begin(), found.end(),
                     [](const Candidate& a, const Candidate& b) { return a.size > b.size; });
    found.resize(capacity);
  }

  std::vector<std::pair<double, int>> doas;
  for (const Candidate& c : found) {
    if (!(std::abs(c.phase) <= kPi)) {
      throw UnmappedPhaseError("cluster mean phase outside [-pi, pi]");
    }
    doas.emplace_back(rad2deg(std::asin(c.phase / kPi)), c.size);
  }
  std::sort(doas.begin(), doas.end());
  result.l_hat = static_cast<int>(doas.size());
  for (const auto& [theta, size] : doas) {
    result.doas_deg.push_back(theta);
    result.cluster_sizes.push_back(size);
  }
  return result;
}

double delta_from_uncertainty(double delta_theta_deg) {
  if (delta_theta_deg < 0.0) throw DomainError("angular uncertainty must be nonnegative");
  return std::abs(1.0 - std::polar(1.0, -kPi * deg2rad(delta_theta_deg)));
}

double DeltaSchedule::uncertainty_deg(double snr_db) const {
  if (snr_db < low_edge_db) return low_snr_deg;
  if (snr_db <= high_edge_db) return mid_snr_deg;
  return high_snr_deg;
}

double default_delta(double snr_db, int n_sensors, const DeltaSchedule& schedule) {
  if (n_sensors < 2) throw DomainError("default_delta needs at least 2 sensors");
  return delta_from_uncertainty(schedule.uncertainty_deg(snr_db));
}

}  // namespace rootdoa
