#include "rootdoa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace rootdoa {

namespace {

constexpr std::pair<std::string_view, Method> kMethods[] = {
    {"aic", Method::aic},
    {"mdl", Method::mdl},
    {"cluster", Method::cluster},
    {"rootmusic", Method::rootmusic},
    {"rootmusic_mdl", Method::rootmusic_mdl},
    {"cluster_certify", Method::cluster_certify},
};

std::span<const double> eigen_span(const SubspaceDecomposition& d) {
  return {d.eigenvalues.data(), static_cast<std::size_t>(d.eigenvalues.size())};
}

double cluster_delta(const EstimatorSettings& s, int n) {
  return s.delta ? *s.delta : default_delta(s.snr_db, n, s.schedule);
}

DetectionResult cluster_detect(const SubspaceDecomposition& d, const EstimatorSettings& s) {
  const int n = d.size();
  CMatrix q = d.eigenvectors;
  if (s.roots == RootSource::noise) {
    const int l = mdl_order(eigen_span(d), s.snapshots);
    if (l > 0) q = noise_subspace(d, l);
  }
  return detect_and_localize(collect_roots(q), cluster_delta(s, n), n);
}

}  // namespace

Method parse_method(std::string_view name) {
  for (const auto& [key, m] : kMethods) {
    if (key == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  for (const auto& [key, value] : kMethods) {
    if (value == m) return key;
  }
  return "unknown";
}

Estimate cluster_then_certify(const SubspaceDecomposition& d, const EstimatorSettings& settings) {
  const DetectionResult det = cluster_detect(d, settings);
  Estimate est{det.l_hat, det.doas_deg, std::nullopt, std::nullopt, std::nullopt};
  const int n = d.size();
  if (det.l_hat == 0 || det.l_hat > n - 2) return est;

  std::vector<Complex> seeds;
  for (double theta : det.doas_deg) seeds.push_back(std::polar(1.0, kPi * std::sin(deg2rad(theta))));
  const ComplexPolynomial u0 = from_roots(seeds);

  // Disjoint pairs of noise eigenvectors, smallest eigenvalues first; the
  // refined DOAs are averaged over the pairs that certify.
  std::vector<double> sum(static_cast<std::size_t>(det.l_hat), 0.0);
  int used = 0;
  for (int hi = n - 1; hi - 1 >= det.l_hat; hi -= 2) {
    const ComplexPolynomial qi = eigenvector_polynomial(d.eigenvectors.col(hi - 1));
    const ComplexPolynomial qj = eigenvector_polynomial(d.eigenvectors.col(hi));
    if (u0.degree() > std::min(qi.degree(), qj.degree())) continue;
    try {
      const GcdSolution sol = certify(qi, qj, u0, settings.gcd);
      std::vector<double> refined;
      for (const Complex z : sol.gcd_roots()) {
        refined.push_back(rad2deg(std::asin(std::clamp(std::arg(z) / kPi, -1.0, 1.0))));
      }
      if (static_cast<int>(refined.size()) != det.l_hat) continue;
      std::sort(refined.begin(), refined.end());
      for (std::size_t l = 0; l < refined.size(); ++l) sum[l] += refined[l];
      ++used;
      est.certificate_residual = std::max(est.certificate_residual.value_or(0.0), sol.certificate_residual);
      est.epsilon = std::max(est.epsilon.value_or(0.0), sol.epsilon);
      est.iterations = std::max(est.iterations.value_or(0), sol.iterations);
    } catch (const DivergenceError&) {
      // This pair does not contribute.
    }
  }
  if (used > 0) {
    for (std::size_t l = 0; l < sum.size(); ++l) est.doas_deg[l] = sum[l] / used;
  }
  return est;
}

Estimate run_method(Method method, const SubspaceDecomposition& d,
                    const EstimatorSettings& settings) {
  const auto eig = eigen_span(d);
  Estimate est;
  switch (method) {
    case Method::aic:
      est.l_hat = aic_order(eig, settings.snapshots);
      break;
    case Method::mdl:
      est.l_hat = mdl_order(eig, settings.snapshots);
      break;
    case Method::cluster: {
      const DetectionResult det = cluster_detect(d, settings);
      est.l_hat = det.l_hat;
      est.doas_deg = det.doas_deg;
      break;
    }
    case Method::rootmusic: {
      if (!settings.true_sources) throw ConfigError("rootmusic needs the true source count");
      est.l_hat = *settings.true_sources;
      if (est.l_hat > 0) est.doas_deg = root_music(noise_subspace(d, est.l_hat), est.l_hat);
      break;
    }
    case Method::rootmusic_mdl: {
      est.l_hat = mdl_order(eig, settings.snapshots);
      if (est.l_hat > 0) est.doas_deg = root_music(noise_subspace(d, est.l_hat), est.l_hat);
      break;
    }
    case Method::cluster_certify:
      est = cluster_then_certify(d, settings);
      break;
  }
  return est;
}

}  // namespace rootdoa
