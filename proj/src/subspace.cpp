#include "rootdoa/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace rootdoa {

SubspaceDecomposition hermitian_eig(const CovarianceMatrix& r) {
  const CMatrix& m = r.data;
  if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("covariance must be square");
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
  if ((m - m.adjoint()).norm() > 1e-10 * scale) {
    throw DomainError("matrix is not Hermitian within tolerance");
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw DomainError("Hermitian eigensolver failed");

  // Solver order is ascending; flip to descending.
  const auto n = m.rows();
  SubspaceDecomposition d{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    d.eigenvalues[i] = solver.eigenvalues()[n - 1 - i];
    d.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return d;
}

CMatrix noise_subspace(const SubspaceDecomposition& d, int l_hat) {
  const int n = d.size();
  if (l_hat < 0 || l_hat >= n) throw DomainError("l_hat must lie in [0, N-1]");
  return d.eigenvectors.rightCols(n - l_hat);
}

ComplexPolynomial eigenvector_polynomial(const CVector& q) {
  std::vector<Complex> c(static_cast<std::size_t>(q.size()));
  for (Eigen::Index k = 0; k < q.size(); ++k) c[static_cast<std::size_t>(k)] = std::conj(q[k]);
  return ComplexPolynomial(std::move(c));
}

OrderScores order_scores(std::span<const double> eigenvalues, int t_snapshots) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 1) throw DomainError("order selection needs eigenvalues");
  if (t_snapshots < 1) throw DomainError("order selection needs T >= 1");
  for (double lambda : eigenvalues) {
    if (!(lambda > 0.0)) throw DomainError("order selection needs positive eigenvalues");
  }
  const double t = static_cast<double>(t_snapshots);
  OrderScores s;
  for (int k = 0; k < n; ++k) {
    const auto tail = eigenvalues.subspan(static_cast<std::size_t>(k));
    const double m = static_cast<double>(tail.size());
    const double arith = std::accumulate(tail.begin(), tail.end(), 0.0) / m;
    double log_sum = 0.0;
    for (double lambda : tail) log_sum += std::log(lambda);
    const double log_geo = log_sum / m;
    // Negative log-likelihood; clamp rounding noise on a flat tail.
    const double nll = std::max(0.0, t * m * (std::log(arith) - log_geo));
    const double params = k * (2.0 * n - k);
    s.aic.push_back(2.0 * nll + 2.0 * params);
    s.mdl.push_back(nll + 0.5 * params * std::log(t));
  }
  return s;
}

namespace {
int argmin(const std::vector<double>& v) {
  return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}
}  // namespace

int aic_order(std::span<const double> eigenvalues, int t_snapshots) {
  return argmin(order_scores(eigenvalues, t_snapshots).aic);
}

int mdl_order(std::span<const double> eigenvalues, int t_snapshots) {
  return argmin(order_scores(eigenvalues, t_snapshots).mdl);
}

ComplexPolynomial root_music_polynomial(const CMatrix& q_n) {
  const auto n = q_n.rows();
  const CMatrix c = q_n * q_n.adjoint();
  // On |z| = 1, d^H C d = sum_{m,k} C(m,k) z^{k-m}.
  std::vector<Complex> coeffs(static_cast<std::size_t>(2 * n - 1));
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      coeffs[static_cast<std::size_t>(k - m + n - 1)] += c(m, k);
    }
  }
  return ComplexPolynomial(std::move(coeffs));
}

std::vector<double> root_music(const CMatrix& q_n, int l_hat) {
  if (l_hat < 1) throw DomainError("root-MUSIC needs l_hat >= 1");
  if (q_n.cols() != q_n.rows() - l_hat) {
    throw DomainError("noise subspace must have N - l_hat columns");
  }
  const ComplexPolynomial poly = root_music_polynomial(q_n);
  const std::vector<Complex> rts = roots(poly);
  std::vector<Complex> dc;
  for (std::size_t k = 1; k < poly.size(); ++k) dc.push_back(static_cast<double>(k) * poly[k]);
  const ComplexPolynomial deriv(dc);

  std::vector<std::size_t> order(rts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(rts[a]) < std::abs(rts[b]);
  });

  // Pair each root with its conjugate-reciprocal partner; for on-circle
  // double roots the pair is split tangentially and the midpoint is kept.
  std::vector<bool> used(rts.size(), false);
  std::vector<Complex> reps;
  for (std::size_t idx : order) {
    if (used[idx]) continue;
    used[idx] = true;
    const Complex z = rts[idx];
    if (z == Complex{}) {
      reps.push_back(z);
      continue;
    }
    const Complex target = 1.0 / std::conj(z);
    std::size_t best = rts.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rts.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(rts[j] - target);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == rts.size()) {
      reps.push_back(z);
    } else {
      used[best] = true;
      Complex mid = 0.5 * (z + 1.0 / std::conj(rts[best]));
      if (std::abs(rts[best] - z) < 1e-6) {
        // Numerically double root: it is a simple root of the derivative.
        for (int it = 0; it < 5 && deriv.size() > 1; ++it) {
          const Complex num = eval(deriv, mid);
          Complex den(0.0, 0.0);
          for (std::size_t k = deriv.size(); k-- > 1;) den = den * mid + static_cast<double>(k) * deriv[k];
          if (den == Complex{}) break;
          const Complex step = num / den;
          mid -= step;
          if (std::abs(step) <= 1e-16 * std::abs(mid)) break;
        }
      }
      reps.push_back(mid);
    }
  }

  std::vector<Complex> inside;
  for (const Complex z : reps) {
    if (std::abs(z) <= 1.0 + 1e-9) inside.push_back(z);
  }
  if (static_cast<int>(inside.size()) < l_hat) {
    throw DegradedEstimateError("fewer than l_hat root-MUSIC roots inside the unit circle");
  }
  std::stable_sort(inside.begin(), inside.end(), [](Complex a, Complex b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::abs(std::arg(a)) < std::abs(std::arg(b));
  });

  std::vector<double> doas;
  for (int l = 0; l < l_hat; ++l) {
    const double s = std::clamp(std::arg(inside[static_cast<std::size_t>(l)]) / kPi, -1.0, 1.0);
    doas.push_back(rad2deg(std::asin(s)));
  }
  std::sort(doas.begin(), doas.end());
  return doas;
}

double music_spectrum(const CMatrix& q_n, double theta_deg) {
  if (q_n.cols() == 0) return 0.0;
  const CVector a = steering_vector(theta_deg, static_cast<int>(q_n.rows()));
  return (q_n.adjoint() * a).squaredNorm();
}

}  // namespace rootdoa
