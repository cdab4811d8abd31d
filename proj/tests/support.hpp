#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rootdoa/common.hpp"
#include "rootdoa/poly.hpp"

namespace testing {

using rootdoa::CMatrix;
using rootdoa::Complex;
using rootdoa::CVector;

inline Complex random_complex(std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  return {nd(gen), nd(gen)};
}

inline Complex random_in_disk(std::mt19937_64& gen, double radius = 1.0) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  return std::polar(radius * std::sqrt(ud(gen)), 2.0 * rootdoa::kPi * ud(gen));
}

inline Complex random_on_circle(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ud(-rootdoa::kPi, rootdoa::kPi);
  return std::polar(1.0, ud(gen));
}

inline rootdoa::ComplexPolynomial random_poly(std::mt19937_64& gen, int degree) {
  std::vector<Complex> c;
  for (int k = 0; k <= degree; ++k) c.push_back(random_complex(gen));
  return rootdoa::ComplexPolynomial(c);
}

/// Roots drawn in the disk with a minimum pairwise separation.
inline std::vector<Complex> separated_roots(std::mt19937_64& gen, int count, double sep,
                                            double radius = 1.0) {
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    const Complex z = random_in_disk(gen, radius);
    bool ok = true;
    for (Complex w : out) ok = ok && std::abs(z - w) >= sep;
    if (ok) out.push_back(z);
  }
  return out;
}

/// Max distance under the best matching, found by trying every permutation.
/// Only meant for small sets.
inline double matching_error(std::vector<Complex> a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(a.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  if (a.size() > 8) {
    // Greedy nearest matching for larger sets.
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (Complex z : a) {
      double d = std::numeric_limits<double>::infinity();
      std::size_t pick = 0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!used[j] && std::abs(z - b[j]) < d) {
          d = std::abs(z - b[j]);
          pick = j;
        }
      }
      used[pick] = true;
      worst = std::max(worst, d);
    }
    return worst;
  }
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[perm[i]] - b[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Random matrix with orthonormal columns (Gram-Schmidt on Gaussian columns).
inline CMatrix random_orthonormal(std::mt19937_64& gen, int rows, int cols) {
  CMatrix q(rows, cols);
  for (int c = 0; c < cols; ++c) {
    CVector v(rows);
    for (int r = 0; r < rows; ++r) v[r] = random_complex(gen);
    for (int p = 0; p < c; ++p) v -= q.col(p) * q.col(p).dot(v);
    for (int p = 0; p < c; ++p) v -= q.col(p) * q.col(p).dot(v);
    q.col(c) = v / v.norm();
  }
  return q;
}

inline Complex electrical(double theta_deg) {
  return std::polar(1.0, rootdoa::kPi * std::sin(rootdoa::deg2rad(theta_deg)));
}

}  // namespace testing
