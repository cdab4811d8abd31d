#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rootdoa/common.hpp"
#include "rootdoa/poly.hpp"

namespace rootdoa {

// ---------------------------------------------------------------------------
// Nearest common root of a polynomial system.
// ---------------------------------------------------------------------------

/// Minimal squared coefficient perturbation that makes every polynomial
/// vanish at alpha: sum_l |f_l(alpha)|^2 / sum_{k<N} |alpha|^{2k}, where N
/// is the common coefficient count. Throws DomainError on an empty list or
/// mismatched sizes.
double epsilon_min(std::span<const ComplexPolynomial> polys, Complex alpha);

/// |epsilon_min(columns of q_n, z) - (1/N) d^H(z) Q_n Q_n^H d(z)| for z on
/// the unit circle (|z| - 1 beyond 1e-12 throws DomainError). Columns are
/// read through eigenvector_polynomial.
double theorem1_gap(const CMatrix& q_n, Complex z);

/// Optimal coefficient perturbations moving a common root of f and g to alpha.
struct NearestPerturbation {
  CVector lambda;  // added to f
  CVector mu;      // added to g
};

NearestPerturbation nearest_perturbations(const ComplexPolynomial& f, const ComplexPolynomial& g,
                                          Complex alpha);

// ---------------------------------------------------------------------------
// Sylvester matrices and the uvGCD machinery.
// ---------------------------------------------------------------------------

/// [B_{n-k}(f) | B_{m-k}(g)] for m = deg f, n = deg g and candidate GCD
/// degree k. Size (m + n - k + 1) x (m + n - 2k + 2).
struct SylvesterMatrix {
  CMatrix data;
  int k = 0;
  int m = 0;
  int n = 0;
};

SylvesterMatrix sylvester(const ComplexPolynomial& f, const ComplexPolynomial& g, int k);

/// Smallest singular value (Jacobi SVD).
double smallest_singular(const SylvesterMatrix& s);

struct KernelCofactors {
  ComplexPolynomial w;  // cofactor of g, n - k + 1 coefficients
  ComplexPolynomial v;  // cofactor of f, m - k + 1 coefficients
  double sigma_min = 0.0;
  bool ambiguous = false;  // a second singular value is also below the threshold
};

/// Right singular vector of the smallest singular value, split as [w; -v]
/// and normalized so ||(w, v)|| = 1. `ambiguity_tol` is relative to the
/// largest singular value.
KernelCofactors cofactors_from_kernel(const SylvesterMatrix& s, double ambiguity_tol = 1e-8);

struct LinearInit {
  ComplexPolynomial u;
  bool regularized = false;  // the stacked system was rank deficient
};

/// Least-squares u of [r^H; B(v); B(w)] u = [1; f; g]; deg u = r.size() - 1.
LinearInit gcd_linear_init(const ComplexPolynomial& f, const ComplexPolynomial& g,
                           const ComplexPolynomial& v, const ComplexPolynomial& w,
                           const CVector& r);

/// Stacked Gauss-Newton unknowns with fixed lengths k+1, m-k+1, n-k+1.
struct GcdIterate {
  CVector u;
  CVector v;
  CVector w;
};

struct GcdSolution {
  ComplexPolynomial u;                        // monic approximate GCD
  std::vector<ComplexPolynomial> cofactors;   // {v, w}: f ~ u v, g ~ u w
  double epsilon = 0.0;                       // ||(u v, u w) - (f, g)||_2
  double certificate_residual = 0.0;          // ||J^+ (F(z) - b)|| at exit
  int iterations = 0;
  std::vector<double> residual_history;       // ||F(z_j) - b||, j = 0..iterations

  int degree() const { return u.degree(); }
  std::vector<Complex> gcd_roots() const;
  bool within(double zeta) const { return epsilon <= zeta; }
};

/// Residual ||F(z) - b|| grew on three consecutive iterations.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, GcdIterate last, double residual)
      : std::runtime_error(what), last_iterate(std::move(last)), last_residual(residual) {}

  GcdIterate last_iterate;
  double last_residual;
};

/// z_j = z_{j-1} - J(z_{j-1})^+ (F(z_{j-1}) - b) until ||step|| <= tol or
/// max_iter. The pseudo-inverse drops singular values below 1e-12 sigma_max.
GcdSolution gauss_newton_refine(const GcdIterate& z0, const ComplexPolynomial& f,
                                const ComplexPolynomial& g, const CVector& r, double tol,
                                int max_iter);

struct GcdOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Top-down numerical GCD: candidate degrees from min(deg f, deg g) down to
/// 1; a degree is tried when the Sylvester gate sigma_min <
/// zeta * sqrt(max(2k - 2, 1)) passes (k = n - degree) and accepted when the
/// refined perturbation is <= zeta. Falls back to the constant GCD.
GcdSolution uvgcd(const ComplexPolynomial& f, const ComplexPolynomial& g, double zeta,
                  const GcdOptions& options = {});

/// zeta = u_norm * ((1 + delta)^gcd_degree - 1), delta = |1 - exp(-j*pi*dtheta)|.
double zeta_from_uncertainty(double delta_theta_deg, int gcd_degree, double u_norm);

/// Refines an initial GCD estimate u0 for the pair (q_i, q_j): least-squares
/// cofactors from B(u0) v = q, then Gauss-Newton with r = u0 / ||u0||^2.
GcdSolution certify(const ComplexPolynomial& q_i, const ComplexPolynomial& q_j,
                    const ComplexPolynomial& u0, const GcdOptions& options = {});

}  // namespace rootdoa
