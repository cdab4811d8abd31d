#include "rootdoa/agcd.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "rootdoa/subspace.hpp"

namespace rootdoa {

namespace {

double power_sum(Complex alpha, std::size_t terms) {
  const double a2 = std::norm(alpha);
  double s = 0.0;
  double p = 1.0;
  for (std::size_t k = 0; k < terms; ++k) {
    s += p;
    p *= a2;
  }
  return s;
}

// Coefficient vector of p with exactly `len` entries (zero padded).
CVector padded(const ComplexPolynomial& p, Eigen::Index len) {
  CVector v = CVector::Zero(len);
  for (std::size_t k = 0; k < p.size() && static_cast<Eigen::Index>(k) < len; ++k) {
    v[static_cast<Eigen::Index>(k)] = p[k];
  }
  return v;
}

CMatrix conv_matrix(const CVector& p, Eigen::Index n_cols) {
  const Eigen::Index m = p.size();
  CMatrix b = CMatrix::Zero(m + n_cols - 1, n_cols);
  for (Eigen::Index j = 0; j < n_cols; ++j) b.col(j).segment(j, m) = p;
  return b;
}

CVector conv(const CVector& a, const CVector& b) { return conv_matrix(a, b.size()) * b; }

CVector pinv_solve(const CMatrix& a, const CVector& rhs, bool* rank_deficient = nullptr) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  if (rank_deficient != nullptr) *rank_deficient = svd.rank() < a.cols();
  return svd.solve(rhs);
}

struct Stacked {
  CVector residual;  // F(z) - b
  CMatrix jacobian;
};

Stacked evaluate(const GcdIterate& z, const CVector& f, const CVector& g, const CVector& r) {
  const Eigen::Index ku = z.u.size();
  const Eigen::Index kv = z.v.size();
  const Eigen::Index kw = z.w.size();
  const Eigen::Index rows = 1 + f.size() + g.size();
  Stacked s{CVector(rows), CMatrix::Zero(rows, ku + kv + kw)};

  s.residual[0] = r.dot(z.u) - 1.0;  // r^H u - 1
  s.residual.segment(1, f.size()) = conv(z.u, z.v) - f;
  s.residual.tail(g.size()) = conv(z.u, z.w) - g;

  s.jacobian.block(0, 0, 1, ku) = r.adjoint();
  s.jacobian.block(1, 0, f.size(), ku) = conv_matrix(z.v, ku);
  s.jacobian.block(1, ku, f.size(), kv) = conv_matrix(z.u, kv);
  s.jacobian.block(1 + f.size(), 0, g.size(), ku) = conv_matrix(z.w, ku);
  s.jacobian.block(1 + f.size(), ku + kv, g.size(), kw) = conv_matrix(z.u, kw);
  return s;
}

void check_pair(const ComplexPolynomial& f, const ComplexPolynomial& g) {
  if (f.is_zero() || g.is_zero()) throw DomainError("GCD operands must be nonzero");
}

GcdSolution constant_solution(const ComplexPolynomial& f, const ComplexPolynomial& g) {
  GcdSolution s;
  s.u = ComplexPolynomial::constant(1.0);
  s.cofactors = {f, g};
  return s;
}

}  // namespace

double epsilon_min(std::span<const ComplexPolynomial> polys, Complex alpha) {
  if (polys.empty()) throw DomainError("epsilon_min needs at least one polynomial");
  const std::size_t terms = polys.front().size();
  double num = 0.0;
  for (const auto& p : polys) {
    if (p.size() != terms) throw DomainError("epsilon_min polynomials must share a degree");
    num += std::norm(eval(p, alpha));
  }
  return num / power_sum(alpha, terms);
}

double theorem1_gap(const CMatrix& q_n, Complex z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) throw DomainError("theorem1_gap needs |z| = 1");
  const auto n = q_n.rows();
  if (q_n.cols() == 0) return 0.0;
  double num = 0.0;
  CVector d(n);
  Complex zk = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    d[k] = zk;
    zk *= z;
  }
  for (Eigen::Index c = 0; c < q_n.cols(); ++c) {
    // Evaluate on the padded coefficient list so trailing zeros keep N terms.
    const CVector q = q_n.col(c);
    Complex acc{};
    for (Eigen::Index k = n; k-- > 0;) acc = acc * z + std::conj(q[k]);
    num += std::norm(acc);
  }
  const double eps = num / power_sum(z, static_cast<std::size_t>(n));
  const double music = (q_n.adjoint() * d).squaredNorm() / static_cast<double>(n);
  return std::abs(eps - music);
}

NearestPerturbation nearest_perturbations(const ComplexPolynomial& f, const ComplexPolynomial& g,
                                          Complex alpha) {
  if (f.size() != g.size()) throw DomainError("nearest_perturbations needs equal degrees");
  const auto terms = static_cast<Eigen::Index>(f.size());
  const double denom = power_sum(alpha, f.size());
  const Complex fa = eval(f, alpha) / denom;
  const Complex ga = eval(g, alpha) / denom;
  NearestPerturbation out{CVector(terms), CVector(terms)};
  Complex conj_pow = 1.0;
  for (Eigen::Index i = 0; i < terms; ++i) {
    out.lambda[i] = -fa * conj_pow;
    out.mu[i] = -ga * conj_pow;
    conj_pow *= std::conj(alpha);
  }
  return out;
}

SylvesterMatrix sylvester(const ComplexPolynomial& f, const ComplexPolynomial& g, int k) {
  check_pair(f, g);
  const int m = f.degree();
  const int n = g.degree();
  if (k < 1 || k > std::min(m, n)) throw DomainError("Sylvester degree k out of range");
  const CMatrix bf = convolution_matrix(f, n - k + 1);
  const CMatrix bg = convolution_matrix(g, m - k + 1);
  SylvesterMatrix s{CMatrix(bf.rows(), bf.cols() + bg.cols()), k, m, n};
  s.data << bf, bg;
  return s;
}

double smallest_singular(const SylvesterMatrix& s) {
  Eigen::JacobiSVD<CMatrix> svd(s.data);
  return svd.singularValues().minCoeff();
}

KernelCofactors cofactors_from_kernel(const SylvesterMatrix& s, double ambiguity_tol) {
  Eigen::JacobiSVD<CMatrix> svd(s.data, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const Eigen::Index cols = s.data.cols();
  // Wide matrices have an exact kernel beyond the listed singular values.
  const Eigen::Index last = cols - 1;
  CVector kernel = svd.matrixV().col(last);
  kernel /= kernel.norm();

  KernelCofactors out;
  out.sigma_min = s.data.rows() >= cols ? sv[last] : 0.0;
  const double threshold = ambiguity_tol * std::max(sv[0], 1e-300);
  const Eigen::Index zero_count =
      (sv.array() <= threshold).count() + std::max<Eigen::Index>(0, cols - sv.size());
  out.ambiguous = zero_count > 1;

  const Eigen::Index nw = s.n - s.k + 1;
  const Eigen::Index nv = s.m - s.k + 1;
  out.w = ComplexPolynomial::from_vector(kernel.head(nw));
  out.v = ComplexPolynomial::from_vector(-kernel.tail(nv));
  return out;
}

LinearInit gcd_linear_init(const ComplexPolynomial& f, const ComplexPolynomial& g,
                           const ComplexPolynomial& v, const ComplexPolynomial& w,
                           const CVector& r) {
  check_pair(f, g);
  const Eigen::Index ku = r.size();
  const int k = static_cast<int>(ku) - 1;
  if (k < 0 || k > std::min(f.degree(), g.degree())) {
    throw DomainError("scaling vector length does not match a feasible GCD degree");
  }
  const Eigen::Index nf = static_cast<Eigen::Index>(f.size());
  const Eigen::Index ng = static_cast<Eigen::Index>(g.size());
  const CVector vv = padded(v, nf - k);
  const CVector wv = padded(w, ng - k);

  CMatrix a(1 + nf + ng, ku);
  a.row(0) = r.adjoint();
  a.block(1, 0, nf, ku) = conv_matrix(vv, ku);
  a.block(1 + nf, 0, ng, ku) = conv_matrix(wv, ku);
  CVector rhs(1 + nf + ng);
  rhs[0] = 1.0;
  rhs.segment(1, nf) = f.to_vector();
  rhs.tail(ng) = g.to_vector();

  LinearInit out;
  const CVector u = pinv_solve(a, rhs, &out.regularized);
  out.u = ComplexPolynomial::from_vector(u);
  return out;
}

std::vector<Complex> GcdSolution::gcd_roots() const {
  if (u.degree() < 1) return {};
  return roots(u);
}

GcdSolution gauss_newton_refine(const GcdIterate& z0, const ComplexPolynomial& f,
                                const ComplexPolynomial& g, const CVector& r, double tol,
                                int max_iter) {
  check_pair(f, g);
  if (!(tol > 0.0)) throw DomainError("Gauss-Newton tolerance must be positive");
  if (max_iter < 1) throw DomainError("Gauss-Newton needs max_iter >= 1");
  const Eigen::Index ku = z0.u.size();
  if (r.size() != ku || z0.v.size() + ku - 1 != static_cast<Eigen::Index>(f.size()) ||
      z0.w.size() + ku - 1 != static_cast<Eigen::Index>(g.size())) {
    throw DomainError("Gauss-Newton iterate sizes do not match the inputs");
  }
  const CVector fv = f.to_vector();
  const CVector gv = g.to_vector();

  GcdIterate z = z0;
  GcdSolution sol;
  int rising = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Stacked s = evaluate(z, fv, gv, r);
    const double res = s.residual.norm();
    if (!sol.residual_history.empty() && res > sol.residual_history.back()) {
      if (++rising >= 3) throw DivergenceError("Gauss-Newton residual grew 3 times", z, res);
    } else {
      rising = 0;
    }
    sol.residual_history.push_back(res);
    const CVector step = pinv_solve(s.jacobian, s.residual);
    if (!step.allFinite()) throw DivergenceError("Gauss-Newton step is not finite", z, res);
    z.u -= step.head(ku);
    z.v -= step.segment(ku, z.v.size());
    z.w -= step.tail(z.w.size());
    sol.iterations = iter;
    if (step.norm() <= tol) break;
  }

  const Stacked s = evaluate(z, fv, gv, r);
  sol.residual_history.push_back(s.residual.norm());
  sol.certificate_residual = pinv_solve(s.jacobian, s.residual).norm();
  const CVector df = conv(z.u, z.v) - fv;
  const CVector dg = conv(z.u, z.w) - gv;
  sol.epsilon = std::sqrt(df.squaredNorm() + dg.squaredNorm());

  const Complex lead = z.u[ku - 1];
  if (std::abs(lead) > 0.0) {
    z.u /= lead;
    z.u[ku - 1] = 1.0;
    z.v *= lead;
    z.w *= lead;
  }
  sol.u = ComplexPolynomial::from_vector(z.u);
  sol.cofactors = {ComplexPolynomial::from_vector(z.v), ComplexPolynomial::from_vector(z.w)};
  return sol;
}

GcdSolution uvgcd(const ComplexPolynomial& f, const ComplexPolynomial& g, double zeta,
                  const GcdOptions& options) {
  check_pair(f, g);
  if (!(zeta > 0.0)) throw DomainError("uvgcd needs zeta > 0");
  const int n = std::max(f.degree(), g.degree());
  const int top = std::min(f.degree(), g.degree());
  const auto nf = static_cast<Eigen::Index>(f.size());
  const auto ng = static_cast<Eigen::Index>(g.size());

  for (int degree = top; degree >= 1; --degree) {
    const SylvesterMatrix s = sylvester(f, g, degree);
    const int k = n - degree;
    const double gate = zeta * std::sqrt(std::max(2.0 * k - 2.0, 1.0));
    if (!(smallest_singular(s) < gate)) continue;

    const KernelCofactors cof = cofactors_from_kernel(s);
    const Eigen::Index ku = degree + 1;
    const CVector vv = padded(cof.v, nf - degree);
    const CVector wv = padded(cof.w, ng - degree);

    // Unnormalized least-squares GCD gives the scaling vector r = u / ||u||^2.
    CMatrix a(nf + ng, ku);
    a.topRows(nf) = conv_matrix(vv, ku);
    a.bottomRows(ng) = conv_matrix(wv, ku);
    CVector rhs(nf + ng);
    rhs << f.to_vector(), g.to_vector();
    const CVector u_pre = pinv_solve(a, rhs);
    if (!(u_pre.norm() > 0.0)) continue;
    const CVector r = u_pre / u_pre.squaredNorm();

    const LinearInit init = gcd_linear_init(f, g, cof.v, cof.w, r);
    const GcdIterate z0{padded(init.u, ku), vv, wv};
    try {
      GcdSolution sol = gauss_newton_refine(z0, f, g, r, options.tol, options.max_iter);
      if (sol.within(zeta)) return sol;
    } catch (const DivergenceError&) {
      // Try the next lower degree.
    }
  }
  return constant_solution(f, g);
}

double zeta_from_uncertainty(double delta_theta_deg, int gcd_degree, double u_norm) {
  if (delta_theta_deg < 0.0) throw DomainError("angular uncertainty must be nonnegative");
  if (gcd_degree < 0) throw DomainError("GCD degree must be nonnegative");
  const double delta = std::abs(1.0 - std::polar(1.0, -kPi * deg2rad(delta_theta_deg)));
  return u_norm * (std::pow(1.0 + delta, gcd_degree) - 1.0);
}

GcdSolution certify(const ComplexPolynomial& q_i, const ComplexPolynomial& q_j,
                    const ComplexPolynomial& u0, const GcdOptions& options) {
  check_pair(q_i, q_j);
  const int k = u0.degree();
  if (k < 1) throw DomainError("certify needs an initial GCD of degree >= 1");
  if (k > std::min(q_i.degree(), q_j.degree())) {
    throw DomainError("initial GCD degree exceeds the operand degrees");
  }
  const CVector u = u0.to_vector();
  const auto ni = static_cast<Eigen::Index>(q_i.size());
  const auto nj = static_cast<Eigen::Index>(q_j.size());
  const CVector v = pinv_solve(conv_matrix(u, ni - k), q_i.to_vector());
  const CVector w = pinv_solve(conv_matrix(u, nj - k), q_j.to_vector());
  const CVector r = u / u.squaredNorm();
  return gauss_newton_refine({u, v, w}, q_i, q_j, r, options.tol, options.max_iter);
}

}  // namespace rootdoa
