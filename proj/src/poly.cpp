#include "rootdoa/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace rootdoa {

ComplexPolynomial::ComplexPolynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

ComplexPolynomial::ComplexPolynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) {
  trim();
}

ComplexPolynomial ComplexPolynomial::constant(Complex c) { return ComplexPolynomial({c}); }

ComplexPolynomial ComplexPolynomial::from_vector(const CVector& v) {
  return ComplexPolynomial(std::vector<Complex>(v.data(), v.data() + v.size()));
}

CVector ComplexPolynomial::to_vector() const {
  return Eigen::Map<const CVector>(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
}

Complex ComplexPolynomial::leading() const {
  if (coeffs_.empty()) throw DomainError("zero polynomial has no leading coefficient");
  return coeffs_.back();
}

ComplexPolynomial ComplexPolynomial::monic() const {
  const Complex lead = leading();
  std::vector<Complex> c(coeffs_);
  for (auto& x : c) x /= lead;
  c.back() = 1.0;
  return ComplexPolynomial(std::move(c));
}

ComplexPolynomial ComplexPolynomial::conj() const {
  std::vector<Complex> c(coeffs_);
  for (auto& x : c) x = std::conj(x);
  return ComplexPolynomial(std::move(c));
}

void ComplexPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return ComplexPolynomial(std::move(c));
}

ComplexPolynomial operator+(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  std::vector<Complex> c(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return ComplexPolynomial(std::move(c));
}

ComplexPolynomial operator-(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  return a + Complex(-1.0) * b;
}

ComplexPolynomial operator*(Complex s, const ComplexPolynomial& p) {
  std::vector<Complex> c(p.coeffs());
  for (auto& x : c) x *= s;
  return ComplexPolynomial(std::move(c));
}

Complex eval(const ComplexPolynomial& p, Complex z) {
  Complex acc{};
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
  return acc;
}

ComplexPolynomial from_roots(std::span<const Complex> roots) {
  std::vector<Complex> c{1.0};
  for (const Complex r : roots) {
    c.push_back(0.0);
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return ComplexPolynomial(std::move(c));
}

namespace {

struct NewtonCorrection {
  Complex ratio;    // p(z) / p'(z)
  bool at_floor;    // |p(z)| is below its rounding-error bound
};

// For |z| > 1 the reversed polynomial is evaluated at 1/z to avoid overflow
// and to keep the rounding bound meaningful for large roots.
NewtonCorrection newton_correction(const std::vector<Complex>& c, Complex z) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int n = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    Complex p = c[n];
    Complex dp{};
    double bound = std::abs(c[n]);
    const double az = std::abs(z);
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[k];
      bound = bound * az + std::abs(c[k]);
    }
    if (std::abs(p) <= 4.0 * eps * bound) return {Complex{}, true};
    return {p / dp, false};
  }
  const Complex y = 1.0 / z;
  const double ay = std::abs(y);
  Complex q = c[0];
  Complex dq{};
  double bound = std::abs(c[0]);
  for (int k = 1; k <= n; ++k) {
    dq = dq * y + q;
    q = q * y + c[k];
    bound = bound * ay + std::abs(c[k]);
  }
  if (std::abs(q) <= 4.0 * eps * bound) return {Complex{}, true};
  return {z / (static_cast<double>(n) - y * dq / q), false};
}

std::vector<Complex> aberth(const std::vector<Complex>& c) {
  constexpr int kMaxIter = 200;
  constexpr double kStepTol = 1e-14;
  const int n = static_cast<int>(c.size()) - 1;

  // Start on a circle whose radius is the geometric mean of the root moduli.
  const double radius = std::pow(std::abs(c[0] / c[n]), 1.0 / n);
  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * kPi * k / n + 0.4;
    // Slight eccentricity breaks symmetry with polynomials in x^m.
    z[k] = radius * Complex(1.0 + 1e-3 * (k % 2), 0.0) * std::polar(1.0, angle);
  }

  std::vector<bool> done(n, false);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const auto [ratio, at_floor] = newton_correction(c, z[i]);
      if (at_floor) {
        done[i] = true;
        continue;
      }
      Complex repulsion{};
      for (int j = 0; j < n; ++j) {
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      }
      const Complex step = ratio / (1.0 - ratio * repulsion);
      z[i] -= step;
      if (std::abs(step) <= kStepTol * std::max(std::abs(z[i]), radius)) {
        done[i] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }
  return z;
}

}  // namespace

std::vector<Complex> roots(const ComplexPolynomial& p) {
  if (p.is_zero()) throw DomainError("roots of the zero polynomial are undefined");
  const auto& all = p.coeffs();
  std::size_t zeros = 0;
  while (all[zeros] == Complex{}) ++zeros;
  std::vector<Complex> out(zeros, Complex{});
  std::vector<Complex> c(all.begin() + static_cast<std::ptrdiff_t>(zeros), all.end());
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) {
    out.push_back(-c[0] / c[1]);
  } else if (n > 1) {
    const auto found = aberth(c);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

CMatrix convolution_matrix(const ComplexPolynomial& p, int n_cols) {
  if (p.is_zero()) throw DomainError("convolution matrix of the zero polynomial");
  if (n_cols < 1) throw DomainError("convolution matrix needs at least one column");
  const int m = p.degree();
  CMatrix b = CMatrix::Zero(m + n_cols, n_cols);
  for (int j = 0; j < n_cols; ++j) {
    for (int i = 0; i <= m; ++i) b(i + j, j) = p[static_cast<std::size_t>(i)];
  }
  return b;
}

PolyDivision divide(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  if (a.degree() < b.degree()) return {ComplexPolynomial{}, a};
  std::vector<Complex> rem(a.coeffs());
  const int db = b.degree();
  std::vector<Complex> quot(static_cast<std::size_t>(a.degree() - db + 1));
  const Complex lead = b.leading();
  for (int k = a.degree(); k >= db; --k) {
    const Complex q = rem[static_cast<std::size_t>(k)] / lead;
    quot[static_cast<std::size_t>(k - db)] = q;
    for (int i = 0; i < db; ++i) {
      rem[static_cast<std::size_t>(k - db + i)] -= q * b[static_cast<std::size_t>(i)];
    }
    // Eliminated by construction.
    rem[static_cast<std::size_t>(k)] = 0.0;
  }
  rem.resize(static_cast<std::size_t>(db));
  return {ComplexPolynomial(std::move(quot)), ComplexPolynomial(std::move(rem))};
}

double poly_norm(const ComplexPolynomial& p) {
  double s = 0.0;
  for (const Complex c : p.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

namespace {

ComplexPolynomial normalized(const ComplexPolynomial& p) {
  return Complex(1.0 / poly_norm(p)) * p;
}

// Drops leading coefficients that are negligible against the whole vector.
ComplexPolynomial trim_relative(const ComplexPolynomial& p, double rel) {
  std::vector<Complex> c(p.coeffs());
  const double scale = poly_norm(p);
  while (!c.empty() && std::abs(c.back()) <= rel * scale) c.pop_back();
  return ComplexPolynomial(std::move(c));
}

}  // namespace

ComplexPolynomial euclid_gcd(const ComplexPolynomial& f, const ComplexPolynomial& g, double tol) {
  if (f.is_zero() || g.is_zero()) throw DomainError("euclid_gcd needs nonzero operands");
  ComplexPolynomial a = normalized(f);
  ComplexPolynomial b = normalized(g);
  if (a.degree() < b.degree()) std::swap(a, b);
  while (true) {
    if (b.degree() == 0) return ComplexPolynomial::constant(1.0);
    ComplexPolynomial r = divide(a, b).remainder;
    if (poly_norm(r) <= tol) return b.monic();
    r = trim_relative(r, tol);
    a = std::move(b);
    b = normalized(r);
  }
}

}  // namespace rootdoa
