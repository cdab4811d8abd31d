#pragma once

#include <span>
#include <vector>

#include "rootdoa/common.hpp"

namespace rootdoa {

/// Univariate polynomial over C, coefficients in ascending powers:
/// coeffs()[k] multiplies x^k. The empty coefficient vector is the zero
/// polynomial; otherwise the last coefficient is nonzero.
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<Complex> coeffs);
  ComplexPolynomial(std::initializer_list<Complex> coeffs);

  static ComplexPolynomial constant(Complex c);
  static ComplexPolynomial from_vector(const CVector& v);

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  CVector to_vector() const;

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  Complex operator[](std::size_t k) const { return coeffs_[k]; }
  Complex leading() const;

  ComplexPolynomial monic() const;
  ComplexPolynomial conj() const;

  friend ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator+(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator-(const ComplexPolynomial& a, const ComplexPolynomial& b);
  friend ComplexPolynomial operator*(Complex c, const ComplexPolynomial& p);

  bool operator==(const ComplexPolynomial&) const = default;

 private:
  void trim();
  std::vector<Complex> coeffs_;
};

/// Horner evaluation.
Complex eval(const ComplexPolynomial& p, Complex z);

/// Monic prod (x - r_i); the empty list gives the constant 1.
ComplexPolynomial from_roots(std::span<const Complex> roots);

/// All roots with multiplicity via Aberth-Ehrlich simultaneous iteration.
/// Zero polynomial throws DomainError; constants have no roots.
std::vector<Complex> roots(const ComplexPolynomial& p);

/// (deg p + n_cols) x n_cols banded Toeplitz matrix with B * u == coeffs(p * u).
CMatrix convolution_matrix(const ComplexPolynomial& p, int n_cols);

struct PolyDivision {
  ComplexPolynomial quotient;
  ComplexPolynomial remainder;
};

PolyDivision divide(const ComplexPolynomial& a, const ComplexPolynomial& b);

/// Monic GCD by the Euclidean remainder sequence. Each step works on
/// unit-norm operands; a remainder counts as zero once its norm drops
/// to tol. A degree-0 result is returned as the constant 1.
ComplexPolynomial euclid_gcd(const ComplexPolynomial& f, const ComplexPolynomial& g,
                             double tol);

/// 2-norm of the coefficient vector.
double poly_norm(const ComplexPolynomial& p);

}  // namespace rootdoa
