#pragma once

#include <span>
#include <vector>

#include "rootdoa/common.hpp"
#include "rootdoa/model.hpp"
#include "rootdoa/poly.hpp"

namespace rootdoa {

/// Eigenpairs of a Hermitian matrix, eigenvalues strictly descending
/// (ties kept in a deterministic order), column i paired with eigenvalue i.
struct SubspaceDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Throws DomainError when r deviates from Hermitian by more than 1e-10
/// relative (Frobenius).
SubspaceDecomposition hermitian_eig(const CovarianceMatrix& r);

/// Last N - l_hat eigenvectors (the smallest eigenvalues).
CMatrix noise_subspace(const SubspaceDecomposition& d, int l_hat);

/// The polynomial whose coefficients are the conjugated entries of an
/// eigenvector. With this convention a vector orthogonal to a(theta)
/// vanishes at exp(j*pi*sin(theta)), and
/// d^H(z) q q^H d(z) == |p(z)|^2 for d(z) = [1, z, ..., z^{N-1}].
ComplexPolynomial eigenvector_polynomial(const CVector& q);

/// Per-candidate scores for k = 0..N-1 sources (Wax-Kailath forms).
struct OrderScores {
  std::vector<double> aic;
  std::vector<double> mdl;
};

OrderScores order_scores(std::span<const double> eigenvalues, int t_snapshots);
int aic_order(std::span<const double> eigenvalues, int t_snapshots);
int mdl_order(std::span<const double> eigenvalues, int t_snapshots);

/// Coefficients of z^{N-1} * d^H(z) C d(z), C = Q_n Q_n^H: entry j holds the
/// sum of the (j - N + 1)-th diagonal of C. Degree 2(N-1).
ComplexPolynomial root_music_polynomial(const CMatrix& q_n);

/// Root-MUSIC DOAs in degrees, sorted ascending. Roots are paired as
/// (z, 1/conj(z)); from each pair the representative inside the circle is
/// kept and the l_hat representatives nearest the unit circle are mapped
/// through asin(arg(z)/pi).
std::vector<double> root_music(const CMatrix& q_n, int l_hat);

/// J(theta) = ||Q_n^H a(theta)||^2.
double music_spectrum(const CMatrix& q_n, double theta_deg);

}  // namespace rootdoa
