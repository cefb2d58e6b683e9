#pragma once

#include "ucadoa/cmat.hpp"
#include "ucadoa/types.hpp"

namespace ucadoa {

/// Regularized lower incomplete gamma P(a, x); series for x < a+1,
/// continued fraction otherwise.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Central chi-square CDF with `dof` degrees of freedom.
double chi2_cdf(int dof, double u);

/// Inverse of chi2_cdf in its second argument, |F(u) - p| <= 1e-10.
/// Throws EstimationError on non-convergence.
double chi2_cdf_inverse(int dof, double p);

/// Survival function 1 - CDF of the non-central chi-square with `dof`
/// degrees of freedom and non-centrality `delta`, via the Poisson-weighted
/// series over central chi-square tails.
double noncentral_chi2_sf(int dof, double delta, double u);

/// Standard normal tail Q(x) = P(Z > x).
double gaussian_q(double x);

/// Inverse of gaussian_q, 0 < p < 1.
double gaussian_q_inverse(double p);

struct EigenDecomposition {
  std::vector<double> eigenvalues;            // descending
  std::vector<std::vector<cplx>> eigenvectors;  // unit norm, matching order
};

/// Full eigendecomposition of a small complex Hermitian matrix by cyclic
/// Jacobi rotations. The input is symmetrized as (A + A^H)/2 first.
/// Throws EstimationError if the sweep cap is hit.
EigenDecomposition hermitian_eig(const CMat& a);

/// The `keep` right singular vectors of smallest singular value, orthonormal.
std::vector<std::vector<cplx>> right_null_space(const CMat& a, int keep);

}  // namespace ucadoa
