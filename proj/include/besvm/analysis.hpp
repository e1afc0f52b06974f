#pragma once

#include "besvm/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace besvm {

struct EigenDecomposition {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // one column per eigenvalue, orthonormal
};

// Cyclic Jacobi decomposition of a symmetric matrix. Stops once the
// off-diagonal Frobenius mass drops below tol times the Frobenius norm of
// the input; gives up after 50 sweeps. The input must be symmetric to about
// 1e-9 (symmetrize asymmetric similarity grams first).
EigenDecomposition sym_eigen(const Matrix& a, double tol = 1e-12);

// Fraction of eigenvalues below zero, and the absolute negative eigenvalue
// mass relative to the positive mass. Eigenvalues within 1e-10 of the
// largest magnitude are treated as zero so PSD round-off reports 0.
double neg_ratio(const Vector& eigenvalues);
double neg_energy(const Vector& eigenvalues);

double pearson_r(const std::vector<double>& a, const std::vector<double>& b);

// Margin estimates for a trained machine with dual coefficients alpha/beta
// and labels y in {-1,+1}. All three are inverse quadratic forms; the form
// must be positive or the margin is undefined.
double margin_k(const Vector& alpha, const Vector& y, const Matrix& k);
double margin_be(const Vector& beta, const Vector& y, const Matrix& s_bx);
double margin_nystrom(const Vector& alpha, const Vector& y, const Matrix& k_xb,
                      const Matrix& k_bb, const Matrix& k_bx, double tol = 1e-10);

struct ScalingPoint {
  std::int64_t n = 0;
  double seconds = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double loglog_slope = 0.0;  // NaN when fewer than two points
};

// Least-squares slope of log(seconds) against log(n).
double fit_loglog_slope(const std::vector<ScalingPoint>& points);

// Times run(n) for each n after one warm-up call at the smallest size.
ScalingReport scaling_bench(const std::vector<std::int64_t>& n_values,
                            const std::function<void(std::int64_t)>& run);

}  // namespace besvm
