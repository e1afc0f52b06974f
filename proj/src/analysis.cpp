#include "besvm/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace besvm {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& input, double tol) {
  if (input.rows() != input.cols()) fail_data("eigendecomposition needs a square matrix");
  const Eigen::Index p = input.rows();
  if (p == 0) fail_data("eigendecomposition of an empty matrix");

  const double max_abs = input.cwiseAbs().maxCoeff();
  const double sym_tol = 1e-9 * std::max(1.0, max_abs);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > sym_tol) {
        fail_data("matrix is not symmetric: |A(i,j)-A(j,i)| = " +
                  std::to_string(std::abs(input(i, j) - input(j, i))) + " at (" +
                  std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  Matrix a = 0.5 * (input + input.transpose());  // fold symmetry round-off
  Matrix v = Matrix::Identity(p, p);
  const double fro = a.norm();
  const double target = tol * fro;

  constexpr int kMaxSweeps = 50;
  bool converged = fro == 0.0 || p == 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Eigen::Index pi = 0; pi < p - 1; ++pi) {
      for (Eigen::Index qi = pi + 1; qi < p; ++qi) {
        const double apq = a(pi, qi);
        if (apq == 0.0) continue;

        // Rotation angle chosen to zero out a(pi, qi); the guarded branch
        // avoids overflow of theta^2 when the diagonal gap is enormous.
        const double theta = (a(qi, qi) - a(pi, pi)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(pi, pi);
        const double aqq = a(qi, qi);
        a(pi, pi) = app - t * apq;
        a(qi, qi) = aqq + t * apq;
        a(pi, qi) = 0.0;
        a(qi, pi) = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
          if (k == pi || k == qi) continue;
          const double akp = a(k, pi);
          const double akq = a(k, qi);
          a(k, pi) = c * akp - s * akq;
          a(pi, k) = a(k, pi);
          a(k, qi) = s * akp + c * akq;
          a(qi, k) = a(k, qi);
        }
        for (Eigen::Index k = 0; k < p; ++k) {
          const double vkp = v(k, pi);
          const double vkq = v(k, qi);
          v(k, pi) = c * vkp - s * vkq;
          v(k, qi) = s * vkp + c * vkq;
        }
      }
    }
    converged = off_diagonal_norm(a) < target;
  }
  if (!converged) fail_numeric("Jacobi eigensolver did not converge in 50 sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.eigenvalues.resize(p);
  out.eigenvectors.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    out.eigenvalues[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

double spectral_zero_band(const Vector& eigenvalues) {
  return 1e-10 * eigenvalues.cwiseAbs().maxCoeff();
}

}  // namespace

double neg_ratio(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) fail_data("neg_ratio of an empty spectrum");
  const double band = spectral_zero_band(eigenvalues);
  Eigen::Index negatives = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] < -band) ++negatives;
  }
  return static_cast<double>(negatives) / static_cast<double>(eigenvalues.size());
}

double neg_energy(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) fail_data("neg_energy of an empty spectrum");
  const double band = spectral_zero_band(eigenvalues);
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] > band) {
      pos += eigenvalues[i];
    } else if (eigenvalues[i] < -band) {
      neg += -eigenvalues[i];
    }
  }
  if (pos == 0.0) fail_numeric("neg_energy undefined: spectrum has no positive eigenvalue");
  return neg / pos;
}

double pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail_data("pearson_r needs sequences of equal length");
  if (a.size() < 2) fail_data("pearson_r needs at least two points");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) fail_data("pearson_r undefined for a constant sequence");
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

namespace {

double inverse_quadratic_form(double q) {
  if (!(q > 0.0)) {
    fail_numeric("margin undefined: quadratic form is " + std::to_string(q));
  }
  return 1.0 / q;
}

}  // namespace

double margin_k(const Vector& alpha, const Vector& y, const Matrix& k) {
  if (alpha.size() != y.size() || k.rows() != alpha.size() || k.cols() != alpha.size()) {
    fail_data("margin_k dimension mismatch");
  }
  const Vector ya = y.cwiseProduct(alpha);
  return inverse_quadratic_form(ya.dot(k * ya));
}

double margin_be(const Vector& beta, const Vector& y, const Matrix& s_bx) {
  if (beta.size() != y.size() || s_bx.cols() != beta.size()) {
    fail_data("margin_be dimension mismatch");
  }
  const Vector yb = y.cwiseProduct(beta);
  return inverse_quadratic_form((s_bx * yb).squaredNorm());
}

double margin_nystrom(const Vector& alpha, const Vector& y, const Matrix& k_xb,
                      const Matrix& k_bb, const Matrix& k_bx, double tol) {
  if (alpha.size() != y.size() || k_xb.rows() != alpha.size() || k_bx.cols() != alpha.size() ||
      k_xb.cols() != k_bb.rows() || k_bx.rows() != k_bb.cols()) {
    fail_data("margin_nystrom dimension mismatch");
  }
  // Pseudo-inverse of the (symmetric) basis gram: invert eigenvalues whose
  // magnitude clears the cutoff, drop the rest.
  const EigenDecomposition eig = sym_eigen(k_bb);
  const double cutoff = tol * eig.eigenvalues.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (std::abs(eig.eigenvalues[i]) > cutoff) inv[i] = 1.0 / eig.eigenvalues[i];
  }
  const Matrix pinv = eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.transpose();
  const Vector ya = y.cwiseProduct(alpha);
  return inverse_quadratic_form(ya.dot(k_xb * (pinv * (k_bx * ya))));
}

double fit_loglog_slope(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (const ScalingPoint& p : points) {
    mx += std::log(static_cast<double>(p.n));
    my += std::log(p.seconds);
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0.0, sxx = 0.0;
  for (const ScalingPoint& p : points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    sxy += dx * (std::log(p.seconds) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) fail_data("loglog slope needs at least two distinct sizes");
  return sxy / sxx;
}

ScalingReport scaling_bench(const std::vector<std::int64_t>& n_values,
                            const std::function<void(std::int64_t)>& run) {
  ScalingReport report;
  report.loglog_slope = std::numeric_limits<double>::quiet_NaN();
  if (n_values.empty()) return report;

  run(n_values.front());  // warm-up, untimed
  for (std::int64_t n : n_values) {
    const auto start = std::chrono::steady_clock::now();
    run(n);
    const auto stop = std::chrono::steady_clock::now();
    ScalingPoint p;
    p.n = n;
    p.seconds = std::chrono::duration<double>(stop - start).count();
    report.points.push_back(p);
  }
  if (report.points.size() >= 2) report.loglog_slope = fit_loglog_slope(report.points);
  return report;
}

}  // namespace besvm
