#include "besvm/analysis.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace besvm;

namespace {

Matrix random_symmetric(int p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      a(i, j) = rng.gaussian();
      a(j, i) = a(i, j);
    }
  }
  return a;
}

Matrix random_psd(int p, int rank, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(p, rank);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < rank; ++j) x(i, j) = rng.gaussian();
  }
  return x * x.transpose();
}

}  // namespace

TEST_CASE("jacobi eigensolver on the identity") {
  const EigenDecomposition e = sym_eigen(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(e.eigenvalues[i] == doctest::Approx(1.0));
  CHECK((e.eigenvectors * e.eigenvectors.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("jacobi eigensolver on the 2x2 exchange matrix") {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const EigenDecomposition e = sym_eigen(a);
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(-1.0));
}

TEST_CASE("jacobi reconstruction, orthogonality, trace and determinant") {
  const Matrix a = random_symmetric(8, 5);
  const EigenDecomposition e = sym_eigen(a);

  const Matrix recon =
      e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  CHECK((recon - a).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(8, 8)).norm() < 1e-9);
  CHECK(e.eigenvalues.sum() == doctest::Approx(a.trace()).epsilon(1e-9));

  double prod = 1.0;
  for (int i = 0; i < 8; ++i) prod *= e.eigenvalues[i];
  CHECK(prod == doctest::Approx(a.determinant()).epsilon(1e-6));

  for (int i = 1; i < 8; ++i) CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
}

TEST_CASE("jacobi agrees with an independent solver on random matrices") {
  for (int trial = 0; trial < 8; ++trial) {
    const int p = 3 + trial;
    const Matrix a = random_symmetric(p, 40 + static_cast<std::uint64_t>(trial));
    const EigenDecomposition mine = sym_eigen(a);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
    // Reference reports ascending order.
    for (int i = 0; i < p; ++i) {
      CHECK(mine.eigenvalues[i] == doctest::Approx(ref.eigenvalues()[p - 1 - i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("jacobi handles the 1x1 case and rejects bad input") {
  Matrix a(1, 1);
  a << -2.5;
  const EigenDecomposition e = sym_eigen(a);
  CHECK(e.eigenvalues[0] == doctest::Approx(-2.5));
  CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0));

  Matrix bad(2, 2);
  bad << 0, 1, 2, 0;
  CHECK_THROWS_AS(sym_eigen(bad), Error);
  CHECK_THROWS_AS(sym_eigen(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("negative eigenvalue ratio and energy on a frozen spectrum") {
  Vector ev(2);
  ev << 3, -1;
  CHECK(neg_ratio(ev) == doctest::Approx(0.5));
  CHECK(neg_energy(ev) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("psd spectra report zero negativity even with round-off") {
  Vector ev(4);
  ev << 5.0, 1.0, 1e-14, -1e-14;  // -1e-14 is inside the zero band of max 5
  CHECK(neg_ratio(ev) == 0.0);
  CHECK(neg_energy(ev) == 0.0);
}

TEST_CASE("neg_energy requires positive mass") {
  Vector ev(1);
  ev << -1.0;
  CHECK_THROWS_AS(neg_energy(ev), Error);
}

TEST_CASE("pearson correlation on exact linear relations") {
  CHECK(pearson_r({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson_r({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(pearson_r({1, 2, 3}, {5, 5, 5}), Error);
  CHECK_THROWS_AS(pearson_r({1, 2}, {1, 2, 3}), Error);
}

TEST_CASE("margin formulas on frozen singletons") {
  Vector one(1), y(1);
  one << 1;
  y << 1;
  Matrix k(1, 1);
  k << 4;
  CHECK(margin_k(one, y, k) == doctest::Approx(0.25));

  Matrix s(1, 1);
  s << 2;
  CHECK(margin_be(one, y, s) == doctest::Approx(0.25));

  Matrix neg(1, 1);
  neg << -4;
  CHECK_THROWS_AS(margin_k(one, y, neg), Error);
}

TEST_CASE("full-basis margin identity: basis map margin equals squared-kernel margin") {
  const int n = 6;
  const Matrix k = random_psd(n, n, 77);
  Rng rng(78);
  Vector beta(n), y(n);
  for (int i = 0; i < n; ++i) {
    beta[i] = std::abs(rng.gaussian());
    y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  const double be = margin_be(beta, y, k);           // S_BX = K when the basis is the full set
  const double kk = margin_k(beta, y, (k * k));      // same quantity through K^2
  CHECK(be == doctest::Approx(kk).epsilon(1e-10));
}

TEST_CASE("nystrom margin with the full basis collapses to the kernel margin") {
  const int n = 5;
  const Matrix k = random_psd(n, n, 79);
  Rng rng(80);
  Vector alpha(n), y(n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = std::abs(rng.gaussian());
    y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  CHECK(margin_nystrom(alpha, y, k, k, k) == doctest::Approx(margin_k(alpha, y, k)).epsilon(1e-8));
}

TEST_CASE("squaring a psd matrix squares its eigenvalues on the same vectors") {
  const Matrix k = random_psd(7, 7, 81);
  const EigenDecomposition e = sym_eigen(k);
  const Matrix k2 = k * k;
  for (int i = 0; i < 7; ++i) {
    const Vector v = e.eigenvectors.col(i);
    const double lam = e.eigenvalues[i];
    CHECK((k2 * v - lam * lam * v).norm() < 1e-8);
  }
}

TEST_CASE("loglog slope recovers known growth exponents") {
  std::vector<ScalingPoint> linear_points, quadratic_points;
  for (std::int64_t n : {1000, 2000, 4000}) {
    linear_points.push_back({n, 0.003 * static_cast<double>(n)});
    quadratic_points.push_back({n, 1e-6 * static_cast<double>(n) * static_cast<double>(n)});
  }
  CHECK(fit_loglog_slope(linear_points) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_loglog_slope(quadratic_points) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::isnan(fit_loglog_slope({})));
}

TEST_CASE("scaling bench runs the workload once per size after a warm-up") {
  std::vector<std::int64_t> seen;
  const ScalingReport report =
      scaling_bench({10, 20}, [&seen](std::int64_t n) { seen.push_back(n); });
  CHECK(seen == std::vector<std::int64_t>{10, 10, 20});
  REQUIRE(report.points.size() == 2);
  CHECK(report.points[0].n == 10);
  CHECK(report.points[1].n == 20);
  CHECK(report.points[0].seconds >= 0.0);

  const ScalingReport empty = scaling_bench({}, [](std::int64_t) {});
  CHECK(empty.points.empty());
}
