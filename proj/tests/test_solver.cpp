#include "besvm/solver.hpp"

#include <doctest.h>

#include <cmath>

#include "besvm/similarity.hpp"
#include "oracles.hpp"

using namespace besvm;
using besvm::testing::gd_squared_hinge;
using besvm::testing::grid_min_primal;
using besvm::testing::svm_primal;

namespace {

// One 1-D sample pair (+v, +1), (-v, -1).
void symmetric_pair(double v, Matrix& x, Vector& y) {
  x.resize(2, 1);
  x << v, -v;
  y.resize(2);
  y << 1, -1;
}

LinearTrainConfig tight_config(double c, LinearLoss loss = LinearLoss::squared_hinge) {
  LinearTrainConfig cfg;
  cfg.c = c;
  cfg.epsilon = 1e-12;
  cfg.loss = loss;
  cfg.max_sweeps = 100000;
  return cfg;
}

// Three well-separated 2-D blobs, ten points each.
void blob_data(Matrix& x, std::vector<int>& labels, std::uint64_t seed) {
  Rng rng(seed);
  const double cx[3] = {0.0, 10.0, 0.0};
  const double cy[3] = {0.0, 0.0, 10.0};
  x.resize(30, 2);
  labels.clear();
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) {
      const Eigen::Index row = c * 10 + i;
      x(row, 0) = cx[c] + 0.3 * rng.gaussian();
      x(row, 1) = cy[c] + 0.3 * rng.gaussian();
      labels.push_back(c);
    }
  }
}

}  // namespace

TEST_CASE("squared hinge closed forms on symmetric 1-D pairs") {
  Matrix x;
  Vector y;
  symmetric_pair(1.0, x, y);

  // Stationarity of 0.5 w^2 + 2C (1-w)^2 puts the optimum at 4C/(1+4C).
  LinearSolution sol = train_linear(x, y, tight_config(1.0));
  CHECK(std::abs(sol.w[0] - 0.8) < 1e-6);

  sol = train_linear(x, y, tight_config(100.0));
  CHECK(std::abs(sol.w[0] - 400.0 / 401.0) < 1e-6);

  symmetric_pair(2.0, x, y);
  sol = train_linear(x, y, tight_config(1.0));
  CHECK(std::abs(sol.w[0] - 8.0 / 17.0) < 1e-6);
}

TEST_CASE("plain hinge closed forms on the symmetric 1-D pair") {
  Matrix x;
  Vector y;
  symmetric_pair(1.0, x, y);

  // For C >= 1/2 the hinge optimum parks exactly on the margin.
  LinearSolution sol = train_linear(x, y, tight_config(1.0, LinearLoss::hinge));
  CHECK(std::abs(sol.w[0] - 1.0) < 1e-6);

  sol = train_linear(x, y, tight_config(0.2, LinearLoss::hinge));
  CHECK(std::abs(sol.w[0] - 0.4) < 1e-6);
}

TEST_CASE("reported objective matches the loss definition recomputed per sample") {
  Rng rng(90);
  Matrix x(8, 3);
  Vector y(8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.gaussian();
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
  }
  const LinearSolution sol = train_linear(x, y, tight_config(1.5));
  CHECK(sol.objective == doctest::Approx(svm_primal(x, y, sol.w, 1.5, true)).epsilon(1e-12));
}

TEST_CASE("coordinate descent matches the gradient descent oracle") {
  for (int trial = 0; trial < 6; ++trial) {
    Rng rng(100 + static_cast<std::uint64_t>(trial));
    const int n = 4 + trial % 5;
    Matrix x(n, 2);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) x(i, j) = rng.gaussian();
      y[i] = i % 2 == 0 ? 1.0 : -1.0;
    }
    const double c = 0.5 + trial * 0.5;
    const LinearSolution sol = train_linear(x, y, tight_config(c));
    const Vector w_ref = gd_squared_hinge(x, y, c);
    const double obj_ref = svm_primal(x, y, w_ref, c, true);
    CHECK(std::abs(sol.objective - obj_ref) <= 1e-6 * std::max(1.0, std::abs(obj_ref)));
  }
}

TEST_CASE("coordinate descent beats an exhaustive weight grid for both losses") {
  for (int trial = 0; trial < 4; ++trial) {
    Rng rng(200 + static_cast<std::uint64_t>(trial));
    const int n = 6;
    Matrix x(n, 2);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) x(i, j) = rng.gaussian();
      y[i] = i % 2 == 0 ? 1.0 : -1.0;
    }
    for (LinearLoss loss : {LinearLoss::squared_hinge, LinearLoss::hinge}) {
      const LinearSolution sol = train_linear(x, y, tight_config(1.0, loss));
      const double grid_best =
          grid_min_primal(x, y, 1.0, loss == LinearLoss::squared_hinge, -2.0, 2.0, 81);
      CHECK(sol.objective <= grid_best + 1e-6);
    }
  }
}

TEST_CASE("solver rejects degenerate label sets") {
  Matrix x(2, 1);
  x << 1, 2;
  Vector y(2);
  y << 1, 1;
  CHECK_THROWS_AS(train_linear(x, y, tight_config(1.0)), Error);
  y << 1, 0.5;
  CHECK_THROWS_AS(train_linear(x, y, tight_config(1.0)), Error);
}

TEST_CASE("bias feature separates data that is offset from the origin") {
  Matrix x(4, 1);
  x << 3.0, 3.5, 1.0, 1.5;
  Vector y(4);
  y << 1, 1, -1, -1;
  LinearTrainConfig cfg = tight_config(100.0);
  cfg.with_bias = true;
  const LinearSolution sol = train_linear(x, y, cfg);
  for (int i = 0; i < 4; ++i) {
    CHECK(y[i] * (sol.w[0] * x(i, 0) + sol.bias) > 0.0);
  }
}

TEST_CASE("one-vs-rest separates three blobs perfectly") {
  Matrix x;
  std::vector<int> labels;
  blob_data(x, labels, 7);
  LinearTrainConfig cfg = tight_config(1.0);
  cfg.with_bias = true;
  const LinearModel model = train_one_vs_rest(x, labels, cfg);
  const std::vector<int> predicted = predict_batch(model, x);
  CHECK(predicted == labels);
}

TEST_CASE("one-vs-rest on two classes agrees with the binary machine's sign") {
  Rng rng(8);
  Matrix x(20, 2);
  std::vector<int> labels;
  Vector y(20);
  for (int i = 0; i < 20; ++i) {
    const int cls = i % 2;
    x(i, 0) = rng.gaussian() + (cls == 0 ? -3.0 : 3.0);
    x(i, 1) = rng.gaussian();
    labels.push_back(cls);
    y[i] = cls == 0 ? 1.0 : -1.0;
  }
  const LinearModel model = train_one_vs_rest(x, labels, tight_config(1.0));
  const LinearSolution binary = train_linear(x, y, tight_config(1.0));
  for (int i = 0; i < 20; ++i) {
    const int from_sign = x.row(i).dot(binary.w) >= 0.0 ? 0 : 1;
    CHECK(predict(model, x.row(i).transpose()).class_id == from_sign);
  }
}

TEST_CASE("one-vs-rest refuses single-class input") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  CHECK_THROWS_AS(train_one_vs_rest(x, {4, 4, 4}, tight_config(1.0)), Error);
}

TEST_CASE("prediction tie-breaks and homogeneity") {
  LinearModel model;
  model.class_ids = {0, 1, 2};
  model.weights = Matrix::Identity(3, 3);
  model.biases = Vector::Zero(3);

  Vector e2 = Vector::Zero(3);
  e2[2] = 1.0;
  CHECK(predict(model, e2).class_id == 2);

  model.weights.setZero();
  CHECK(predict(model, e2).class_id == 0);  // all ties resolve to the lowest id

  model.weights = Matrix::Identity(3, 3);
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Vector v(3);
    for (int j = 0; j < 3; ++j) v[j] = rng.gaussian();
    const int base = predict(model, v).class_id;
    CHECK(predict(model, Vector(2.5 * v)).class_id == base);
    CHECK_THROWS_AS(predict(model, Vector::Zero(4)), Error);
  }
}

TEST_CASE("appending slack-free duplicate rows keeps the optimum") {
  // Closest points sit at +-4; the points at +-8 end up far beyond the
  // margin, so duplicating them adds zero loss and zero gradient at the old
  // optimum and the objective must not move.
  Matrix x(8, 1);
  x << 3.8, 4.0, 4.2, 8.0, -3.8, -4.0, -4.2, -8.0;
  Vector y(8);
  y << 1, 1, 1, 1, -1, -1, -1, -1;
  const LinearSolution before = train_linear(x, y, tight_config(1.0));
  REQUIRE(y[3] * x(3, 0) * before.w[0] > 1.2);

  Matrix x2(10, 1);
  Vector y2(10);
  x2.topRows(8) = x;
  y2.head(8) = y;
  x2(8, 0) = 8.0;
  y2[8] = 1.0;
  x2(9, 0) = -8.0;
  y2[9] = -1.0;
  const LinearSolution after = train_linear(x2, y2, tight_config(1.0));
  CHECK(after.objective == doctest::Approx(before.objective).epsilon(1e-8));
}

TEST_CASE("kernel dual on the frozen identity-kernel pair") {
  Vector y(2);
  y << 1, -1;
  const KernelBinarySolution sol =
      train_kernel_svm_dual(Matrix::Identity(2, 2), y, 10.0, 1e-8);
  CHECK(sol.alpha[0] == doctest::Approx(1.0));
  CHECK(sol.alpha[1] == doctest::Approx(1.0));
  CHECK(std::abs(sol.bias) < 1e-8);
  // Decision value at the first training point.
  const double f1 = sol.alpha[0] * y[0] * 1.0 + sol.alpha[1] * y[1] * 0.0 + sol.bias;
  CHECK(f1 == doctest::Approx(1.0));

  const KernelBinarySolution clipped =
      train_kernel_svm_dual(Matrix::Identity(2, 2), y, 0.5, 1e-8);
  CHECK(clipped.alpha[0] == doctest::Approx(0.5));
  CHECK(clipped.alpha[1] == doctest::Approx(0.5));
}

TEST_CASE("kernel dual rejects one-class data and indefinite kernels") {
  Vector y(2);
  y << 1, 1;
  CHECK_THROWS_AS(train_kernel_svm_dual(Matrix::Identity(2, 2), y, 1.0), Error);

  Matrix indefinite(2, 2);
  indefinite << 0, 1, 1, 0;  // eigenvalues +1 and -1
  y << 1, -1;
  CHECK_THROWS_AS(train_kernel_svm_dual(indefinite, y, 1.0), Error);
}

TEST_CASE("kernel dual satisfies its constraints and closes the duality gap") {
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng(300 + static_cast<std::uint64_t>(trial));
    const int n = 12;
    Matrix feats(n, 3);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 3; ++j) feats(i, j) = rng.gaussian();
      y[i] = i % 2 == 0 ? 1.0 : -1.0;
    }
    const Matrix k = feats * feats.transpose();
    const double c = 1.0 + trial;
    const KernelBinarySolution sol = train_kernel_svm_dual(k, y, c, 1e-10);

    double eq = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(sol.alpha[i] >= -1e-12);
      CHECK(sol.alpha[i] <= c + 1e-12);
      eq += sol.alpha[i] * y[i];
    }
    CHECK(std::abs(eq) < 1e-6);

    // Primal value with hinge loss against the dual value.
    const Vector ya = y.cwiseProduct(sol.alpha);
    const Vector f = k * ya + Vector::Constant(n, sol.bias);
    double hinge = 0.0;
    for (int i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - y[i] * f[i]);
    const double primal = 0.5 * ya.dot(k * ya) + c * hinge;
    CHECK(primal >= sol.objective - 1e-9);
    CHECK(primal - sol.objective <= 1e-6 * std::max(1.0, std::abs(primal)));
  }
}

TEST_CASE("one-vs-one machine counts") {
  Vector y;
  Matrix k = Matrix::Identity(4, 4);
  CHECK(train_one_vs_one(k, {0, 0, 1, 1}, 1.0).machines.size() == 1);

  k = Matrix::Identity(20, 20);
  std::vector<int> ten_classes;
  for (int i = 0; i < 20; ++i) ten_classes.push_back(i / 2);
  CHECK(train_one_vs_one(k, ten_classes, 1.0).machines.size() == 45);
}

TEST_CASE("one-vs-one with rbf separates three blobs") {
  Matrix feats;
  std::vector<int> labels;
  blob_data(feats, labels, 11);
  std::vector<Exemplar> exs;
  for (int i = 0; i < feats.rows(); ++i) exs.emplace_back(Vector(feats.row(i).transpose()));
  const Matrix k = gram(SimilarityMeasure::rbf(0.5), exs, exs).values;
  const KernelModel model = train_one_vs_one(k, labels, 2.0);
  CHECK(predict_kernel(model, k) == labels);
}

TEST_CASE("cross validation is perfect on separable data") {
  Matrix x;
  std::vector<int> labels;
  blob_data(x, labels, 12);
  const FoldSplit folds = split_even_folds(labels.size(), 5);
  const CvResult cv = cross_validate(labels, folds, [&](const std::vector<std::size_t>& train) {
    Matrix tx(static_cast<Eigen::Index>(train.size()), x.cols());
    std::vector<int> tl;
    for (std::size_t r = 0; r < train.size(); ++r) {
      tx.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(train[r]));
      tl.push_back(labels[train[r]]);
    }
    LinearTrainConfig cfg = tight_config(1.0);
    cfg.with_bias = true;
    const LinearModel model = train_one_vs_rest(tx, tl, cfg);
    return [&, model](const std::vector<std::size_t>& test) {
      std::vector<int> out;
      for (std::size_t idx : test) {
        out.push_back(predict(model, x.row(static_cast<Eigen::Index>(idx)).transpose()).class_id);
      }
      return out;
    };
  });
  CHECK(cv.mean_accuracy == doctest::Approx(1.0));
  CHECK(cv.fold_accuracies.size() == 5);
}

TEST_CASE("cross validation hovers near chance on shuffled labels") {
  Rng rng(13);
  const int n = 200;
  Matrix x(n, 2);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.gaussian();
    x(i, 1) = rng.gaussian();
    labels.push_back(i % 2);  // balanced but independent of the features
  }
  const FoldSplit folds = split_even_folds(labels.size(), 10);
  const CvResult cv = cross_validate(labels, folds, [&](const std::vector<std::size_t>& train) {
    Matrix tx(static_cast<Eigen::Index>(train.size()), 2);
    std::vector<int> tl;
    for (std::size_t r = 0; r < train.size(); ++r) {
      tx.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(train[r]));
      tl.push_back(labels[train[r]]);
    }
    LinearTrainConfig cfg;
    cfg.with_bias = true;
    const LinearModel model = train_one_vs_rest(tx, tl, cfg);
    return [&, model](const std::vector<std::size_t>& test) {
      std::vector<int> out;
      for (std::size_t idx : test) {
        out.push_back(predict(model, x.row(static_cast<Eigen::Index>(idx)).transpose()).class_id);
      }
      return out;
    };
  });
  CHECK(cv.mean_accuracy > 0.35);
  CHECK(cv.mean_accuracy < 0.65);
}

TEST_CASE("cross validation rejects empty folds and tiny fold counts") {
  const std::vector<int> labels = {0, 1, 0, 1};
  const FoldSplit with_empty = split_folds(4, {0, 4});
  const auto fit = [](const std::vector<std::size_t>&) -> FoldPredictor {
    return [](const std::vector<std::size_t>& test) {
      return std::vector<int>(test.size(), 0);
    };
  };
  CHECK_THROWS_AS(cross_validate(labels, with_empty, fit), Error);

  FoldSplit one;
  one.fold_count = 1;
  one.fold_assignments = {0, 0, 0, 0};
  CHECK_THROWS_AS(cross_validate(labels, one, fit), Error);
}

TEST_CASE("kernel mixing line search prefers the informative kernel") {
  Rng rng(14);
  const int n = 40;
  Matrix feats(n, 2);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    feats(i, 0) = rng.gaussian() * 0.3 + (cls == 0 ? -2.0 : 2.0);
    feats(i, 1) = rng.gaussian() * 0.3;
    labels.push_back(cls);
  }
  const Matrix k1 = feats * feats.transpose();

  // High-dimensional label-independent noise with norms far above the
  // signal. Any admixture lets the solver memorize the training folds
  // through the noise coordinates, which collapses held-out accuracy, so
  // only the pure informative kernel scores well.
  Matrix z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = rng.gaussian() * 10.0;
  }
  const Matrix k2 = z * z.transpose();

  std::vector<double> grid;
  for (int g = 0; g <= 10; ++g) grid.push_back(g / 10.0);
  REQUIRE(grid.size() == 11);

  const MklResult res = mkl_line_search(k1, k2, labels, 1.0, grid, 5);
  CHECK(res.alpha == doctest::Approx(1.0));
  CHECK(res.accuracy > 0.9);

  // Identical kernels tie everywhere; the smallest grid point wins.
  const MklResult tie = mkl_line_search(k1, k1, labels, 1.0, grid, 5);
  CHECK(tie.alpha == doctest::Approx(0.0));
}
