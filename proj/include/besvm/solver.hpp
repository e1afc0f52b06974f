#pragma once

#include "besvm/core.hpp"
#include "besvm/datasets.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace besvm {

enum class LinearLoss { squared_hinge, hinge };

struct LinearTrainConfig {
  double c = 1.0;
  double epsilon = 1e-6;  // relative duality-gap stopping threshold
  LinearLoss loss = LinearLoss::squared_hinge;
  bool with_bias = false;  // bias as an extra regularized constant feature
  int max_sweeps = 1000;
  std::uint64_t seed = 1;
};

struct LinearSolution {
  Vector w;
  double bias = 0.0;
  double objective = 0.0;  // primal value at the returned point
  Vector alpha;            // dual coefficients, one per training row
  int sweeps = 0;
};

// Dual coordinate descent for the l2-regularized binary SVM primal
//   min_w  0.5 |w|^2 + C sum_i loss(1 - y_i w.x_i)
// with squared hinge (default) or plain hinge loss. Sweeps visit samples in
// a fresh random permutation each round (fixed seed) and stop once the
// duality gap falls under epsilon * max(1, |primal|).
LinearSolution train_linear(const Matrix& x, const Vector& y, const LinearTrainConfig& config);

struct LinearModel {
  std::vector<int> class_ids;  // ascending
  Matrix weights;              // one row per class
  Vector biases;
  bool with_bias = false;
};

// One binary machine per class (that class +1, rest -1).
LinearModel train_one_vs_rest(const Matrix& x, const std::vector<int>& labels,
                              const LinearTrainConfig& config);

struct Prediction {
  int class_id = 0;
  Vector decision_values;
};

// Argmax of per-class decision values; ties go to the lowest class id.
Prediction predict(const LinearModel& model, const Vector& x);
std::vector<int> predict_batch(const LinearModel& model, const Matrix& x);

struct KernelBinarySolution {
  Vector alpha;            // in [0, C], sum alpha_i y_i = 0
  double bias = 0.0;       // f(x) = sum_i alpha_i y_i k(x_i, x) + bias
  double objective = 0.0;  // dual value at the returned point
  int iterations = 0;
};

// Most-violating-pair SMO for the box-constrained dual
//   max_a  sum a_i - 0.5 sum_ij a_i a_j y_i y_j K_ij,  0 <= a <= C, a.y = 0.
// The kernel matrix must be PSD (within a small diagonal shift); indefinite
// inputs are rejected so the caller has to repair the spectrum knowingly.
KernelBinarySolution train_kernel_svm_dual(const Matrix& k, const Vector& y, double c,
                                           double tol = 1e-6, int max_iter = 1000000);

struct KernelModel {
  struct PairMachine {
    int pos_class = 0;  // f >= 0 votes for this class
    int neg_class = 0;
    std::vector<std::size_t> support;  // indices into the training set
    Vector coefficients;               // alpha_i * y_i per support point
    double bias = 0.0;
  };
  std::vector<int> class_ids;  // ascending
  std::vector<PairMachine> machines;
};

// One machine per unordered class pair; prediction by majority vote with
// ties resolved toward the lowest class id.
KernelModel train_one_vs_one(const Matrix& k, const std::vector<int>& labels, double c,
                             double tol = 1e-6);

// k_test(i, j) = kernel(test sample i, training sample j).
std::vector<int> predict_kernel(const KernelModel& model, const Matrix& k_test);

struct CvResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracies;
};

// fit(train_indices) returns a predictor mapping test indices to predicted
// labels. Anything fold-dependent (normalization stats, basis selection)
// must happen inside fit so no test-fold information leaks.
using FoldPredictor = std::function<std::vector<int>(const std::vector<std::size_t>&)>;
using FoldFit = std::function<FoldPredictor(const std::vector<std::size_t>&)>;

CvResult cross_validate(const std::vector<int>& labels, const FoldSplit& folds,
                        const FoldFit& fit);

struct MklResult {
  double alpha = 0.0;
  double accuracy = 0.0;
  std::vector<double> grid_accuracies;
};

// Line search over the convex kernel combination alpha*K1 + (1-alpha)*K2,
// scored by F-fold CV accuracy of the one-vs-one kernel SVM; ties prefer
// the smallest alpha.
MklResult mkl_line_search(const Matrix& k1, const Matrix& k2, const std::vector<int>& labels,
                          double c, const std::vector<double>& grid, int folds);

}  // namespace besvm
