#include "besvm/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace besvm {

namespace {

// The coordinate descent sweep visits samples in random order, so rows must
// be contiguous in memory; Eigen's column-major default would turn every
// row access into d scattered cache lines.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_binary_labels(const Vector& y) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      pos = true;
    } else if (y[i] == -1.0) {
      neg = true;
    } else {
      fail_data("binary labels must be +1 or -1, got " + std::to_string(y[i]));
    }
  }
  if (!pos || !neg) fail_data("training data contains a single class");
}

double linear_primal(const RowMatrix& x, const Vector& y, const Vector& w, double c,
                     LinearLoss loss) {
  const Vector margins = Vector::Ones(y.size()) - y.cwiseProduct(x * w);
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double h = std::max(0.0, margins[i]);
    total += loss == LinearLoss::squared_hinge ? h * h : h;
  }
  return 0.5 * w.squaredNorm() + c * total;
}

}  // namespace

LinearSolution train_linear(const Matrix& x, const Vector& y, const LinearTrainConfig& config) {
  if (x.rows() != y.size()) fail_data("row/label count mismatch");
  if (x.rows() < 1) fail_data("empty training set");
  if (config.c <= 0.0) fail_config("C must be positive");
  if (config.epsilon <= 0.0) fail_config("epsilon must be positive");
  check_binary_labels(y);

  RowMatrix data(x.rows(), x.cols() + (config.with_bias ? 1 : 0));
  data.leftCols(x.cols()) = x;
  if (config.with_bias) data.col(x.cols()).setOnes();
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();

  const bool squared = config.loss == LinearLoss::squared_hinge;
  const double diag = squared ? 1.0 / (2.0 * config.c) : 0.0;
  const double upper = squared ? std::numeric_limits<double>::infinity() : config.c;

  Vector qbar(n);
  for (Eigen::Index i = 0; i < n; ++i) qbar[i] = data.row(i).squaredNorm() + diag;

  Vector w = Vector::Zero(d);
  Vector alpha = Vector::Zero(n);
  // A sample with an all-zero row cannot influence w; park its coefficient
  // at the value that matches its constant loss contribution.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (qbar[i] <= 0.0) alpha[i] = std::isfinite(upper) ? upper : 0.0;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(config.seed);

  LinearSolution out;
  int sweep = 0;
  for (; sweep < config.max_sweeps; ++sweep) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    for (Eigen::Index i : order) {
      if (qbar[i] <= 0.0) continue;
      const double g = y[i] * w.dot(data.row(i)) - 1.0 + diag * alpha[i];
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= upper) {
        pg = std::max(g, 0.0);
      }
      if (pg == 0.0) continue;
      const double updated = std::clamp(alpha[i] - g / qbar[i], 0.0, upper);
      if (updated != alpha[i]) {
        w += (updated - alpha[i]) * y[i] * data.row(i).transpose();
        alpha[i] = updated;
      }
    }

    // Relative duality gap as the stopping rule: the primal value is then
    // provably within epsilon of the optimum.
    const double primal = linear_primal(data, y, w, config.c, config.loss);
    const double dual =
        alpha.sum() - 0.5 * w.squaredNorm() - 0.5 * diag * alpha.squaredNorm();
    if (primal - dual <= config.epsilon * std::max(1.0, std::abs(primal))) {
      ++sweep;
      break;
    }
  }

  out.sweeps = sweep;
  out.alpha = alpha;
  if (config.with_bias) {
    out.w = w.head(d - 1);
    out.bias = w[d - 1];
  } else {
    out.w = w;
    out.bias = 0.0;
  }
  out.objective = linear_primal(data, y, w, config.c, config.loss);
  return out;
}

LinearModel train_one_vs_rest(const Matrix& x, const std::vector<int>& labels,
                              const LinearTrainConfig& config) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) fail_data("row/label count mismatch");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) fail_data("one-vs-rest needs at least two classes");

  LinearModel model;
  model.class_ids.assign(distinct.begin(), distinct.end());
  model.with_bias = config.with_bias;
  model.weights.resize(static_cast<Eigen::Index>(model.class_ids.size()), x.cols());
  model.biases = Vector::Zero(static_cast<Eigen::Index>(model.class_ids.size()));

  parallel_for(static_cast<std::int64_t>(model.class_ids.size()),
               [&](std::int64_t begin, std::int64_t end) {
                 for (std::int64_t c = begin; c < end; ++c) {
                   const int cls = model.class_ids[static_cast<std::size_t>(c)];
                   Vector y(x.rows());
                   for (Eigen::Index i = 0; i < x.rows(); ++i) {
                     y[i] = labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
                   }
                   LinearTrainConfig per_class = config;
                   per_class.seed = config.seed + static_cast<std::uint64_t>(c);
                   const LinearSolution sol = train_linear(x, y, per_class);
                   model.weights.row(static_cast<Eigen::Index>(c)) = sol.w.transpose();
                   model.biases[static_cast<Eigen::Index>(c)] = sol.bias;
                 }
               });
  return model;
}

Prediction predict(const LinearModel& model, const Vector& x) {
  if (x.size() != model.weights.cols()) {
    fail_data("feature dim " + std::to_string(x.size()) + " does not match model dim " +
              std::to_string(model.weights.cols()));
  }
  Prediction p;
  p.decision_values = model.weights * x + model.biases;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < p.decision_values.size(); ++c) {
    if (p.decision_values[c] > p.decision_values[best]) best = c;
  }
  p.class_id = model.class_ids[static_cast<std::size_t>(best)];
  return p;
}

std::vector<int> predict_batch(const LinearModel& model, const Matrix& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  parallel_for(x.rows(), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      out[static_cast<std::size_t>(i)] = predict(model, x.row(i).transpose()).class_id;
    }
  });
  return out;
}

KernelBinarySolution train_kernel_svm_dual(const Matrix& k, const Vector& y, double c,
                                           double tol, int max_iter) {
  if (k.rows() != k.cols()) fail_data("kernel matrix must be square");
  if (k.rows() != y.size()) fail_data("kernel/label size mismatch");
  if (c <= 0.0) fail_config("C must be positive");
  check_binary_labels(y);

  // PSD gate: a Cholesky factorization of K plus a tiny diagonal shift must
  // succeed. Indefinite similarity matrices belong in spectrum_fix first.
  {
    const double scale = std::max(1.0, k.diagonal().cwiseAbs().maxCoeff());
    const Matrix shifted = k + 1e-8 * scale * Matrix::Identity(k.rows(), k.cols());
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) {
      fail_numeric("kernel matrix is not PSD; apply a spectrum fix before training");
    }
  }

  const Eigen::Index n = k.rows();
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of the min-form dual at alpha = 0

  KernelBinarySolution out;
  int iter = 0;
  double m_up = 0.0, m_low = 0.0;
  while (iter < max_iter) {
    // Most violating pair across the feasible up/down directions.
    Eigen::Index i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
      const bool in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
      if (in_up && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= tol) break;

    // One Newton step along alpha_i += y_i t, alpha_j -= y_j t, clipped to
    // the box; the single shared t keeps sum(alpha . y) at exactly zero.
    const double curvature = k(i, i) + k(j, j) - 2.0 * k(i, j);
    const double slope = y[i] * grad[i] - y[j] * grad[j];  // = -(m_up - m_low) < 0
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    if (y[i] > 0.0) {
      t_lo = std::max(t_lo, -alpha[i]);
      t_hi = std::min(t_hi, c - alpha[i]);
    } else {
      t_lo = std::max(t_lo, alpha[i] - c);
      t_hi = std::min(t_hi, alpha[i]);
    }
    if (y[j] > 0.0) {
      t_lo = std::max(t_lo, alpha[j] - c);
      t_hi = std::min(t_hi, alpha[j]);
    } else {
      t_lo = std::max(t_lo, -alpha[j]);
      t_hi = std::min(t_hi, c - alpha[j]);
    }
    double step;
    if (curvature > 1e-12) {
      step = std::clamp(-slope / curvature, t_lo, t_hi);
    } else {
      step = slope < 0.0 ? t_hi : t_lo;  // flat direction: run to the wall
    }
    if (step == 0.0) break;

    alpha[i] += y[i] * step;
    alpha[j] -= y[j] * step;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += step * y[t] * (k(t, i) - k(t, j));
    }
    ++iter;
  }
  if (iter >= max_iter) fail_numeric("kernel SVM did not converge within the iteration budget");

  out.alpha = alpha;
  out.iterations = iter;
  // Midpoint of the feasible bias interval (its width is at most tol here).
  if (std::isfinite(m_up) && std::isfinite(m_low)) {
    out.bias = 0.5 * (m_up + m_low);
  }
  const Vector ya = y.cwiseProduct(alpha);
  out.objective = alpha.sum() - 0.5 * ya.dot(k * ya);
  return out;
}

KernelModel train_one_vs_one(const Matrix& k, const std::vector<int>& labels, double c,
                             double tol) {
  if (static_cast<std::size_t>(k.rows()) != labels.size()) fail_data("kernel/label size mismatch");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) fail_data("one-vs-one needs at least two classes");

  KernelModel model;
  model.class_ids.assign(distinct.begin(), distinct.end());
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < model.class_ids.size(); ++a) {
    for (std::size_t b = a + 1; b < model.class_ids.size(); ++b) {
      pairs.emplace_back(model.class_ids[a], model.class_ids[b]);
    }
  }
  model.machines.resize(pairs.size());

  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t p = begin; p < end; ++p) {
      const auto [pos, neg] = pairs[static_cast<std::size_t>(p)];
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == pos || labels[i] == neg) subset.push_back(i);
      }
      const Eigen::Index m = static_cast<Eigen::Index>(subset.size());
      Matrix sub_k(m, m);
      Vector sub_y(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        sub_y[a] = labels[subset[static_cast<std::size_t>(a)]] == pos ? 1.0 : -1.0;
        for (Eigen::Index b = 0; b < m; ++b) {
          sub_k(a, b) = k(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]),
                          static_cast<Eigen::Index>(subset[static_cast<std::size_t>(b)]));
        }
      }
      const KernelBinarySolution sol = train_kernel_svm_dual(sub_k, sub_y, c, tol);

      KernelModel::PairMachine& machine = model.machines[static_cast<std::size_t>(p)];
      machine.pos_class = pos;
      machine.neg_class = neg;
      machine.bias = sol.bias;
      std::vector<double> coefs;
      for (Eigen::Index a = 0; a < m; ++a) {
        if (sol.alpha[a] > 0.0) {
          machine.support.push_back(subset[static_cast<std::size_t>(a)]);
          coefs.push_back(sol.alpha[a] * sub_y[a]);
        }
      }
      machine.coefficients =
          Eigen::Map<const Vector>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
    }
  });
  return model;
}

std::vector<int> predict_kernel(const KernelModel& model, const Matrix& k_test) {
  std::vector<int> out(static_cast<std::size_t>(k_test.rows()));
  parallel_for(k_test.rows(), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      std::vector<int> votes(model.class_ids.size(), 0);
      for (const KernelModel::PairMachine& machine : model.machines) {
        double f = machine.bias;
        for (Eigen::Index s = 0; s < machine.coefficients.size(); ++s) {
          f += machine.coefficients[s] *
               k_test(r, static_cast<Eigen::Index>(machine.support[static_cast<std::size_t>(s)]));
        }
        const int cls = f >= 0.0 ? machine.pos_class : machine.neg_class;
        const auto it = std::lower_bound(model.class_ids.begin(), model.class_ids.end(), cls);
        ++votes[static_cast<std::size_t>(it - model.class_ids.begin())];
      }
      std::size_t best = 0;
      for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      out[static_cast<std::size_t>(r)] = model.class_ids[best];
    }
  });
  return out;
}

CvResult cross_validate(const std::vector<int>& labels, const FoldSplit& folds,
                        const FoldFit& fit) {
  if (folds.fold_count < 2) fail_config("cross validation needs at least two folds");
  if (folds.fold_assignments.size() != labels.size()) fail_data("fold/label size mismatch");

  CvResult result;
  for (int f = 0; f < folds.fold_count; ++f) {
    const std::vector<std::size_t> test_idx = folds.fold_indices(f);
    if (test_idx.empty()) fail_config("fold " + std::to_string(f) + " is empty");
    const std::vector<std::size_t> train_idx = folds.complement_indices(f);
    if (train_idx.empty()) fail_config("training split for fold " + std::to_string(f) + " is empty");

    const FoldPredictor predictor = fit(train_idx);
    const std::vector<int> predicted = predictor(test_idx);
    if (predicted.size() != test_idx.size()) fail_numeric("predictor returned a wrong-size batch");

    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      if (predicted[i] == labels[test_idx[i]]) ++hits;
    }
    result.fold_accuracies.push_back(static_cast<double>(hits) /
                                     static_cast<double>(test_idx.size()));
  }
  for (double a : result.fold_accuracies) result.mean_accuracy += a;
  result.mean_accuracy /= static_cast<double>(result.fold_accuracies.size());
  return result;
}

MklResult mkl_line_search(const Matrix& k1, const Matrix& k2, const std::vector<int>& labels,
                          double c, const std::vector<double>& grid, int folds) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
    fail_data("kernel matrices must have identical shapes");
  }
  if (grid.empty()) fail_config("empty mixing grid");
  for (double a : grid) {
    if (a < 0.0 || a > 1.0) fail_config("mixing weights must lie in [0,1]");
  }

  const FoldSplit split = split_even_folds(labels.size(), folds);
  MklResult best;
  best.accuracy = -1.0;
  for (double a : grid) {
    const Matrix mixed = a * k1 + (1.0 - a) * k2;
    const CvResult cv = cross_validate(
        labels, split, [&](const std::vector<std::size_t>& train_idx) -> FoldPredictor {
          Matrix train_k(static_cast<Eigen::Index>(train_idx.size()),
                         static_cast<Eigen::Index>(train_idx.size()));
          std::vector<int> train_labels(train_idx.size());
          for (std::size_t r = 0; r < train_idx.size(); ++r) {
            train_labels[r] = labels[train_idx[r]];
            for (std::size_t s = 0; s < train_idx.size(); ++s) {
              train_k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
                  mixed(static_cast<Eigen::Index>(train_idx[r]),
                        static_cast<Eigen::Index>(train_idx[s]));
            }
          }
          const KernelModel model = train_one_vs_one(train_k, train_labels, c);
          return [&, model, train_idx](const std::vector<std::size_t>& test_idx) {
            Matrix cross(static_cast<Eigen::Index>(test_idx.size()),
                         static_cast<Eigen::Index>(train_idx.size()));
            for (std::size_t r = 0; r < test_idx.size(); ++r) {
              for (std::size_t s = 0; s < train_idx.size(); ++s) {
                cross(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
                    mixed(static_cast<Eigen::Index>(test_idx[r]),
                          static_cast<Eigen::Index>(train_idx[s]));
              }
            }
            return predict_kernel(model, cross);
          };
        });
    best.grid_accuracies.push_back(cv.mean_accuracy);
    if (cv.mean_accuracy > best.accuracy ||
        (cv.mean_accuracy == best.accuracy && a < best.alpha)) {
      best.accuracy = cv.mean_accuracy;
      best.alpha = a;
    }
  }
  return best;
}

}  // namespace besvm
