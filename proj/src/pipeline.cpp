#include "besvm/pipeline.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace besvm {

namespace {

std::vector<std::vector<Exemplar>> subset_columns(
    const std::vector<std::vector<Exemplar>>& columns, const std::vector<std::size_t>& indices) {
  std::vector<std::vector<Exemplar>> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out[c].reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= columns[c].size()) fail_data("sample index out of range");
      out[c].push_back(columns[c][i]);
    }
  }
  return out;
}

std::vector<int> subset_labels(const std::vector<int>& labels,
                               const std::vector<std::size_t>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= labels.size()) fail_data("label index out of range");
    out.push_back(labels[i]);
  }
  return out;
}

// Standard deviation per column with the n-1 denominator; near-constant
// columns get a zero inverse so they map to exactly zero after centering.
Vector inverse_sigma(const Matrix& data, const Vector& mean) {
  const Eigen::Index n = data.rows();
  Vector inv = Vector::Zero(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double var =
        (data.col(j).array() - mean[j]).square().sum() / static_cast<double>(n - 1);
    const double sigma = std::sqrt(var);
    if (sigma > 1e-12 * std::max(1.0, std::abs(mean[j]))) inv[j] = 1.0 / sigma;
  }
  return inv;
}

}  // namespace

VectorNormalizer fit_vector_normalizer(const std::vector<Vector>& xs, NormMode mode) {
  VectorNormalizer norm;
  norm.mode = mode;
  if (mode == NormMode::unnorm) return norm;
  if (xs.size() < 2) fail_data("need at least two vectors to fit a normalizer");
  const Eigen::Index dim = xs.front().size();
  for (const Vector& x : xs) {
    if (x.size() != dim) fail_data("inconsistent vector dimensions");
  }

  if (mode == NormMode::besvm) {
    const NormalizationStats stats = fit_center_scale(xs);
    norm.mean = stats.mean;
    norm.scale = stats.scale;
    return norm;
  }

  Matrix data(static_cast<Eigen::Index>(xs.size()), dim);
  for (std::size_t i = 0; i < xs.size(); ++i) data.row(static_cast<Eigen::Index>(i)) = xs[i];
  norm.mean = data.colwise().mean();
  norm.inv_sigma = inverse_sigma(data, norm.mean);
  return norm;
}

Vector apply_vector_normalizer(const VectorNormalizer& norm, const Vector& x) {
  if (norm.mode == NormMode::unnorm) return x;
  if (x.size() != norm.mean.size()) fail_data("vector width does not match the normalizer");
  if (norm.mode == NormMode::besvm) return (x - norm.mean) * norm.scale;
  return (x - norm.mean).cwiseProduct(norm.inv_sigma);
}

MapNormalizer fit_map_normalizer(const Matrix& mapped,
                                 const std::vector<Eigen::Index>& block_offsets, NormMode mode) {
  if (block_offsets.size() < 2 || block_offsets.front() != 0 ||
      block_offsets.back() != mapped.cols()) {
    fail_config("block offsets must start at 0 and end at the column count");
  }
  MapNormalizer norm;
  norm.mode = mode;
  norm.block_offsets = block_offsets;
  if (mode == NormMode::unnorm) return norm;
  if (mapped.rows() < 2) fail_data("need at least two mapped samples to fit a normalizer");

  if (mode == NormMode::besvm) {
    norm.block_stats = fit_embedding_normalizer(mapped, block_offsets);
    return norm;
  }
  norm.mean = mapped.colwise().mean();
  norm.inv_sigma = inverse_sigma(mapped, norm.mean);
  return norm;
}

void apply_map_normalizer(const MapNormalizer& norm, Matrix& mapped) {
  if (norm.block_offsets.empty() || mapped.cols() != norm.block_offsets.back()) {
    fail_data("map width does not match the normalizer");
  }
  switch (norm.mode) {
    case NormMode::unnorm:
      return;
    case NormMode::besvm:
      for (std::size_t m = 0; m + 1 < norm.block_offsets.size(); ++m) {
        const Eigen::Index lo = norm.block_offsets[m];
        auto block = mapped.middleCols(lo, norm.block_offsets[m + 1] - lo);
        block.rowwise() -= norm.block_stats[m].mean.transpose();
        block *= norm.block_stats[m].scale;
      }
      return;
    case NormMode::z_score:
      mapped.rowwise() -= norm.mean.transpose();
      mapped *= norm.inv_sigma.asDiagonal();
      return;
  }
}

std::vector<std::size_t> select_basis_indices(
    const BasisSpec& spec, const std::vector<std::vector<Exemplar>>& sample_columns,
    const std::vector<int>& labels, const std::vector<SimilarityMeasure>& measures) {
  if (spec.per_class < 1) fail_config("per_class must be positive");
  switch (spec.strategy) {
    case BasisSpec::Strategy::random:
      return select_random(labels, spec.per_class, spec.seed);
    case BasisSpec::Strategy::index_stride:
      return select_index_stride(labels, spec.per_class);
    case BasisSpec::Strategy::kmedoids:
      break;
  }
  if (spec.kmedoids_measure >= measures.size()) {
    fail_config("kmedoids_measure is out of range");
  }
  const std::vector<Exemplar>& samples =
      sample_columns.size() == 1 ? sample_columns[0] : sample_columns.at(spec.kmedoids_measure);
  return select_kmedoids_per_class(measures[spec.kmedoids_measure], samples, labels,
                                   spec.per_class, spec.kmedoids_max_iter, spec.seed);
}

EmbeddedModel train_embedded(const BasisSet& basis,
                             const std::vector<SimilarityMeasure>& measures,
                             const std::vector<std::vector<Exemplar>>& sample_columns,
                             const std::vector<int>& labels, const EmbeddedTrainConfig& config) {
  if (measures.empty()) fail_config("at least one similarity measure is required");
  EmbeddedModel model;
  model.measures = measures;
  model.basis = basis;

  Matrix mapped = raw_map_matrix(basis, measures, sample_columns);
  if (static_cast<std::size_t>(mapped.rows()) != labels.size()) {
    fail_data("label count does not match sample count");
  }
  std::vector<Eigen::Index> offsets;
  const Eigen::Index b = static_cast<Eigen::Index>(basis.size());
  for (std::size_t m = 0; m <= measures.size(); ++m) {
    offsets.push_back(static_cast<Eigen::Index>(m) * b);
  }
  model.norm = fit_map_normalizer(mapped, offsets, config.map_norm);
  apply_map_normalizer(model.norm, mapped);
  model.classifier = train_one_vs_rest(mapped, labels, config.solver);
  return model;
}

Prediction predict_embedded_one(const EmbeddedModel& model,
                                const std::vector<Exemplar>& x_per_measure) {
  const Vector v = empirical_map_per_measure(model.basis, model.measures, x_per_measure);
  Matrix row(1, v.size());
  row.row(0) = v.transpose();
  apply_map_normalizer(model.norm, row);
  return predict(model.classifier, row.row(0).transpose());
}

std::vector<int> predict_embedded(const EmbeddedModel& model,
                                  const std::vector<std::vector<Exemplar>>& sample_columns) {
  Matrix mapped = raw_map_matrix(model.basis, model.measures, sample_columns);
  apply_map_normalizer(model.norm, mapped);
  return predict_batch(model.classifier, mapped);
}

EmbeddedCvReport cv_embedded(const std::vector<std::vector<Exemplar>>& sample_columns,
                             const std::vector<int>& labels,
                             const std::vector<SimilarityMeasure>& measures,
                             const BasisSpec& basis_spec, const FoldSplit& folds,
                             const EmbeddedTrainConfig& config) {
  EmbeddedCvReport report;
  report.result = cross_validate(labels, folds, [&](const std::vector<std::size_t>& train_idx) {
    const std::vector<std::vector<Exemplar>> train_cols = subset_columns(sample_columns, train_idx);
    const std::vector<int> train_labels = subset_labels(labels, train_idx);
    const std::vector<std::size_t> local =
        select_basis_indices(basis_spec, train_cols, train_labels, measures);
    BasisSet basis = make_basis(train_cols, train_labels, local);
    for (std::size_t& s : basis.source_indices) s = train_idx[s];

    EmbeddedModel model = train_embedded(basis, measures, train_cols, train_labels, config);
    report.fold_norms.push_back(model.norm);
    return [&sample_columns, model = std::move(model)](const std::vector<std::size_t>& test_idx) {
      return predict_embedded(model, subset_columns(sample_columns, test_idx));
    };
  });
  return report;
}

LinearTrainConfig raw_baseline_defaults() {
  LinearTrainConfig config;
  config.with_bias = true;
  return config;
}

RawLinearModel train_raw_linear(const std::vector<Vector>& xs, const std::vector<int>& labels,
                                NormMode norm_mode, const LinearTrainConfig& config) {
  if (xs.empty()) fail_data("no training vectors");
  if (xs.size() != labels.size()) fail_data("label count does not match sample count");
  RawLinearModel model;
  model.norm = fit_vector_normalizer(xs, norm_mode);
  Matrix data(static_cast<Eigen::Index>(xs.size()), xs.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    data.row(static_cast<Eigen::Index>(i)) = apply_vector_normalizer(model.norm, xs[i]);
  }
  model.classifier = train_one_vs_rest(data, labels, config);
  return model;
}

std::vector<int> predict_raw_linear(const RawLinearModel& model, const std::vector<Vector>& xs) {
  std::vector<int> out;
  out.reserve(xs.size());
  for (const Vector& x : xs) {
    out.push_back(predict(model.classifier, apply_vector_normalizer(model.norm, x)).class_id);
  }
  return out;
}

CvResult cv_raw_linear(const std::vector<Vector>& xs, const std::vector<int>& labels,
                       const FoldSplit& folds, NormMode norm_mode,
                       const LinearTrainConfig& config) {
  return cross_validate(labels, folds, [&](const std::vector<std::size_t>& train_idx) {
    std::vector<Vector> train_xs;
    train_xs.reserve(train_idx.size());
    for (std::size_t i : train_idx) train_xs.push_back(xs.at(i));
    RawLinearModel model = train_raw_linear(train_xs, subset_labels(labels, train_idx),
                                            norm_mode, config);
    return [&xs, model = std::move(model)](const std::vector<std::size_t>& test_idx) {
      std::vector<Vector> test_xs;
      test_xs.reserve(test_idx.size());
      for (std::size_t i : test_idx) test_xs.push_back(xs.at(i));
      return predict_raw_linear(model, test_xs);
    };
  });
}

GreedyAugmentResult greedy_measure_augmentation(
    const std::vector<SimilarityMeasure>& candidates,
    const std::vector<std::vector<Exemplar>>& candidate_columns, const std::vector<int>& labels,
    const BasisSpec& basis_spec, const FoldSplit& folds, const EmbeddedTrainConfig& config,
    double min_gain) {
  if (candidates.empty()) fail_config("no candidate measures");
  if (candidate_columns.size() != 1 && candidate_columns.size() != candidates.size()) {
    fail_config("candidate columns must be shared or given per candidate");
  }

  const auto column_for = [&](std::size_t c) -> const std::vector<Exemplar>& {
    return candidate_columns.size() == 1 ? candidate_columns[0] : candidate_columns[c];
  };

  GreedyAugmentResult out;
  std::vector<std::size_t> remaining(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) remaining[c] = c;

  double best_so_far = -std::numeric_limits<double>::infinity();
  while (!remaining.empty()) {
    std::size_t best_candidate = remaining.size();
    double best_acc = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const std::size_t c = remaining[r];
      std::vector<SimilarityMeasure> measures;
      std::vector<std::vector<Exemplar>> columns;
      if (candidate_columns.size() == 1) {
        columns = candidate_columns;
      }
      for (std::size_t chosen : out.selected) {
        measures.push_back(candidates[chosen]);
        if (candidate_columns.size() != 1) columns.push_back(column_for(chosen));
      }
      measures.push_back(candidates[c]);
      if (candidate_columns.size() != 1) columns.push_back(column_for(c));

      const double acc =
          cv_embedded(columns, labels, measures, basis_spec, folds, config).result.mean_accuracy;
      if (acc > best_acc) {
        best_acc = acc;
        best_candidate = r;
      }
    }
    if (!out.selected.empty() && best_acc - best_so_far <= min_gain) break;
    out.selected.push_back(remaining[best_candidate]);
    out.accuracies.push_back(best_acc);
    best_so_far = best_acc;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_candidate));
  }
  return out;
}

}  // namespace besvm
