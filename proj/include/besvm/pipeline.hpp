#pragma once

#include "besvm/basis.hpp"
#include "besvm/core.hpp"
#include "besvm/embedding.hpp"
#include "besvm/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace besvm {

// Normalization schemes compared across the experiments: leave the data
// alone, standardize each dimension, or center everything and divide by the
// average centered l2 norm (the scheme the embedded classifier defaults to).
enum class NormMode { unnorm, z_score, besvm };

// Feature-stage normalizer fit on training vectors only.
struct VectorNormalizer {
  NormMode mode = NormMode::unnorm;
  Vector mean;       // empty in unnorm mode
  Vector inv_sigma;  // z_score only; zero entries mark constant dimensions
  double scale = 1.0;  // besvm only
};

VectorNormalizer fit_vector_normalizer(const std::vector<Vector>& xs, NormMode mode);
Vector apply_vector_normalizer(const VectorNormalizer& norm, const Vector& x);

// Map-stage counterpart. besvm mode keeps independent center/scale stats per
// measure block; z_score standardizes every column of the stacked map.
struct MapNormalizer {
  NormMode mode = NormMode::besvm;
  std::vector<Eigen::Index> block_offsets;
  std::vector<NormalizationStats> block_stats;  // besvm mode
  Vector mean;                                  // z_score mode
  Vector inv_sigma;
};

MapNormalizer fit_map_normalizer(const Matrix& mapped,
                                 const std::vector<Eigen::Index>& block_offsets, NormMode mode);
void apply_map_normalizer(const MapNormalizer& norm, Matrix& mapped);

// How to pick basis exemplars from a training set.
struct BasisSpec {
  enum class Strategy { random, index_stride, kmedoids };
  Strategy strategy = Strategy::random;
  int per_class = 10;
  int kmedoids_max_iter = 20;
  std::size_t kmedoids_measure = 0;  // which measure scores medoid candidates
  std::uint64_t seed = 1;
};

std::vector<std::size_t> select_basis_indices(
    const BasisSpec& spec, const std::vector<std::vector<Exemplar>>& sample_columns,
    const std::vector<int>& labels, const std::vector<SimilarityMeasure>& measures);

struct EmbeddedTrainConfig {
  LinearTrainConfig solver;  // bias stays off by default: the map is centered
  NormMode map_norm = NormMode::besvm;
};

// A trained classifier over the explicit similarity map: the basis, the
// measures that define the map, the normalizer fit on the training map, and
// the one-vs-rest linear machines.
struct EmbeddedModel {
  std::vector<SimilarityMeasure> measures;
  BasisSet basis;
  MapNormalizer norm;
  LinearModel classifier;
};

EmbeddedModel train_embedded(const BasisSet& basis,
                             const std::vector<SimilarityMeasure>& measures,
                             const std::vector<std::vector<Exemplar>>& sample_columns,
                             const std::vector<int>& labels,
                             const EmbeddedTrainConfig& config = {});

Prediction predict_embedded_one(const EmbeddedModel& model,
                                const std::vector<Exemplar>& x_per_measure);

std::vector<int> predict_embedded(const EmbeddedModel& model,
                                  const std::vector<std::vector<Exemplar>>& sample_columns);

// Per-fold retraining: basis selection and normalizer fitting see only the
// fold's training part. fold_norms is exposed so tests can verify that.
struct EmbeddedCvReport {
  CvResult result;
  std::vector<MapNormalizer> fold_norms;
};

EmbeddedCvReport cv_embedded(const std::vector<std::vector<Exemplar>>& sample_columns,
                             const std::vector<int>& labels,
                             const std::vector<SimilarityMeasure>& measures,
                             const BasisSpec& basis_spec, const FoldSplit& folds,
                             const EmbeddedTrainConfig& config = {});

// Raw-feature baseline: a linear SVM straight on the vectors. Keeps the bias
// term on by default because raw features are not centered the way the
// similarity map is.
LinearTrainConfig raw_baseline_defaults();

struct RawLinearModel {
  VectorNormalizer norm;
  LinearModel classifier;
};

RawLinearModel train_raw_linear(const std::vector<Vector>& xs, const std::vector<int>& labels,
                                NormMode norm_mode = NormMode::besvm,
                                const LinearTrainConfig& config = raw_baseline_defaults());

std::vector<int> predict_raw_linear(const RawLinearModel& model, const std::vector<Vector>& xs);

CvResult cv_raw_linear(const std::vector<Vector>& xs, const std::vector<int>& labels,
                       const FoldSplit& folds, NormMode norm_mode = NormMode::besvm,
                       const LinearTrainConfig& config = raw_baseline_defaults());

// Forward selection over candidate measures: each round adds the candidate
// whose combined embedding scores the best CV accuracy, stopping once the
// best improvement is min_gain or less. The first round always takes the
// best single candidate.
struct GreedyAugmentResult {
  std::vector<std::size_t> selected;  // candidate positions, in selection order
  std::vector<double> accuracies;     // CV accuracy after each accepted round
};

GreedyAugmentResult greedy_measure_augmentation(
    const std::vector<SimilarityMeasure>& candidates,
    const std::vector<std::vector<Exemplar>>& candidate_columns, const std::vector<int>& labels,
    const BasisSpec& basis_spec, const FoldSplit& folds, const EmbeddedTrainConfig& config = {},
    double min_gain = 0.001);

}  // namespace besvm
