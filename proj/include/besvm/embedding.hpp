#pragma once

#include "besvm/core.hpp"
#include "besvm/features.hpp"
#include "besvm/similarity.hpp"

#include <cstddef>
#include <vector>

namespace besvm {

// Ordered set of basis exemplars shared by every similarity measure of an
// embedding. payloads holds one column of exemplars per measure so that a
// measure can see its preferred representation (flat vector vs cell grid);
// a single column is broadcast to all measures.
struct BasisSet {
  std::vector<int> class_ids;                // class of each basis exemplar
  std::vector<std::size_t> source_indices;   // position in the originating dataset
  std::vector<std::vector<Exemplar>> payloads;

  std::size_t size() const { return class_ids.size(); }

  const std::vector<Exemplar>& payload_column(std::size_t measure_index) const {
    return payloads.size() == 1 ? payloads[0] : payloads[measure_index];
  }
};

struct EmbeddedDataset {
  Matrix matrix;  // n x D, D = measures * basis size
  std::vector<int> labels;
  std::vector<Eigen::Index> block_offsets;  // measure m owns columns [offsets[m], offsets[m+1])
  std::vector<NormalizationStats> stats;    // one per measure block
};

// Unnormalized map of one sample: for each measure in turn, the similarities
// of every basis exemplar (as first argument) to x.
Vector empirical_map(const BasisSet& basis, const std::vector<SimilarityMeasure>& measures,
                     const Exemplar& x);
// Same, with a per-measure representation of x (size 1 broadcasts).
Vector empirical_map_per_measure(const BasisSet& basis,
                                 const std::vector<SimilarityMeasure>& measures,
                                 const std::vector<Exemplar>& x_per_measure);

// Unnormalized maps of a whole sample column set, one row per sample.
// sample_columns follows the same broadcast rule as BasisSet::payloads.
Matrix raw_map_matrix(const BasisSet& basis, const std::vector<SimilarityMeasure>& measures,
                      const std::vector<std::vector<Exemplar>>& sample_columns);

// Center/scale stats fit independently per measure block so that every
// measure contributes at a comparable magnitude.
std::vector<NormalizationStats> fit_embedding_normalizer(
    const Matrix& mapped, const std::vector<Eigen::Index>& block_offsets);

// Train mode (stats == nullptr) fits stats on these samples and stores them;
// test mode applies previously fitted stats unchanged.
EmbeddedDataset embed_dataset(const BasisSet& basis,
                              const std::vector<SimilarityMeasure>& measures,
                              const std::vector<std::vector<Exemplar>>& sample_columns,
                              const std::vector<int>& labels,
                              const std::vector<NormalizationStats>* stats = nullptr);

enum class SpectrumFixMode { clip, flip, shift, square };

// Eigendecompose, repair the spectrum, reassemble. Clip zeroes negative
// eigenvalues, Flip takes magnitudes, Shift adds a constant so the smallest
// becomes zero, Square squares (giving A*A).
Matrix spectrum_fix(const Matrix& a, SpectrumFixMode mode, double tol = 1e-10);

// Pseudo-inverse square root of a PSD matrix; eigenvalues below tol times
// the largest are treated as exact zeros.
Matrix inv_sqrt_psd(const Matrix& a, double tol = 1e-10);

// Psi = inv_sqrt_psd(spectrum_fix(sym(K_mm), fix)) * K_mn. The basis gram is
// symmetrized here so asymmetric deformable grams are accepted; callers that
// want the raw asymmetric values use the empirical map path instead.
Matrix nystrom_embed(const Matrix& k_mm, const Matrix& k_mn, SpectrumFixMode fix,
                     double tol = 1e-10);

// Psi = inv_sqrt_psd(cov of K_mn columns) * K_mn.
Matrix covariance_normalizer_embed(const Matrix& k_mn, double tol = 1e-10);

}  // namespace besvm
