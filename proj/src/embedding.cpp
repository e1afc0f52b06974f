#include "besvm/embedding.hpp"

#include "besvm/analysis.hpp"

#include <cmath>

namespace besvm {

namespace {

void check_basis(const BasisSet& basis, std::size_t measure_count) {
  if (basis.size() == 0) fail_config("basis set is empty");
  if (basis.payloads.size() != 1 && basis.payloads.size() != measure_count) {
    fail_config("basis has " + std::to_string(basis.payloads.size()) +
                " payload columns for " + std::to_string(measure_count) + " measures");
  }
  for (const auto& column : basis.payloads) {
    if (column.size() != basis.size()) {
      fail_config("basis payload column length does not match basis size");
    }
  }
}

}  // namespace

Vector empirical_map_per_measure(const BasisSet& basis,
                                 const std::vector<SimilarityMeasure>& measures,
                                 const std::vector<Exemplar>& x_per_measure) {
  if (measures.empty()) fail_config("no similarity measures given");
  check_basis(basis, measures.size());
  if (x_per_measure.size() != 1 && x_per_measure.size() != measures.size()) {
    fail_config("sample has " + std::to_string(x_per_measure.size()) +
                " representations for " + std::to_string(measures.size()) + " measures");
  }

  const Eigen::Index b = static_cast<Eigen::Index>(basis.size());
  Vector out(static_cast<Eigen::Index>(measures.size()) * b);
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const std::vector<Exemplar>& bases = basis.payload_column(m);
    const Exemplar& x = x_per_measure.size() == 1 ? x_per_measure[0] : x_per_measure[m];
    for (Eigen::Index i = 0; i < b; ++i) {
      out[static_cast<Eigen::Index>(m) * b + i] =
          evaluate(measures[m], bases[static_cast<std::size_t>(i)], x);
    }
  }
  return out;
}

Vector empirical_map(const BasisSet& basis, const std::vector<SimilarityMeasure>& measures,
                     const Exemplar& x) {
  return empirical_map_per_measure(basis, measures, {x});
}

Matrix raw_map_matrix(const BasisSet& basis, const std::vector<SimilarityMeasure>& measures,
                      const std::vector<std::vector<Exemplar>>& sample_columns) {
  if (measures.empty()) fail_config("no similarity measures given");
  check_basis(basis, measures.size());
  if (sample_columns.empty() ||
      (sample_columns.size() != 1 && sample_columns.size() != measures.size())) {
    fail_config("sample columns must number 1 or one per measure");
  }
  const std::size_t n = sample_columns[0].size();
  for (const auto& column : sample_columns) {
    if (column.size() != n) fail_config("sample columns have inconsistent lengths");
  }

  const Eigen::Index b = static_cast<Eigen::Index>(basis.size());
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(measures.size()) * b);
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const std::vector<Exemplar>& samples =
        sample_columns.size() == 1 ? sample_columns[0] : sample_columns[m];
    // Basis exemplars are the first argument, so they index gram rows;
    // transpose lands samples on rows of the output.
    const SimilarityMatrix block = gram(measures[m], basis.payload_column(m), samples);
    out.block(0, static_cast<Eigen::Index>(m) * b, static_cast<Eigen::Index>(n), b) =
        block.values.transpose();
  }
  return out;
}

std::vector<NormalizationStats> fit_embedding_normalizer(
    const Matrix& mapped, const std::vector<Eigen::Index>& block_offsets) {
  if (mapped.rows() < 2) fail_data("need at least two mapped samples to fit the normalizer");
  if (block_offsets.size() < 2 || block_offsets.front() != 0 ||
      block_offsets.back() != mapped.cols()) {
    fail_config("block offsets must start at 0 and end at the column count");
  }

  std::vector<NormalizationStats> stats;
  for (std::size_t m = 0; m + 1 < block_offsets.size(); ++m) {
    const Eigen::Index lo = block_offsets[m];
    const Eigen::Index width = block_offsets[m + 1] - lo;
    if (width <= 0) fail_config("empty measure block in offsets");
    const auto block = mapped.middleCols(lo, width);

    NormalizationStats s;
    s.mean = block.colwise().mean();
    double avg_norm = 0.0;
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      avg_norm += (block.row(i).transpose() - s.mean).norm();
    }
    avg_norm /= static_cast<double>(block.rows());
    if (avg_norm == 0.0) {
      fail_data("measure block " + std::to_string(m) + " is constant; normalizer undefined");
    }
    s.scale = 1.0 / avg_norm;
    stats.push_back(std::move(s));
  }
  return stats;
}

EmbeddedDataset embed_dataset(const BasisSet& basis,
                              const std::vector<SimilarityMeasure>& measures,
                              const std::vector<std::vector<Exemplar>>& sample_columns,
                              const std::vector<int>& labels,
                              const std::vector<NormalizationStats>* stats) {
  EmbeddedDataset out;
  out.matrix = raw_map_matrix(basis, measures, sample_columns);
  if (static_cast<std::size_t>(out.matrix.rows()) != labels.size()) {
    fail_data("label count does not match sample count");
  }
  out.labels = labels;

  const Eigen::Index b = static_cast<Eigen::Index>(basis.size());
  for (std::size_t m = 0; m <= measures.size(); ++m) {
    out.block_offsets.push_back(static_cast<Eigen::Index>(m) * b);
  }

  if (stats != nullptr) {
    if (stats->size() != measures.size()) {
      fail_config("stats count does not match measure count");
    }
    for (std::size_t m = 0; m < stats->size(); ++m) {
      if ((*stats)[m].mean.size() != b) {
        fail_config("stats for measure " + std::to_string(m) + " have the wrong width");
      }
    }
    out.stats = *stats;
  } else {
    out.stats = fit_embedding_normalizer(out.matrix, out.block_offsets);
  }

  for (std::size_t m = 0; m < measures.size(); ++m) {
    auto block = out.matrix.middleCols(out.block_offsets[m], b);
    block.rowwise() -= out.stats[m].mean.transpose();
    block *= out.stats[m].scale;
  }
  return out;
}

Matrix spectrum_fix(const Matrix& a, SpectrumFixMode mode, double tol) {
  (void)tol;
  const EigenDecomposition eig = sym_eigen(a);  // also enforces symmetry
  Vector fixed = eig.eigenvalues;
  switch (mode) {
    case SpectrumFixMode::clip:
      fixed = fixed.cwiseMax(0.0);
      break;
    case SpectrumFixMode::flip:
      fixed = fixed.cwiseAbs();
      break;
    case SpectrumFixMode::shift: {
      const double shift = std::max(0.0, -fixed.minCoeff());
      fixed.array() += shift;
      break;
    }
    case SpectrumFixMode::square:
      fixed = fixed.cwiseProduct(fixed);
      break;
  }
  return eig.eigenvectors * fixed.asDiagonal() * eig.eigenvectors.transpose();
}

Matrix inv_sqrt_psd(const Matrix& a, double tol) {
  const EigenDecomposition eig = sym_eigen(a);
  const double largest = std::max(eig.eigenvalues[0], 0.0);
  const double cutoff = tol * largest;
  Vector inv = Vector::Zero(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double lam = eig.eigenvalues[i];
    if (lam < -cutoff) {
      fail_numeric("matrix is not PSD: eigenvalue " + std::to_string(lam) +
                   " below -" + std::to_string(cutoff));
    }
    if (lam > cutoff && lam > 0.0) inv[i] = 1.0 / std::sqrt(lam);
  }
  return eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.transpose();
}

Matrix nystrom_embed(const Matrix& k_mm, const Matrix& k_mn, SpectrumFixMode fix, double tol) {
  if (k_mm.rows() != k_mm.cols()) fail_data("basis gram must be square");
  if (k_mn.rows() != k_mm.rows()) {
    fail_data("cross gram has " + std::to_string(k_mn.rows()) + " rows, basis gram is " +
              std::to_string(k_mm.rows()) + "x" + std::to_string(k_mm.cols()));
  }
  const Matrix repaired = spectrum_fix(symmetrize(k_mm), fix, tol);
  return inv_sqrt_psd(repaired, tol) * k_mn;
}

Matrix covariance_normalizer_embed(const Matrix& k_mn, double tol) {
  const Eigen::Index n = k_mn.cols();
  if (n < 2) fail_data("covariance normalizer needs at least two columns");

  const Vector mean = k_mn.rowwise().mean();
  const Matrix centered = k_mn.colwise() - mean;
  const double scale = std::max(1.0, k_mn.cwiseAbs().maxCoeff());
  if (centered.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    fail_data("all columns equal; column covariance is degenerate");
  }
  const Matrix cov = centered * centered.transpose() / static_cast<double>(n - 1);
  return inv_sqrt_psd(cov, tol) * k_mn;
}

}  // namespace besvm
