#pragma once

#include "besvm/config.hpp"
#include "besvm/datasets.hpp"
#include "besvm/model_io.hpp"

#include <string>
#include <vector>

namespace besvm {

// A dataset loaded into memory, either as plain vectors or as raster images
// that the feature stage turns into cell grids on demand.
struct LoadedData {
  bool is_image = false;
  std::vector<int> labels;
  std::vector<Vector> vectors;
  std::vector<Raster> rasters;

  std::size_t size() const { return labels.size(); }
};

LoadedData load_dataset(const DatasetSpec& spec);

// One unnormalized payload column per measure. Image data yields cell grids
// at the measure's cell size; vector data yields the vectors themselves.
std::vector<std::vector<Exemplar>> build_raw_columns(const LoadedData& data,
                                                     const std::vector<MeasureSpec>& specs);

// The feature-stage normalizers act on flattened payloads; grids come back
// reassembled with their original shape.
Vector exemplar_flat(const Exemplar& exemplar);
Exemplar normalize_exemplar(const VectorNormalizer& norm, const Exemplar& exemplar);

std::vector<VectorNormalizer> fit_feature_norms(
    const std::vector<std::vector<Exemplar>>& raw_columns, NormMode mode);
std::vector<std::vector<Exemplar>> apply_feature_norms(
    const std::vector<VectorNormalizer>& norms,
    const std::vector<std::vector<Exemplar>>& raw_columns);

// Subcommand entry points. Each writes its artifacts under
// config.output_dir and throws Error on failure; wall-clock measurements go
// to timing.log so the data files stay byte-stable across reruns.
void run_train(const ExperimentConfig& config);
void run_eval(const ExperimentConfig& config);
void run_embed(const ExperimentConfig& config);
void run_select_basis(const ExperimentConfig& config);
void run_analyze(const ExperimentConfig& config);
void run_bench(const ExperimentConfig& config);
void run_cv(const ExperimentConfig& config);

}  // namespace besvm
