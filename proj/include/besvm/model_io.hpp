#pragma once

#include "besvm/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace besvm {

// A model file carries everything needed to predict on raw inputs: the
// measure labels and cell sizes that rebuild the feature stage, the
// per-column feature normalizers, and the embedded classifier itself.
struct PipelineModel {
  std::vector<std::string> measure_labels;
  std::vector<int> cell_sizes;  // one per measure; 0 means plain vectors
  std::vector<VectorNormalizer> feature_norms;
  EmbeddedModel embedded;
};

nlohmann::json to_json(const SimilarityMeasure& measure);
SimilarityMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Exemplar& exemplar);
Exemplar exemplar_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BasisSet& basis);
BasisSet basis_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VectorNormalizer& norm);
VectorNormalizer vector_normalizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MapNormalizer& norm);
MapNormalizer map_normalizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KernelModel& model);
KernelModel kernel_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EmbeddedModel& model);
EmbeddedModel embedded_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PipelineModel& model);
PipelineModel pipeline_model_from_json(const nlohmann::json& j);

// Model files wrap the payload in {"format": "besvm-model", "version": 1,
// "type": ..., "model": ...}; loading validates the envelope first.
void save_pipeline_model(const PipelineModel& model, const std::string& path);
PipelineModel load_pipeline_model(const std::string& path);

void save_kernel_model(const KernelModel& model, const std::string& path);
KernelModel load_kernel_model(const std::string& path);

}  // namespace besvm
