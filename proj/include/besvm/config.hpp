#pragma once

#include "besvm/pipeline.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace besvm {

// One entry of the experiment's measure list. Image measures come from the
// compact labels used throughout the figures: H<cell> followed by L (linear),
// R (rbf, gamma 1) or (h_R,h_L) for shift-invariant similarity with h_L = 0
// meaning rigid shifts only. Vector datasets use "linear", "rbf" or
// "rbf:<gamma>" with no cell size.
struct MeasureSpec {
  std::string label;
  SimilarityMeasure measure;
  int cell_size = 0;  // 0: the measure reads plain vectors
};

MeasureSpec parse_measure_label(const std::string& label);

struct DatasetSpec {
  std::string kind = "rings";  // rings | csv | cifar10 | textures
  std::string path;            // csv and cifar10
  int expected_count = 10000;  // records per cifar batch file
  int limit = 0;               // keep only the first limit samples; 0 keeps all

  // rings parameters
  int n_per_class = 250;
  double r1 = 1.0;
  double r2 = 2.0;
  double noise_sigma = 0.05;

  // textures parameters
  int count = 60;
  int height = 32;
  int width = 32;

  std::uint64_t seed = 1;
};

struct BenchSpec {
  std::vector<int> sizes = {500, 1000, 2000};
  int per_class_basis = 25;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<MeasureSpec> measures;
  BasisSpec basis;
  NormMode feature_norm = NormMode::besvm;
  NormMode map_norm = NormMode::besvm;
  LinearTrainConfig solver;
  double kernel_c = 2.0;  // kernelized baseline in bench
  double kernel_tol = 1e-3;
  int folds = 10;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  BenchSpec bench;
  std::vector<double> analyze_accuracies;  // optional, one per measure
  std::string model_path;                  // eval input
  std::string embed_method = "map";        // map | nystrom-clip | nystrom-flip | ...
};

// Strict parse: unknown keys and malformed values are config errors. Missing
// keys take the defaults above.
ExperimentConfig parse_config(const nlohmann::json& j);

// Canonical serialization; parse followed by serialize is idempotent.
nlohmann::json config_to_json(const ExperimentConfig& config);

// Applies one "dotted.path=value" assignment to a config document. Values
// parse as JSON when possible and fall back to strings.
void apply_override(nlohmann::json& j, const std::string& assignment);

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

const char* norm_mode_label(NormMode mode);
NormMode parse_norm_mode(const std::string& name);

}  // namespace besvm
