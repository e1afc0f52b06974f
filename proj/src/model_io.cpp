#include "besvm/model_io.hpp"

#include <fstream>
#include <string>

namespace besvm {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "besvm-model";
constexpr int kFormatVersion = 1;

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) fail_data(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail_data(std::string(what) + " holds a non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j, const char* what) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    fail_data(std::string(what) + " has inconsistent matrix dimensions");
  }
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  }
  return m;
}

const char* norm_mode_name(NormMode mode) {
  switch (mode) {
    case NormMode::unnorm:
      return "unnorm";
    case NormMode::z_score:
      return "z_score";
    case NormMode::besvm:
      return "besvm";
  }
  return "unnorm";
}

NormMode norm_mode_from_name(const std::string& name) {
  if (name == "unnorm") return NormMode::unnorm;
  if (name == "z_score") return NormMode::z_score;
  if (name == "besvm") return NormMode::besvm;
  fail_data("unknown normalization mode '" + name + "'");
}

json envelope(const char* type, json model) {
  return json{{"format", kFormatTag},
              {"version", kFormatVersion},
              {"type", type},
              {"model", std::move(model)}};
}

json load_envelope(const std::string& path, const char* expected_type) {
  std::ifstream in(path);
  if (!in) fail_data("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail_data("model file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormatTag) {
    fail_data("'" + path + "' is not a model file");
  }
  if (j.value("version", -1) != kFormatVersion) {
    fail_data("model file '" + path + "' has unsupported version");
  }
  if (j.value("type", "") != expected_type) {
    fail_data("model file '" + path + "' holds a '" + j.value("type", "") + "' model, expected '" +
              expected_type + "'");
  }
  return j.at("model");
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail_data("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) fail_data("write failed for '" + path + "'");
}

}  // namespace

json to_json(const SimilarityMeasure& measure) {
  const char* kind = "linear";
  switch (measure.kind) {
    case SimilarityMeasure::Kind::linear:
      kind = "linear";
      break;
    case SimilarityMeasure::Kind::rbf:
      kind = "rbf";
      break;
    case SimilarityMeasure::Kind::rigid:
      kind = "rigid";
      break;
    case SimilarityMeasure::Kind::deformable:
      kind = "deformable";
      break;
  }
  return json{{"kind", kind},
              {"gamma", measure.gamma},
              {"h_rigid", measure.h_rigid},
              {"h_local", measure.h_local},
              {"lambda", measure.lambda}};
}

SimilarityMeasure measure_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return SimilarityMeasure::linear();
  if (kind == "rbf") return SimilarityMeasure::rbf(j.at("gamma").get<double>());
  if (kind == "rigid") return SimilarityMeasure::rigid(j.at("h_rigid").get<int>());
  if (kind == "deformable") {
    return SimilarityMeasure::deformable(j.at("h_rigid").get<int>(), j.at("h_local").get<int>(),
                                         j.at("lambda").get<double>());
  }
  fail_data("unknown similarity kind '" + kind + "'");
}

json to_json(const Exemplar& exemplar) {
  if (const Vector* v = std::get_if<Vector>(&exemplar)) {
    return json{{"vector", vector_to_json(*v)}};
  }
  const FeatureGrid& g = std::get<FeatureGrid>(exemplar);
  return json{{"grid", json{{"rows", g.rows},
                            {"cols", g.cols},
                            {"cell_dim", g.cell_dim},
                            {"data", g.data}}}};
}

Exemplar exemplar_from_json(const json& j) {
  if (j.contains("vector")) return Exemplar(vector_from_json(j.at("vector"), "exemplar"));
  if (!j.contains("grid")) fail_data("exemplar is neither a vector nor a grid");
  const json& g = j.at("grid");
  FeatureGrid grid;
  grid.rows = g.at("rows").get<int>();
  grid.cols = g.at("cols").get<int>();
  grid.cell_dim = g.at("cell_dim").get<int>();
  grid.data = g.at("data").get<std::vector<double>>();
  if (grid.rows < 0 || grid.cols < 0 || grid.cell_dim < 0 ||
      grid.data.size() != static_cast<std::size_t>(grid.rows) *
                              static_cast<std::size_t>(grid.cols) *
                              static_cast<std::size_t>(grid.cell_dim)) {
    fail_data("grid exemplar has inconsistent dimensions");
  }
  return Exemplar(std::move(grid));
}

json to_json(const BasisSet& basis) {
  json payloads = json::array();
  for (const std::vector<Exemplar>& column : basis.payloads) {
    json col = json::array();
    for (const Exemplar& e : column) col.push_back(to_json(e));
    payloads.push_back(std::move(col));
  }
  return json{{"class_ids", basis.class_ids},
              {"source_indices", basis.source_indices},
              {"payloads", std::move(payloads)}};
}

BasisSet basis_from_json(const json& j) {
  BasisSet basis;
  basis.class_ids = j.at("class_ids").get<std::vector<int>>();
  basis.source_indices = j.at("source_indices").get<std::vector<std::size_t>>();
  for (const json& col : j.at("payloads")) {
    std::vector<Exemplar> column;
    column.reserve(col.size());
    for (const json& e : col) column.push_back(exemplar_from_json(e));
    if (column.size() != basis.class_ids.size()) {
      fail_data("basis payload column length does not match the class list");
    }
    basis.payloads.push_back(std::move(column));
  }
  if (basis.payloads.empty()) fail_data("basis has no payload columns");
  return basis;
}

json to_json(const VectorNormalizer& norm) {
  return json{{"mode", norm_mode_name(norm.mode)},
              {"mean", vector_to_json(norm.mean)},
              {"inv_sigma", vector_to_json(norm.inv_sigma)},
              {"scale", norm.scale}};
}

VectorNormalizer vector_normalizer_from_json(const json& j) {
  VectorNormalizer norm;
  norm.mode = norm_mode_from_name(j.at("mode").get<std::string>());
  norm.mean = vector_from_json(j.at("mean"), "normalizer mean");
  norm.inv_sigma = vector_from_json(j.at("inv_sigma"), "normalizer inv_sigma");
  norm.scale = j.at("scale").get<double>();
  return norm;
}

json to_json(const MapNormalizer& norm) {
  json stats = json::array();
  for (const NormalizationStats& s : norm.block_stats) {
    stats.push_back(json{{"mean", vector_to_json(s.mean)}, {"scale", s.scale}});
  }
  return json{{"mode", norm_mode_name(norm.mode)},
              {"block_offsets", norm.block_offsets},
              {"block_stats", std::move(stats)},
              {"mean", vector_to_json(norm.mean)},
              {"inv_sigma", vector_to_json(norm.inv_sigma)}};
}

MapNormalizer map_normalizer_from_json(const json& j) {
  MapNormalizer norm;
  norm.mode = norm_mode_from_name(j.at("mode").get<std::string>());
  norm.block_offsets = j.at("block_offsets").get<std::vector<Eigen::Index>>();
  for (const json& s : j.at("block_stats")) {
    NormalizationStats stats;
    stats.mean = vector_from_json(s.at("mean"), "block stats mean");
    stats.scale = s.at("scale").get<double>();
    norm.block_stats.push_back(std::move(stats));
  }
  norm.mean = vector_from_json(j.at("mean"), "map normalizer mean");
  norm.inv_sigma = vector_from_json(j.at("inv_sigma"), "map normalizer inv_sigma");
  return norm;
}

json to_json(const LinearModel& model) {
  return json{{"class_ids", model.class_ids},
              {"weights", matrix_to_json(model.weights)},
              {"biases", vector_to_json(model.biases)},
              {"with_bias", model.with_bias}};
}

LinearModel linear_model_from_json(const json& j) {
  LinearModel model;
  model.class_ids = j.at("class_ids").get<std::vector<int>>();
  model.weights = matrix_from_json(j.at("weights"), "linear model weights");
  model.biases = vector_from_json(j.at("biases"), "linear model biases");
  model.with_bias = j.at("with_bias").get<bool>();
  if (static_cast<std::size_t>(model.weights.rows()) != model.class_ids.size() ||
      static_cast<std::size_t>(model.biases.size()) != model.class_ids.size()) {
    fail_data("linear model row counts disagree with its class list");
  }
  return model;
}

json to_json(const KernelModel& model) {
  json machines = json::array();
  for (const KernelModel::PairMachine& m : model.machines) {
    machines.push_back(json{{"pos_class", m.pos_class},
                            {"neg_class", m.neg_class},
                            {"support", m.support},
                            {"coefficients", vector_to_json(m.coefficients)},
                            {"bias", m.bias}});
  }
  return json{{"class_ids", model.class_ids}, {"machines", std::move(machines)}};
}

KernelModel kernel_model_from_json(const json& j) {
  KernelModel model;
  model.class_ids = j.at("class_ids").get<std::vector<int>>();
  for (const json& m : j.at("machines")) {
    KernelModel::PairMachine machine;
    machine.pos_class = m.at("pos_class").get<int>();
    machine.neg_class = m.at("neg_class").get<int>();
    machine.support = m.at("support").get<std::vector<std::size_t>>();
    machine.coefficients = vector_from_json(m.at("coefficients"), "machine coefficients");
    machine.bias = m.at("bias").get<double>();
    if (machine.support.size() != static_cast<std::size_t>(machine.coefficients.size())) {
      fail_data("machine support and coefficient lengths disagree");
    }
    model.machines.push_back(std::move(machine));
  }
  return model;
}

json to_json(const EmbeddedModel& model) {
  json measures = json::array();
  for (const SimilarityMeasure& m : model.measures) measures.push_back(to_json(m));
  return json{{"measures", std::move(measures)},
              {"basis", to_json(model.basis)},
              {"norm", to_json(model.norm)},
              {"classifier", to_json(model.classifier)}};
}

EmbeddedModel embedded_model_from_json(const json& j) {
  EmbeddedModel model;
  for (const json& m : j.at("measures")) model.measures.push_back(measure_from_json(m));
  if (model.measures.empty()) fail_data("embedded model lists no measures");
  model.basis = basis_from_json(j.at("basis"));
  model.norm = map_normalizer_from_json(j.at("norm"));
  model.classifier = linear_model_from_json(j.at("classifier"));
  return model;
}

json to_json(const PipelineModel& model) {
  json norms = json::array();
  for (const VectorNormalizer& n : model.feature_norms) norms.push_back(to_json(n));
  return json{{"measure_labels", model.measure_labels},
              {"cell_sizes", model.cell_sizes},
              {"feature_norms", std::move(norms)},
              {"embedded", to_json(model.embedded)}};
}

PipelineModel pipeline_model_from_json(const json& j) {
  PipelineModel model;
  model.measure_labels = j.at("measure_labels").get<std::vector<std::string>>();
  model.cell_sizes = j.at("cell_sizes").get<std::vector<int>>();
  for (const json& n : j.at("feature_norms")) {
    model.feature_norms.push_back(vector_normalizer_from_json(n));
  }
  model.embedded = embedded_model_from_json(j.at("embedded"));
  if (model.measure_labels.size() != model.embedded.measures.size() ||
      model.cell_sizes.size() != model.embedded.measures.size() ||
      model.feature_norms.size() != model.embedded.measures.size()) {
    fail_data("pipeline model per-measure lists have mismatched lengths");
  }
  return model;
}

void save_pipeline_model(const PipelineModel& model, const std::string& path) {
  write_file(path, envelope("pipeline", to_json(model)));
}

PipelineModel load_pipeline_model(const std::string& path) {
  return pipeline_model_from_json(load_envelope(path, "pipeline"));
}

void save_kernel_model(const KernelModel& model, const std::string& path) {
  write_file(path, envelope("kernel", to_json(model)));
}

KernelModel load_kernel_model(const std::string& path) {
  return kernel_model_from_json(load_envelope(path, "kernel"));
}

}  // namespace besvm
