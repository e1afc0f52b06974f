#include "besvm/config.hpp"

#include <cctype>
#include <fstream>

namespace besvm {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail_config(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail_config("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail_config("bad value for '" + std::string(key) + "' in " + where);
  }
}

int parse_positive_int(const std::string& text, const std::string& label) {
  int value = 0;
  bool any = false;
  for (char ch : text) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      fail_config("unparseable measure label '" + label + "'");
    }
    value = value * 10 + (ch - '0');
    any = true;
    if (value > 1000000) fail_config("unreasonable number in measure label '" + label + "'");
  }
  if (!any) fail_config("unparseable measure label '" + label + "'");
  return value;
}

}  // namespace

MeasureSpec parse_measure_label(const std::string& label) {
  MeasureSpec spec;
  spec.label = label;

  if (!label.empty() && label[0] == 'H') {
    std::size_t pos = 1;
    while (pos < label.size() && std::isdigit(static_cast<unsigned char>(label[pos]))) ++pos;
    if (pos == 1 || pos >= label.size()) {
      fail_config("unparseable measure label '" + label + "'");
    }
    spec.cell_size = parse_positive_int(label.substr(1, pos - 1), label);
    if (spec.cell_size < 1) fail_config("cell size must be positive in '" + label + "'");

    const std::string rest = label.substr(pos);
    if (rest == "L") {
      spec.measure = SimilarityMeasure::linear();
      return spec;
    }
    if (rest == "R") {
      spec.measure = SimilarityMeasure::rbf(1.0);
      return spec;
    }
    if (rest.size() >= 5 && rest.front() == '(' && rest.back() == ')') {
      const std::size_t comma = rest.find(',');
      if (comma != std::string::npos && comma > 1 && comma + 2 < rest.size()) {
        const int h_rigid = parse_positive_int(rest.substr(1, comma - 1), label);
        const int h_local = parse_positive_int(rest.substr(comma + 1, rest.size() - comma - 2),
                                               label);
        // Local deformations of zero collapse to the rigid measure; the
        // figures use the (h_R,0) spelling for it.
        spec.measure = h_local == 0 ? SimilarityMeasure::rigid(h_rigid)
                                    : SimilarityMeasure::deformable(h_rigid, h_local, 0.0);
        return spec;
      }
    }
    fail_config("unparseable measure label '" + label + "'");
  }

  if (label == "linear") {
    spec.measure = SimilarityMeasure::linear();
    return spec;
  }
  if (label == "rbf") {
    spec.measure = SimilarityMeasure::rbf(1.0);
    return spec;
  }
  if (label.rfind("rbf:", 0) == 0) {
    const std::string value = label.substr(4);
    try {
      std::size_t used = 0;
      const double gamma = std::stod(value, &used);
      if (used == value.size()) {
        spec.measure = SimilarityMeasure::rbf(gamma);
        return spec;
      }
    } catch (const std::exception&) {
    }
    fail_config("unparseable measure label '" + label + "'");
  }
  fail_config("unparseable measure label '" + label + "'");
}

const char* norm_mode_label(NormMode mode) {
  switch (mode) {
    case NormMode::unnorm:
      return "unnorm";
    case NormMode::z_score:
      return "zscore";
    case NormMode::besvm:
      return "besvm";
  }
  return "unnorm";
}

NormMode parse_norm_mode(const std::string& name) {
  if (name == "unnorm") return NormMode::unnorm;
  if (name == "zscore") return NormMode::z_score;
  if (name == "besvm") return NormMode::besvm;
  fail_config("unknown normalization mode '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "the config", {"dataset", "measures", "basis", "normalization", "solver",
                               "folds", "seed", "output_dir", "bench", "analyze", "eval",
                               "embed"});
  ExperimentConfig config;

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    check_keys(d, "dataset", {"kind", "path", "expected_count", "limit", "n_per_class", "r1",
                              "r2", "noise_sigma", "count", "height", "width", "seed"});
    config.dataset.kind = get_or<std::string>(d, "kind", config.dataset.kind, "dataset");
    if (config.dataset.kind != "rings" && config.dataset.kind != "csv" &&
        config.dataset.kind != "cifar10" && config.dataset.kind != "textures") {
      fail_config("unknown dataset kind '" + config.dataset.kind + "'");
    }
    config.dataset.path = get_or<std::string>(d, "path", config.dataset.path, "dataset");
    config.dataset.expected_count =
        get_or(d, "expected_count", config.dataset.expected_count, "dataset");
    config.dataset.limit = get_or(d, "limit", config.dataset.limit, "dataset");
    config.dataset.n_per_class = get_or(d, "n_per_class", config.dataset.n_per_class, "dataset");
    config.dataset.r1 = get_or(d, "r1", config.dataset.r1, "dataset");
    config.dataset.r2 = get_or(d, "r2", config.dataset.r2, "dataset");
    config.dataset.noise_sigma = get_or(d, "noise_sigma", config.dataset.noise_sigma, "dataset");
    config.dataset.count = get_or(d, "count", config.dataset.count, "dataset");
    config.dataset.height = get_or(d, "height", config.dataset.height, "dataset");
    config.dataset.width = get_or(d, "width", config.dataset.width, "dataset");
    config.dataset.seed = get_or(d, "seed", config.dataset.seed, "dataset");
  }

  for (const std::string& label :
       get_or<std::vector<std::string>>(j, "measures", {}, "the config")) {
    config.measures.push_back(parse_measure_label(label));
  }

  if (j.contains("basis")) {
    const json& b = j.at("basis");
    check_keys(b, "basis",
               {"strategy", "per_class", "kmedoids_max_iter", "kmedoids_measure", "seed"});
    const std::string strategy = get_or<std::string>(b, "strategy", "random", "basis");
    if (strategy == "random") {
      config.basis.strategy = BasisSpec::Strategy::random;
    } else if (strategy == "index") {
      config.basis.strategy = BasisSpec::Strategy::index_stride;
    } else if (strategy == "kmedoids") {
      config.basis.strategy = BasisSpec::Strategy::kmedoids;
    } else {
      fail_config("unknown basis strategy '" + strategy + "'");
    }
    config.basis.per_class = get_or(b, "per_class", config.basis.per_class, "basis");
    config.basis.kmedoids_max_iter =
        get_or(b, "kmedoids_max_iter", config.basis.kmedoids_max_iter, "basis");
    config.basis.kmedoids_measure =
        get_or(b, "kmedoids_measure", config.basis.kmedoids_measure, "basis");
    config.basis.seed = get_or(b, "seed", config.basis.seed, "basis");
  }

  if (j.contains("normalization")) {
    const json& n = j.at("normalization");
    check_keys(n, "normalization", {"features", "map"});
    config.feature_norm =
        parse_norm_mode(get_or<std::string>(n, "features", "besvm", "normalization"));
    config.map_norm = parse_norm_mode(get_or<std::string>(n, "map", "besvm", "normalization"));
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver",
               {"C", "loss", "epsilon", "with_bias", "max_sweeps", "kernel_C", "kernel_tol"});
    config.solver.c = get_or(s, "C", config.solver.c, "solver");
    const std::string loss = get_or<std::string>(s, "loss", "squared_hinge", "solver");
    if (loss == "squared_hinge") {
      config.solver.loss = LinearLoss::squared_hinge;
    } else if (loss == "hinge") {
      config.solver.loss = LinearLoss::hinge;
    } else {
      fail_config("unknown loss '" + loss + "'");
    }
    config.solver.epsilon = get_or(s, "epsilon", config.solver.epsilon, "solver");
    config.solver.with_bias = get_or(s, "with_bias", config.solver.with_bias, "solver");
    config.solver.max_sweeps = get_or(s, "max_sweeps", config.solver.max_sweeps, "solver");
    config.kernel_c = get_or(s, "kernel_C", config.kernel_c, "solver");
    config.kernel_tol = get_or(s, "kernel_tol", config.kernel_tol, "solver");
  }

  config.folds = get_or(j, "folds", config.folds, "the config");
  config.seed = get_or(j, "seed", config.seed, "the config");
  config.solver.seed = config.seed;
  config.output_dir = get_or<std::string>(j, "output_dir", config.output_dir, "the config");

  if (j.contains("bench")) {
    const json& b = j.at("bench");
    check_keys(b, "bench", {"sizes", "per_class_basis"});
    config.bench.sizes = get_or(b, "sizes", config.bench.sizes, "bench");
    config.bench.per_class_basis =
        get_or(b, "per_class_basis", config.bench.per_class_basis, "bench");
  }

  if (j.contains("analyze")) {
    const json& a = j.at("analyze");
    check_keys(a, "analyze", {"accuracies"});
    config.analyze_accuracies =
        get_or<std::vector<double>>(a, "accuracies", {}, "analyze");
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e, "eval", {"model"});
    config.model_path = get_or<std::string>(e, "model", "", "eval");
  }

  if (j.contains("embed")) {
    const json& e = j.at("embed");
    check_keys(e, "embed", {"method"});
    config.embed_method = get_or<std::string>(e, "method", config.embed_method, "embed");
  }

  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json measures = json::array();
  for (const MeasureSpec& m : config.measures) measures.push_back(m.label);

  const char* strategy = "random";
  switch (config.basis.strategy) {
    case BasisSpec::Strategy::random:
      strategy = "random";
      break;
    case BasisSpec::Strategy::index_stride:
      strategy = "index";
      break;
    case BasisSpec::Strategy::kmedoids:
      strategy = "kmedoids";
      break;
  }

  return json{
      {"dataset",
       {{"kind", config.dataset.kind},
        {"path", config.dataset.path},
        {"expected_count", config.dataset.expected_count},
        {"limit", config.dataset.limit},
        {"n_per_class", config.dataset.n_per_class},
        {"r1", config.dataset.r1},
        {"r2", config.dataset.r2},
        {"noise_sigma", config.dataset.noise_sigma},
        {"count", config.dataset.count},
        {"height", config.dataset.height},
        {"width", config.dataset.width},
        {"seed", config.dataset.seed}}},
      {"measures", std::move(measures)},
      {"basis",
       {{"strategy", strategy},
        {"per_class", config.basis.per_class},
        {"kmedoids_max_iter", config.basis.kmedoids_max_iter},
        {"kmedoids_measure", config.basis.kmedoids_measure},
        {"seed", config.basis.seed}}},
      {"normalization",
       {{"features", norm_mode_label(config.feature_norm)},
        {"map", norm_mode_label(config.map_norm)}}},
      {"solver",
       {{"C", config.solver.c},
        {"loss", config.solver.loss == LinearLoss::hinge ? "hinge" : "squared_hinge"},
        {"epsilon", config.solver.epsilon},
        {"with_bias", config.solver.with_bias},
        {"max_sweeps", config.solver.max_sweeps},
        {"kernel_C", config.kernel_c},
        {"kernel_tol", config.kernel_tol}}},
      {"folds", config.folds},
      {"seed", config.seed},
      {"output_dir", config.output_dir},
      {"bench", {{"sizes", config.bench.sizes}, {"per_class_basis", config.bench.per_class_basis}}},
      {"analyze", {{"accuracies", config.analyze_accuracies}}},
      {"eval", {{"model", config.model_path}}},
      {"embed", {{"method", config.embed_method}}}};
}

void apply_override(json& j, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail_config("override '" + assignment + "' is not of the form path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) fail_config("override '" + assignment + "' has an empty path segment");
    if (dot == std::string::npos) {
      json value;
      try {
        value = json::parse(value_text);
      } catch (const json::parse_error&) {
        value = value_text;  // unquoted strings arrive as-is
      }
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    if (!node->is_object()) fail_config("override '" + assignment + "' descends into a non-object");
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail_config("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail_config("config file '" + path + "' is not valid JSON: " + std::string(e.what()));
  }
  for (const std::string& assignment : overrides) apply_override(j, assignment);
  return parse_config(j);
}

}  // namespace besvm
