#include "besvm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "besvm/analysis.hpp"

namespace besvm {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_data("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_data("cannot open '" + path + "' for writing");
  return out;
}

void note_timing(const std::string& dir, const std::string& what, double seconds) {
  std::ofstream log(dir + "/timing.log", std::ios::app);
  log << what << " " << format_double(seconds) << "\n";
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// metric,label,value rows in long format so reports pivot easily.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path) : out_(open_output(path)), path_(path) {
    out_ << "metric,label,value\n";
  }
  void row(const std::string& metric, const std::string& label, double value) {
    out_ << metric << "," << label << "," << format_double(value) << "\n";
  }
  void row_count(const std::string& metric, const std::string& label, long long value) {
    out_ << metric << "," << label << "," << value << "\n";
  }
  ~MetricsWriter() { std::printf("wrote %s\n", path_.c_str()); }

 private:
  std::ofstream out_;
  std::string path_;
};

void write_accuracy_rows(MetricsWriter& w, const std::vector<int>& truth,
                         const std::vector<int>& predicted) {
  std::size_t hits = 0;
  std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // class -> (hits, total)
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& [class_hits, class_total] = per_class[truth[i]];
    ++class_total;
    if (predicted[i] == truth[i]) {
      ++hits;
      ++class_hits;
    }
  }
  w.row("accuracy", "overall", static_cast<double>(hits) / static_cast<double>(truth.size()));
  for (const auto& [class_id, counts] : per_class) {
    w.row("accuracy", "class_" + std::to_string(class_id),
          static_cast<double>(counts.first) / static_cast<double>(counts.second));
  }
}

std::vector<int> class_cell_sizes(const std::vector<MeasureSpec>& specs) {
  std::vector<int> cells;
  cells.reserve(specs.size());
  for (const MeasureSpec& s : specs) cells.push_back(s.cell_size);
  return cells;
}

std::vector<SimilarityMeasure> measure_list(const std::vector<MeasureSpec>& specs) {
  std::vector<SimilarityMeasure> measures;
  measures.reserve(specs.size());
  for (const MeasureSpec& s : specs) measures.push_back(s.measure);
  return measures;
}

void apply_limit(LoadedData& data, int limit) {
  if (limit <= 0 || static_cast<std::size_t>(limit) >= data.size()) return;
  data.labels.resize(static_cast<std::size_t>(limit));
  if (!data.vectors.empty()) data.vectors.resize(static_cast<std::size_t>(limit));
  if (!data.rasters.empty()) data.rasters.resize(static_cast<std::size_t>(limit));
}

std::vector<std::vector<Exemplar>> subset_columns(
    const std::vector<std::vector<Exemplar>>& columns, const std::vector<std::size_t>& indices) {
  std::vector<std::vector<Exemplar>> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out[c].reserve(indices.size());
    for (std::size_t i : indices) out[c].push_back(columns[c].at(i));
  }
  return out;
}

std::vector<int> subset_labels(const std::vector<int>& labels,
                               const std::vector<std::size_t>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

}  // namespace

LoadedData load_dataset(const DatasetSpec& spec) {
  LoadedData data;
  if (spec.kind == "rings") {
    const LabeledPointSet rings =
        make_two_rings(spec.n_per_class, spec.r1, spec.r2, spec.noise_sigma, spec.seed);
    // Interleave the two classes so contiguous folds stay balanced.
    for (int i = 0; i < spec.n_per_class; ++i) {
      data.vectors.push_back(rings.points.row(i).transpose());
      data.labels.push_back(rings.labels[static_cast<std::size_t>(i)]);
      data.vectors.push_back(rings.points.row(spec.n_per_class + i).transpose());
      data.labels.push_back(rings.labels[static_cast<std::size_t>(spec.n_per_class + i)]);
    }
  } else if (spec.kind == "csv") {
    const LabeledPointSet points = load_csv_points(spec.path);
    for (Eigen::Index i = 0; i < points.points.rows(); ++i) {
      data.vectors.push_back(points.points.row(i).transpose());
    }
    data.labels = points.labels;
  } else if (spec.kind == "cifar10") {
    const LabeledImageSet set =
        load_cifar10_batch(spec.path, static_cast<std::size_t>(spec.expected_count));
    data.is_image = true;
    for (std::size_t i = 0; i < set.size(); ++i) data.rasters.push_back(to_raster(set, i));
    data.labels = set.labels;
  } else if (spec.kind == "textures") {
    data.is_image = true;
    data.rasters = make_texture_rasters(spec.count, spec.height, spec.width, spec.seed);
    // Synthetic rasters carry no classes; alternate labels so per-class
    // selection and timing runs have something to group by.
    for (std::size_t i = 0; i < data.rasters.size(); ++i) {
      data.labels.push_back(static_cast<int>(i % 2));
    }
  } else {
    fail_config("unknown dataset kind '" + spec.kind + "'");
  }
  apply_limit(data, spec.limit);
  return data;
}

std::vector<std::vector<Exemplar>> build_raw_columns(const LoadedData& data,
                                                     const std::vector<MeasureSpec>& specs) {
  if (specs.empty()) fail_config("the measure list is empty");
  std::vector<std::vector<Exemplar>> columns;

  std::map<int, std::vector<FeatureGrid>> grids_by_cell;
  for (const MeasureSpec& spec : specs) {
    if (spec.cell_size > 0 && !data.is_image) {
      fail_config("measure '" + spec.label + "' needs an image dataset");
    }
    if (spec.cell_size == 0 && data.is_image) {
      fail_config("measure '" + spec.label + "' has no cell size; image data needs H labels");
    }
    if (spec.cell_size > 0 && grids_by_cell.find(spec.cell_size) == grids_by_cell.end()) {
      grids_by_cell[spec.cell_size] = compute_hog_grids(data.rasters, spec.cell_size);
    }
  }

  for (const MeasureSpec& spec : specs) {
    std::vector<Exemplar> column;
    column.reserve(data.size());
    if (spec.cell_size == 0) {
      for (const Vector& v : data.vectors) column.emplace_back(v);
    } else {
      for (const FeatureGrid& g : grids_by_cell[spec.cell_size]) column.emplace_back(g);
    }
    columns.push_back(std::move(column));
  }
  return columns;
}

Vector exemplar_flat(const Exemplar& exemplar) {
  if (const Vector* v = std::get_if<Vector>(&exemplar)) return *v;
  return flatten_grid(std::get<FeatureGrid>(exemplar));
}

Exemplar normalize_exemplar(const VectorNormalizer& norm, const Exemplar& exemplar) {
  if (const Vector* v = std::get_if<Vector>(&exemplar)) {
    return Exemplar(apply_vector_normalizer(norm, *v));
  }
  const FeatureGrid& grid = std::get<FeatureGrid>(exemplar);
  const Vector flat = apply_vector_normalizer(norm, flatten_grid(grid));
  FeatureGrid out;
  out.rows = grid.rows;
  out.cols = grid.cols;
  out.cell_dim = grid.cell_dim;
  out.data.assign(flat.data(), flat.data() + flat.size());
  return Exemplar(std::move(out));
}

std::vector<VectorNormalizer> fit_feature_norms(
    const std::vector<std::vector<Exemplar>>& raw_columns, NormMode mode) {
  std::vector<VectorNormalizer> norms;
  norms.reserve(raw_columns.size());
  for (const std::vector<Exemplar>& column : raw_columns) {
    if (mode == NormMode::unnorm) {
      norms.emplace_back();
      continue;
    }
    std::vector<Vector> flats;
    flats.reserve(column.size());
    for (const Exemplar& e : column) flats.push_back(exemplar_flat(e));
    norms.push_back(fit_vector_normalizer(flats, mode));
  }
  return norms;
}

std::vector<std::vector<Exemplar>> apply_feature_norms(
    const std::vector<VectorNormalizer>& norms,
    const std::vector<std::vector<Exemplar>>& raw_columns) {
  if (norms.size() != raw_columns.size()) fail_config("one feature normalizer per column");
  std::vector<std::vector<Exemplar>> out(raw_columns.size());
  for (std::size_t c = 0; c < raw_columns.size(); ++c) {
    if (norms[c].mode == NormMode::unnorm) {
      out[c] = raw_columns[c];
      continue;
    }
    out[c].reserve(raw_columns[c].size());
    for (const Exemplar& e : raw_columns[c]) out[c].push_back(normalize_exemplar(norms[c], e));
  }
  return out;
}

void run_train(const ExperimentConfig& config) {
  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, config.measures);
  const std::vector<SimilarityMeasure> measures = measure_list(config.measures);

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<VectorNormalizer> norms = fit_feature_norms(raw, config.feature_norm);
  const std::vector<std::vector<Exemplar>> columns = apply_feature_norms(norms, raw);
  const std::vector<std::size_t> indices =
      select_basis_indices(config.basis, columns, data.labels, measures);
  const BasisSet basis = make_basis(columns, data.labels, indices);

  EmbeddedTrainConfig train_config;
  train_config.solver = config.solver;
  train_config.map_norm = config.map_norm;
  const EmbeddedModel embedded = train_embedded(basis, measures, columns, data.labels,
                                                train_config);
  const double train_seconds = seconds_since(t0);

  PipelineModel model;
  for (const MeasureSpec& spec : config.measures) model.measure_labels.push_back(spec.label);
  model.cell_sizes = class_cell_sizes(config.measures);
  model.feature_norms = norms;
  model.embedded = embedded;

  ensure_dir(config.output_dir);
  const std::string model_path = config.output_dir + "/model.json";
  save_pipeline_model(model, model_path);
  std::printf("wrote %s\n", model_path.c_str());

  const std::vector<int> predicted = predict_embedded(embedded, columns);
  MetricsWriter metrics(config.output_dir + "/metrics.csv");
  write_accuracy_rows(metrics, data.labels, predicted);
  metrics.row_count("samples", "", static_cast<long long>(data.size()));
  metrics.row_count("basis_size", "", static_cast<long long>(basis.size()));
  metrics.row_count("measures", "", static_cast<long long>(measures.size()));
  metrics.row_count("parameters", "",
                    static_cast<long long>(embedded.classifier.weights.rows()) *
                        static_cast<long long>(embedded.classifier.weights.cols()));
  note_timing(config.output_dir, "train_seconds", train_seconds);
}

void run_eval(const ExperimentConfig& config) {
  if (config.model_path.empty()) fail_config("eval needs eval.model pointing at a model file");
  const PipelineModel model = load_pipeline_model(config.model_path);

  std::vector<MeasureSpec> specs;
  for (std::size_t m = 0; m < model.measure_labels.size(); ++m) {
    MeasureSpec spec = parse_measure_label(model.measure_labels[m]);
    if (spec.cell_size != model.cell_sizes[m]) {
      fail_data("model cell sizes disagree with its measure labels");
    }
    specs.push_back(std::move(spec));
  }

  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, specs);
  const std::vector<std::vector<Exemplar>> columns = apply_feature_norms(model.feature_norms, raw);
  const std::vector<int> predicted = predict_embedded(model.embedded, columns);

  ensure_dir(config.output_dir);
  MetricsWriter metrics(config.output_dir + "/eval_metrics.csv");
  write_accuracy_rows(metrics, data.labels, predicted);
  metrics.row_count("samples", "", static_cast<long long>(data.size()));
}

void run_select_basis(const ExperimentConfig& config) {
  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, config.measures);
  const std::vector<VectorNormalizer> norms = fit_feature_norms(raw, config.feature_norm);
  const std::vector<std::vector<Exemplar>> columns = apply_feature_norms(norms, raw);
  const std::vector<std::size_t> indices =
      select_basis_indices(config.basis, columns, data.labels, measure_list(config.measures));

  ensure_dir(config.output_dir);
  const std::string path = config.output_dir + "/basis.csv";
  std::ofstream out = open_output(path);
  out << "position,dataset_index,class_id\n";
  for (std::size_t p = 0; p < indices.size(); ++p) {
    out << p << "," << indices[p] << "," << data.labels.at(indices[p]) << "\n";
  }
  std::printf("wrote %s\n", path.c_str());
}

void run_embed(const ExperimentConfig& config) {
  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, config.measures);
  const std::vector<SimilarityMeasure> measures = measure_list(config.measures);
  const std::vector<VectorNormalizer> norms = fit_feature_norms(raw, config.feature_norm);
  const std::vector<std::vector<Exemplar>> columns = apply_feature_norms(norms, raw);
  const std::vector<std::size_t> indices =
      select_basis_indices(config.basis, columns, data.labels, measures);
  const BasisSet basis = make_basis(columns, data.labels, indices);

  Matrix embedded;
  if (config.embed_method == "map") {
    embedded = raw_map_matrix(basis, measures, columns);
    std::vector<Eigen::Index> offsets;
    for (std::size_t m = 0; m <= measures.size(); ++m) {
      offsets.push_back(static_cast<Eigen::Index>(m * basis.size()));
    }
    apply_map_normalizer(fit_map_normalizer(embedded, offsets, config.map_norm), embedded);
  } else if (config.embed_method.rfind("nystrom-", 0) == 0) {
    const std::string fix_name = config.embed_method.substr(8);
    SpectrumFixMode fix;
    if (fix_name == "clip") {
      fix = SpectrumFixMode::clip;
    } else if (fix_name == "flip") {
      fix = SpectrumFixMode::flip;
    } else if (fix_name == "shift") {
      fix = SpectrumFixMode::shift;
    } else if (fix_name == "square") {
      fix = SpectrumFixMode::square;
    } else {
      fail_config("unknown spectrum fix '" + fix_name + "'");
    }
    embedded.resize(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(measures.size() * basis.size()));
    for (std::size_t m = 0; m < measures.size(); ++m) {
      const std::vector<Exemplar>& basis_col = basis.payload_column(m);
      const std::vector<Exemplar>& sample_col = columns.size() == 1 ? columns[0] : columns[m];
      const Matrix k_bb = gram(measures[m], basis_col, basis_col).values;
      const Matrix k_bx = gram(measures[m], basis_col, sample_col).values;
      embedded.middleCols(static_cast<Eigen::Index>(m * basis.size()),
                          static_cast<Eigen::Index>(basis.size())) =
          nystrom_embed(k_bb, k_bx, fix).transpose();
    }
  } else {
    fail_config("unknown embed method '" + config.embed_method + "'");
  }

  ensure_dir(config.output_dir);
  const std::string path = config.output_dir + "/embedding.csv";
  std::ofstream out = open_output(path);
  out << "label";
  for (Eigen::Index d = 0; d < embedded.cols(); ++d) out << ",e" << d;
  out << "\n";
  for (Eigen::Index i = 0; i < embedded.rows(); ++i) {
    out << data.labels.at(static_cast<std::size_t>(i));
    for (Eigen::Index d = 0; d < embedded.cols(); ++d) {
      out << "," << format_double(embedded(i, d));
    }
    out << "\n";
  }
  std::printf("wrote %s\n", path.c_str());
}

void run_analyze(const ExperimentConfig& config) {
  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, config.measures);
  const std::vector<SimilarityMeasure> measures = measure_list(config.measures);
  const std::vector<VectorNormalizer> norms = fit_feature_norms(raw, config.feature_norm);
  const std::vector<std::vector<Exemplar>> columns = apply_feature_norms(norms, raw);
  const std::vector<std::size_t> indices =
      select_basis_indices(config.basis, columns, data.labels, measures);
  const BasisSet basis = make_basis(columns, data.labels, indices);

  if (!config.analyze_accuracies.empty() &&
      config.analyze_accuracies.size() != measures.size()) {
    fail_config("analyze.accuracies must list one value per measure");
  }

  ensure_dir(config.output_dir);
  MetricsWriter metrics(config.output_dir + "/analyze.csv");
  std::vector<double> ratios;
  std::vector<double> energies;
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const std::vector<Exemplar>& basis_col = basis.payload_column(m);
    const Matrix self = gram(measures[m], basis_col, basis_col).values;
    const EigenDecomposition eig = sym_eigen(symmetrize(self));
    const double ratio = neg_ratio(eig.eigenvalues);
    const double energy = neg_energy(eig.eigenvalues);
    metrics.row("neg_ratio", config.measures[m].label, ratio);
    metrics.row("neg_energy", config.measures[m].label, energy);
    ratios.push_back(ratio);
    energies.push_back(energy);
  }
  if (!config.analyze_accuracies.empty()) {
    metrics.row("pearson_vs_accuracy", "neg_ratio",
                pearson_r(ratios, config.analyze_accuracies));
    metrics.row("pearson_vs_accuracy", "neg_energy",
                pearson_r(energies, config.analyze_accuracies));
  }
}

void run_bench(const ExperimentConfig& config) {
  for (const MeasureSpec& spec : config.measures) {
    if (spec.cell_size > 0) {
      fail_config("bench runs on synthetic vector data; measure '" + spec.label +
                  "' needs images");
    }
  }
  const std::vector<SimilarityMeasure> measures = measure_list(config.measures);
  if (measures.empty()) fail_config("the measure list is empty");

  ensure_dir(config.output_dir);
  const std::string path = config.output_dir + "/bench.csv";
  std::ofstream out = open_output(path);
  out << "method,n,basis,time_ms\n";

  for (int n : config.bench.sizes) {
    if (n < 2) fail_config("bench sizes must be at least 2");
    DatasetSpec synth;
    synth.kind = "rings";
    synth.n_per_class = n / 2;
    synth.seed = config.dataset.seed;
    const LoadedData data = load_dataset(synth);

    std::vector<std::vector<Exemplar>> columns(1);
    for (const Vector& v : data.vectors) columns[0].emplace_back(v);

    BasisSpec basis_spec = config.basis;
    basis_spec.per_class = config.bench.per_class_basis;
    const std::vector<std::size_t> indices =
        select_basis_indices(basis_spec, columns, data.labels, measures);
    const BasisSet basis = make_basis(columns, data.labels, indices);

    EmbeddedTrainConfig train_config;
    train_config.solver = config.solver;
    train_config.map_norm = config.map_norm;
    auto t0 = std::chrono::steady_clock::now();
    train_embedded(basis, measures, columns, data.labels, train_config);
    out << "embedded," << data.size() << "," << basis.size() << ","
        << format_double(1000.0 * seconds_since(t0)) << "\n";

    t0 = std::chrono::steady_clock::now();
    const Matrix k = gram(measures[0], columns[0], columns[0]).values;
    train_one_vs_one(symmetrize(k), data.labels, config.kernel_c, config.kernel_tol);
    out << "kernel," << data.size() << "," << data.size() << ","
        << format_double(1000.0 * seconds_since(t0)) << "\n";
  }
  std::printf("wrote %s\n", path.c_str());
}

void run_cv(const ExperimentConfig& config) {
  const LoadedData data = load_dataset(config.dataset);
  const std::vector<std::vector<Exemplar>> raw = build_raw_columns(data, config.measures);
  const std::vector<SimilarityMeasure> measures = measure_list(config.measures);
  const FoldSplit folds = split_even_folds(data.size(), config.folds);

  EmbeddedTrainConfig train_config;
  train_config.solver = config.solver;
  train_config.map_norm = config.map_norm;

  // Everything fitted, including the feature normalizers, sees only the
  // fold's training rows.
  const CvResult result =
      cross_validate(data.labels, folds, [&](const std::vector<std::size_t>& train_idx) {
        const std::vector<std::vector<Exemplar>> train_raw = subset_columns(raw, train_idx);
        const std::vector<int> train_labels = subset_labels(data.labels, train_idx);
        const std::vector<VectorNormalizer> norms =
            fit_feature_norms(train_raw, config.feature_norm);
        const std::vector<std::vector<Exemplar>> train_cols =
            apply_feature_norms(norms, train_raw);
        const std::vector<std::size_t> local =
            select_basis_indices(config.basis, train_cols, train_labels, measures);
        BasisSet basis = make_basis(train_cols, train_labels, local);
        for (std::size_t& s : basis.source_indices) s = train_idx[s];
        EmbeddedModel model =
            train_embedded(basis, measures, train_cols, train_labels, train_config);
        return [&raw, norms, model = std::move(model)](const std::vector<std::size_t>& test_idx) {
          return predict_embedded(model,
                                  apply_feature_norms(norms, subset_columns(raw, test_idx)));
        };
      });

  ensure_dir(config.output_dir);
  MetricsWriter metrics(config.output_dir + "/cv.csv");
  for (std::size_t f = 0; f < result.fold_accuracies.size(); ++f) {
    metrics.row("accuracy", "fold_" + std::to_string(f), result.fold_accuracies[f]);
  }
  metrics.row("accuracy", "mean", result.mean_accuracy);
  metrics.row_count("folds", "", static_cast<long long>(result.fold_accuracies.size()));
}

}  // namespace besvm
