#include "besvm/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace besvm {

std::vector<std::size_t> FoldSplit::fold_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSplit::complement_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] != fold) out.push_back(i);
  }
  return out;
}

LabeledImageSet load_cifar10_batch(const std::string& path, std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_data("cannot open CIFAR batch '" + path + "'");
  in.seekg(0, std::ios::end);
  const std::streamoff bytes = in.tellg();
  in.seekg(0, std::ios::beg);
  const std::streamoff want =
      static_cast<std::streamoff>(expected_count) * static_cast<std::streamoff>(kCifarRecordBytes);
  if (bytes != want) {
    fail_data("CIFAR batch '" + path + "' is " + std::to_string(bytes) + " bytes, expected " +
              std::to_string(want) + " for " + std::to_string(expected_count) + " records");
  }

  LabeledImageSet set;
  set.images.reserve(expected_count);
  set.labels.reserve(expected_count);
  std::vector<char> record(kCifarRecordBytes);
  for (std::size_t i = 0; i < expected_count; ++i) {
    in.read(record.data(), static_cast<std::streamsize>(record.size()));
    if (!in) fail_data("short read in CIFAR batch '" + path + "' at record " + std::to_string(i));
    const int label = static_cast<std::uint8_t>(record[0]);
    if (label >= kCifarClassCount) {
      fail_data("CIFAR batch '" + path + "' record " + std::to_string(i) + " has label " +
                std::to_string(label));
    }
    set.labels.push_back(label);
    set.images.emplace_back(record.begin() + 1, record.end());
  }
  return set;
}

void save_cifar10_batch(const std::string& path, const LabeledImageSet& set) {
  if (set.images.size() != set.labels.size()) {
    fail_data("image/label count mismatch in CIFAR save");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_data("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    if (set.images[i].size() != kCifarImageBytes) {
      fail_data("record " + std::to_string(i) + " has " + std::to_string(set.images[i].size()) +
                " pixel bytes, expected " + std::to_string(kCifarImageBytes));
    }
    const char label = static_cast<char>(set.labels[i]);
    out.write(&label, 1);
    out.write(reinterpret_cast<const char*>(set.images[i].data()),
              static_cast<std::streamsize>(kCifarImageBytes));
  }
  if (!out) fail_data("write failed for '" + path + "'");
}

LabeledPointSet load_csv_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_data("cannot open points file '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::ptrdiff_t dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) {
      fail_data("line " + std::to_string(line_no) + " of '" + path + "' has no label");
    }
    try {
      labels.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      fail_data("bad label '" + cell + "' at line " + std::to_string(line_no) + " of '" + path +
                "'");
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail_data("bad value '" + cell + "' at line " + std::to_string(line_no) + " of '" + path +
                  "'");
      }
    }
    if (dim < 0) dim = static_cast<std::ptrdiff_t>(row.size());
    if (static_cast<std::ptrdiff_t>(row.size()) != dim) {
      fail_data("line " + std::to_string(line_no) + " of '" + path + "' has " +
                std::to_string(row.size()) + " features, expected " + std::to_string(dim));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail_data("points file '" + path + "' is empty");

  LabeledPointSet set;
  set.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::ptrdiff_t j = 0; j < dim; ++j) {
      set.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  set.labels = std::move(labels);
  return set;
}

LabeledPointSet make_two_rings(int n_per_class, double r1, double r2, double noise_sigma,
                               std::uint64_t seed) {
  if (n_per_class < 1) fail_config("need at least one sample per ring");
  Rng rng(seed);
  LabeledPointSet set;
  set.points.resize(2 * n_per_class, 2);
  set.labels.resize(static_cast<std::size_t>(2 * n_per_class));
  const double two_pi = 8.0 * std::atan(1.0);
  for (int c = 0; c < 2; ++c) {
    const double radius = (c == 0) ? r1 : r2;
    for (int i = 0; i < n_per_class; ++i) {
      const double angle = rng.uniform(0.0, two_pi);
      const Eigen::Index row = static_cast<Eigen::Index>(c) * n_per_class + i;
      set.points(row, 0) = radius * std::cos(angle) + noise_sigma * rng.gaussian();
      set.points(row, 1) = radius * std::sin(angle) + noise_sigma * rng.gaussian();
      set.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return set;
}

FoldSplit split_folds(std::size_t n, const std::vector<std::size_t>& fold_sizes) {
  std::size_t total = 0;
  for (std::size_t s : fold_sizes) total += s;
  if (total != n) {
    fail_config("fold sizes sum to " + std::to_string(total) + ", expected " + std::to_string(n));
  }
  FoldSplit split;
  split.fold_count = static_cast<int>(fold_sizes.size());
  split.fold_assignments.reserve(n);
  for (std::size_t f = 0; f < fold_sizes.size(); ++f) {
    for (std::size_t i = 0; i < fold_sizes[f]; ++i) {
      split.fold_assignments.push_back(static_cast<int>(f));
    }
  }
  return split;
}

FoldSplit split_even_folds(std::size_t n, int folds) {
  if (folds < 1) fail_config("fold count must be positive");
  if (static_cast<std::size_t>(folds) > n) {
    fail_config("cannot split " + std::to_string(n) + " samples into " + std::to_string(folds) +
                " folds");
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(folds), n / folds);
  for (std::size_t f = 0; f < n % folds; ++f) ++sizes[f];
  return split_folds(n, sizes);
}

Raster to_raster(const LabeledImageSet& set, std::size_t index) {
  if (index >= set.images.size()) fail_data("image index out of range");
  Raster r;
  r.height = set.height;
  r.width = set.width;
  r.channels = set.channels;
  r.pixels = set.images[index];
  return r;
}

std::vector<Raster> make_texture_rasters(int count, int height, int width, std::uint64_t seed) {
  if (count < 1 || height < 1 || width < 1) fail_config("texture raster dimensions must be positive");
  Rng rng(seed);
  std::vector<Raster> out;
  out.reserve(static_cast<std::size_t>(count));
  const double pi = 4.0 * std::atan(1.0);
  for (int k = 0; k < count; ++k) {
    Raster r;
    r.height = height;
    r.width = width;
    r.channels = 1;
    r.pixels.resize(static_cast<std::size_t>(height) * width);

    // Superpose a handful of oriented sinusoids so gradients have structure
    // at several scales, then add pixel noise.
    const int waves = 2 + static_cast<int>(rng.uniform_int(0, 2));
    std::vector<double> freq(waves), angle(waves), phase(waves), amp(waves);
    for (int w = 0; w < waves; ++w) {
      freq[w] = rng.uniform(0.15, 0.9);
      angle[w] = rng.uniform(0.0, pi);
      phase[w] = rng.uniform(0.0, 2.0 * pi);
      amp[w] = rng.uniform(0.4, 1.0);
    }
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = 0.0;
        for (int w = 0; w < waves; ++w) {
          const double t = freq[w] * (std::cos(angle[w]) * x + std::sin(angle[w]) * y) + phase[w];
          v += amp[w] * std::sin(t);
        }
        v += 0.3 * rng.gaussian();
        const double scaled = 127.5 + 50.0 * v;
        const double clamped = scaled < 0.0 ? 0.0 : (scaled > 255.0 ? 255.0 : scaled);
        r.pixels[static_cast<std::size_t>(y) * width + x] =
            static_cast<std::uint8_t>(clamped + 0.5);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace besvm
