#pragma once

#include "besvm/core.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace besvm {

// CIFAR-10 binary batch layout: 3073-byte records, one label byte followed
// by 3072 pixel bytes in channel-planar order (R plane, G plane, B plane),
// each plane row-major.
inline constexpr std::size_t kCifarImageBytes = 3072;
inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr int kCifarClassCount = 10;

struct LabeledImageSet {
  int height = 32;
  int width = 32;
  int channels = 3;
  std::vector<std::vector<std::uint8_t>> images;  // channel-planar, row-major
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
};

struct LabeledPointSet {
  Matrix points;            // n x d
  std::vector<int> labels;  // n

  std::size_t size() const { return labels.size(); }
};

struct FoldSplit {
  std::vector<int> fold_assignments;  // one entry per sample, value in [0, fold_count)
  int fold_count = 0;

  std::vector<std::size_t> fold_indices(int fold) const;
  std::vector<std::size_t> complement_indices(int fold) const;
};

LabeledImageSet load_cifar10_batch(const std::string& path, std::size_t expected_count);
void save_cifar10_batch(const std::string& path, const LabeledImageSet& set);

// One sample per line: integer label first, comma-separated features after,
// '.' as the decimal point.
LabeledPointSet load_csv_points(const std::string& path);

// Two concentric rings: class 0 at radius r1 (first n_per_class rows), class 1
// at radius r2, angles uniform, isotropic Gaussian noise of the given sigma.
LabeledPointSet make_two_rings(int n_per_class, double r1, double r2, double noise_sigma,
                               std::uint64_t seed);

// Contiguous assignment: the first fold_sizes[0] samples go to fold 0, and so on.
FoldSplit split_folds(std::size_t n, const std::vector<std::size_t>& fold_sizes);

// n folds of as-even-as-possible contiguous sizes (the first n % folds get one extra).
FoldSplit split_even_folds(std::size_t n, int folds);

// Grayscale or RGB raster, channel-planar like the CIFAR layout.
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int channel, int y, int x) const {
    return pixels[static_cast<std::size_t>(channel) * height * width +
                  static_cast<std::size_t>(y) * width + x];
  }
};

Raster to_raster(const LabeledImageSet& set, std::size_t index);

// Synthetic textured rasters (random oriented sinusoid mixtures plus pixel
// noise); used by the spectral diagnostics and scaling benchmarks.
std::vector<Raster> make_texture_rasters(int count, int height, int width, std::uint64_t seed);

}  // namespace besvm
