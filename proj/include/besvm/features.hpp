#pragma once

#include "besvm/core.hpp"
#include "besvm/datasets.hpp"

#include <vector>

namespace besvm {

// Cell-grid descriptor for an image. Cells are stored row-major with the
// cell_dim entries of one cell contiguous. Positions outside the grid are
// treated as zero vectors by similarity code (zero-padding).
struct FeatureGrid {
  int rows = 0;
  int cols = 0;
  int cell_dim = 0;
  std::vector<double> data;

  bool in_bounds(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

  const double* cell(int r, int c) const {
    return data.data() + (static_cast<std::size_t>(r) * cols + c) * cell_dim;
  }
  double* cell(int r, int c) {
    return data.data() + (static_cast<std::size_t>(r) * cols + c) * cell_dim;
  }

  std::size_t flat_dim() const {
    return static_cast<std::size_t>(rows) * cols * cell_dim;
  }
};

Vector flatten_grid(const FeatureGrid& grid);

// 31 entries per cell: 18 contrast-sensitive orientation bins, 9
// contrast-insensitive bins, 4 block-energy features.
inline constexpr int kHogCellDim = 31;

FeatureGrid compute_hog_grid(const Raster& image, int cell_size);
std::vector<FeatureGrid> compute_hog_grids(const std::vector<Raster>& images, int cell_size);

struct NormalizationStats {
  Vector mean;
  double scale = 1.0;  // inverse of the average centered l2 norm
};

NormalizationStats fit_center_scale(const std::vector<Vector>& vectors);
Vector apply_center_scale(const NormalizationStats& stats, const Vector& v);

}  // namespace besvm
