#include "besvm/features.hpp"

#include <cmath>

namespace besvm {

Vector flatten_grid(const FeatureGrid& grid) {
  Vector v(static_cast<Eigen::Index>(grid.flat_dim()));
  for (std::size_t i = 0; i < grid.flat_dim(); ++i) v[static_cast<Eigen::Index>(i)] = grid.data[i];
  return v;
}

namespace {

constexpr int kOrientations = 18;  // signed bins over [0, 2pi)
constexpr double kBlockEps = 1e-4;
constexpr double kTruncate = 0.2;

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

FeatureGrid compute_hog_grid(const Raster& image, int cell_size) {
  if (cell_size < 1) fail_config("cell size must be positive");
  if (image.height % cell_size != 0 || image.width % cell_size != 0) {
    fail_data("image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
              " is not divisible by cell size " + std::to_string(cell_size));
  }
  const int rows = image.height / cell_size;
  const int cols = image.width / cell_size;

  // Pass 1: signed orientation histograms per cell. The gradient at each
  // pixel comes from central differences with clamped neighbors; for RGB the
  // channel with the largest squared magnitude wins. Each pixel votes its
  // full magnitude into the single bin containing its angle.
  std::vector<double> hist(static_cast<std::size_t>(rows) * cols * kOrientations, 0.0);
  const double two_pi = 8.0 * std::atan(1.0);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      double dx = 0.0, dy = 0.0, best = -1.0;
      for (int ch = 0; ch < image.channels; ++ch) {
        const double cdx = static_cast<double>(image.at(ch, y, clampi(x + 1, 0, image.width - 1))) -
                           static_cast<double>(image.at(ch, y, clampi(x - 1, 0, image.width - 1)));
        const double cdy = static_cast<double>(image.at(ch, clampi(y + 1, 0, image.height - 1), x)) -
                           static_cast<double>(image.at(ch, clampi(y - 1, 0, image.height - 1), x));
        const double mag2 = cdx * cdx + cdy * cdy;
        if (mag2 > best) {
          best = mag2;
          dx = cdx;
          dy = cdy;
        }
      }
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag == 0.0) continue;
      double angle = std::atan2(dy, dx);
      if (angle < 0.0) angle += two_pi;
      int bin = static_cast<int>(angle / two_pi * kOrientations);
      if (bin >= kOrientations) bin = kOrientations - 1;  // guard atan2 == 2pi edge
      const std::size_t cell = static_cast<std::size_t>(y / cell_size) * cols + (x / cell_size);
      hist[cell * kOrientations + bin] += mag;
    }
  }

  // Pass 2: cell energies from contrast-insensitive sums.
  std::vector<double> energy(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double* h = hist.data() + (static_cast<std::size_t>(r) * cols + c) * kOrientations;
      double e = 0.0;
      for (int b = 0; b < kOrientations / 2; ++b) {
        const double ins = h[b] + h[b + kOrientations / 2];
        e += ins * ins;
      }
      energy[static_cast<std::size_t>(r) * cols + c] = e;
    }
  }

  // Pass 3: normalize each cell against its four surrounding 2x2 blocks
  // (indices clamped at the grid border) with truncation at 0.2.
  FeatureGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.cell_dim = kHogCellDim;
  grid.data.assign(grid.flat_dim(), 0.0);
  auto cell_energy = [&](int r, int c) {
    return energy[static_cast<std::size_t>(clampi(r, 0, rows - 1)) * cols +
                  clampi(c, 0, cols - 1)];
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double norm[4];
      for (int k = 0; k < 4; ++k) {
        const int dr = (k < 2) ? -1 : 0;  // block row offset: up, up, here, here
        const int dc = (k % 2 == 0) ? -1 : 0;
        const double block = cell_energy(r + dr, c + dc) + cell_energy(r + dr, c + dc + 1) +
                             cell_energy(r + dr + 1, c + dc) +
                             cell_energy(r + dr + 1, c + dc + 1);
        norm[k] = 1.0 / std::sqrt(block + kBlockEps);
      }

      const double* h = hist.data() + (static_cast<std::size_t>(r) * cols + c) * kOrientations;
      double* out = grid.cell(r, c);
      double block_sum[4] = {0.0, 0.0, 0.0, 0.0};
      for (int b = 0; b < kOrientations; ++b) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += std::min(h[b] * norm[k], kTruncate);
        out[b] = 0.5 * acc;
      }
      for (int b = 0; b < kOrientations / 2; ++b) {
        const double ins = h[b] + h[b + kOrientations / 2];
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          const double v = std::min(ins * norm[k], kTruncate);
          acc += v;
          block_sum[k] += v;
        }
        out[kOrientations + b] = 0.5 * acc;
      }
      for (int k = 0; k < 4; ++k) {
        out[kOrientations + kOrientations / 2 + k] = 0.2357 * block_sum[k];
      }
    }
  }
  return grid;
}

std::vector<FeatureGrid> compute_hog_grids(const std::vector<Raster>& images, int cell_size) {
  std::vector<FeatureGrid> out(images.size());
  parallel_for(static_cast<std::int64_t>(images.size()),
               [&](std::int64_t begin, std::int64_t end) {
                 for (std::int64_t i = begin; i < end; ++i) {
                   out[static_cast<std::size_t>(i)] =
                       compute_hog_grid(images[static_cast<std::size_t>(i)], cell_size);
                 }
               });
  return out;
}

NormalizationStats fit_center_scale(const std::vector<Vector>& vectors) {
  if (vectors.size() < 2) fail_data("need at least two vectors to fit center/scale stats");
  const Eigen::Index d = vectors[0].size();
  for (const Vector& v : vectors) {
    if (v.size() != d) fail_data("inconsistent dimensions while fitting center/scale stats");
  }

  NormalizationStats stats;
  stats.mean = Vector::Zero(d);
  for (const Vector& v : vectors) stats.mean += v;
  stats.mean /= static_cast<double>(vectors.size());

  double avg_norm = 0.0;
  for (const Vector& v : vectors) avg_norm += (v - stats.mean).norm();
  avg_norm /= static_cast<double>(vectors.size());
  if (avg_norm == 0.0) fail_data("all vectors identical; center/scale stats undefined");
  stats.scale = 1.0 / avg_norm;
  return stats;
}

Vector apply_center_scale(const NormalizationStats& stats, const Vector& v) {
  if (v.size() != stats.mean.size()) {
    fail_data("vector has dim " + std::to_string(v.size()) + ", stats expect " +
              std::to_string(stats.mean.size()));
  }
  return stats.scale * (v - stats.mean);
}

}  // namespace besvm
