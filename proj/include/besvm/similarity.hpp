#pragma once

#include "besvm/core.hpp"
#include "besvm/features.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace besvm {

// A sample is either a flat feature vector or a cell grid. Vector measures
// accept grids by flattening them; grid measures require grids.
using Exemplar = std::variant<Vector, FeatureGrid>;

struct SimilarityMeasure {
  enum class Kind { linear, rbf, rigid, deformable };

  Kind kind = Kind::linear;
  double gamma = 1.0;   // rbf bandwidth
  int h_rigid = 0;      // global shift radius, in cells
  int h_local = 0;      // per-cell deformation radius, in cells
  double lambda = 0.0;  // quadratic penalty on local deformations

  static SimilarityMeasure linear();
  static SimilarityMeasure rbf(double gamma);
  static SimilarityMeasure rigid(int h_rigid);
  static SimilarityMeasure deformable(int h_rigid, int h_local, double lambda);

  bool needs_grid() const { return kind == Kind::rigid || kind == Kind::deformable; }

  // Deformations apply to the second argument only, so a deformable measure
  // with a nonzero local radius is not symmetric in general.
  bool symmetric() const { return !(kind == Kind::deformable && h_local > 0); }
};

double eval_linear(const Vector& x, const Vector& y);
double eval_rbf(const Vector& x, const Vector& y, double gamma);

// Maximal cross correlation over integer grid shifts |z| <= h_rigid applied
// to the second grid, with zero-padding outside either grid.
double eval_rigid(const FeatureGrid& gx, const FeatureGrid& gy, int h_rigid);

// Like eval_rigid, but after the global shift each cell of the first grid
// may additionally match a locally displaced cell of the second grid
// (radius h_local), paying lambda * |displacement|^2 for the privilege.
double eval_deformable(const FeatureGrid& gx, const FeatureGrid& gy, int h_rigid, int h_local,
                       double lambda);

double evaluate(const SimilarityMeasure& measure, const Exemplar& x, const Exemplar& y);

struct SimilarityMatrix {
  Matrix values;  // rows index the first argument, cols the second
  std::vector<std::size_t> row_ids;
  std::vector<std::size_t> col_ids;
};

// values(i, j) = measure(rows[i], cols[j]). For asymmetric measures the
// orientation matters: rows hold the basis/anchor side, cols the samples.
SimilarityMatrix gram(const SimilarityMeasure& measure, const std::vector<Exemplar>& rows,
                      const std::vector<Exemplar>& cols);

// Convenience for self-grams that later feed a symmetric eigensolver.
Matrix symmetrize(const Matrix& a);

}  // namespace besvm
