#include "besvm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace besvm {

SimilarityMeasure SimilarityMeasure::linear() { return SimilarityMeasure{}; }

SimilarityMeasure SimilarityMeasure::rbf(double gamma) {
  if (gamma <= 0.0) fail_config("rbf gamma must be positive");
  SimilarityMeasure m;
  m.kind = Kind::rbf;
  m.gamma = gamma;
  return m;
}

SimilarityMeasure SimilarityMeasure::rigid(int h_rigid) {
  if (h_rigid < 0) fail_config("rigid shift radius must be nonnegative");
  SimilarityMeasure m;
  m.kind = Kind::rigid;
  m.h_rigid = h_rigid;
  return m;
}

SimilarityMeasure SimilarityMeasure::deformable(int h_rigid, int h_local, double lambda) {
  if (h_rigid < 0 || h_local < 0) fail_config("shift radii must be nonnegative");
  if (lambda < 0.0) fail_config("deformation penalty must be nonnegative");
  SimilarityMeasure m;
  m.kind = Kind::deformable;
  m.h_rigid = h_rigid;
  m.h_local = h_local;
  m.lambda = lambda;
  return m;
}

double eval_linear(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    fail_data("linear similarity between dims " + std::to_string(x.size()) + " and " +
              std::to_string(y.size()));
  }
  return x.dot(y);
}

double eval_rbf(const Vector& x, const Vector& y, double gamma) {
  if (x.size() != y.size()) {
    fail_data("rbf similarity between dims " + std::to_string(x.size()) + " and " +
              std::to_string(y.size()));
  }
  return std::exp(-gamma * (x - y).squaredNorm());
}

namespace {

inline double cell_dot(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

double eval_rigid(const FeatureGrid& gx, const FeatureGrid& gy, int h_rigid) {
  if (gx.cell_dim != gy.cell_dim) {
    fail_data("cell dims differ: " + std::to_string(gx.cell_dim) + " vs " +
              std::to_string(gy.cell_dim));
  }
  if (h_rigid < 0) fail_config("rigid shift radius must be nonnegative");

  double best = -std::numeric_limits<double>::infinity();
  for (int zr = -h_rigid; zr <= h_rigid; ++zr) {
    for (int zc = -h_rigid; zc <= h_rigid; ++zc) {
      // Only the overlap contributes; everything else is zero-padded.
      const int r0 = std::max(0, -zr);
      const int r1 = std::min(gx.rows, gy.rows - zr);
      const int c0 = std::max(0, -zc);
      const int c1 = std::min(gx.cols, gy.cols - zc);
      double sum = 0.0;
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          sum += cell_dot(gx.cell(r, c), gy.cell(r + zr, c + zc), gx.cell_dim);
        }
      }
      best = std::max(best, sum);
    }
  }
  return best;
}

double eval_deformable(const FeatureGrid& gx, const FeatureGrid& gy, int h_rigid, int h_local,
                       double lambda) {
  if (gx.cell_dim != gy.cell_dim) {
    fail_data("cell dims differ: " + std::to_string(gx.cell_dim) + " vs " +
              std::to_string(gy.cell_dim));
  }
  if (h_rigid < 0 || h_local < 0) fail_config("shift radii must be nonnegative");
  if (lambda < 0.0) fail_config("deformation penalty must be nonnegative");

  double best = -std::numeric_limits<double>::infinity();
  for (int zr = -h_rigid; zr <= h_rigid; ++zr) {
    for (int zc = -h_rigid; zc <= h_rigid; ++zc) {
      double total = 0.0;
      for (int r = 0; r < gx.rows; ++r) {
        for (int c = 0; c < gx.cols; ++c) {
          double cell_best = -std::numeric_limits<double>::infinity();
          for (int lr = -h_local; lr <= h_local; ++lr) {
            for (int lc = -h_local; lc <= h_local; ++lc) {
              const int yr = r + zr + lr;
              const int yc = c + zc + lc;
              double dot = 0.0;
              if (gy.in_bounds(yr, yc)) {
                dot = cell_dot(gx.cell(r, c), gy.cell(yr, yc), gx.cell_dim);
              }
              cell_best = std::max(cell_best, dot - lambda * (lr * lr + lc * lc));
            }
          }
          total += cell_best;
        }
      }
      best = std::max(best, total);
    }
  }
  return best;
}

namespace {

const Vector& as_vector(const Exemplar& e, Vector& scratch) {
  if (const Vector* v = std::get_if<Vector>(&e)) return *v;
  scratch = flatten_grid(std::get<FeatureGrid>(e));
  return scratch;
}

const FeatureGrid& as_grid(const Exemplar& e) {
  if (const FeatureGrid* g = std::get_if<FeatureGrid>(&e)) return *g;
  fail_data("this similarity measure needs cell grids, got a flat vector");
}

}  // namespace

double evaluate(const SimilarityMeasure& measure, const Exemplar& x, const Exemplar& y) {
  switch (measure.kind) {
    case SimilarityMeasure::Kind::linear: {
      Vector sx, sy;
      return eval_linear(as_vector(x, sx), as_vector(y, sy));
    }
    case SimilarityMeasure::Kind::rbf: {
      Vector sx, sy;
      return eval_rbf(as_vector(x, sx), as_vector(y, sy), measure.gamma);
    }
    case SimilarityMeasure::Kind::rigid:
      return eval_rigid(as_grid(x), as_grid(y), measure.h_rigid);
    case SimilarityMeasure::Kind::deformable:
      return eval_deformable(as_grid(x), as_grid(y), measure.h_rigid, measure.h_local,
                             measure.lambda);
  }
  fail_config("unknown similarity kind");
}

SimilarityMatrix gram(const SimilarityMeasure& measure, const std::vector<Exemplar>& rows,
                      const std::vector<Exemplar>& cols) {
  SimilarityMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.row_ids.resize(rows.size());
  out.col_ids.resize(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row_ids[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) out.col_ids[j] = j;

  if (measure.needs_grid()) {
    std::vector<const FeatureGrid*> r(rows.size()), c(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) r[i] = &as_grid(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) c[j] = &as_grid(cols[j]);
    parallel_for(static_cast<std::int64_t>(rows.size()),
                 [&](std::int64_t begin, std::int64_t end) {
                   for (std::int64_t i = begin; i < end; ++i) {
                     for (std::size_t j = 0; j < cols.size(); ++j) {
                       const auto ii = static_cast<std::size_t>(i);
                       const double v =
                           measure.kind == SimilarityMeasure::Kind::rigid
                               ? eval_rigid(*r[ii], *c[j], measure.h_rigid)
                               : eval_deformable(*r[ii], *c[j], measure.h_rigid, measure.h_local,
                                                 measure.lambda);
                       out.values(i, static_cast<Eigen::Index>(j)) = v;
                     }
                   }
                 });
    return out;
  }

  // Flatten grid exemplars once up front so the pair loop only sees vectors.
  std::vector<Vector> storage;
  storage.reserve(rows.size() + cols.size());
  auto vector_view = [&storage](const std::vector<Exemplar>& src) {
    std::vector<const Vector*> view(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (const Vector* v = std::get_if<Vector>(&src[i])) {
        view[i] = v;
      } else {
        storage.push_back(flatten_grid(std::get<FeatureGrid>(src[i])));
        view[i] = &storage.back();
      }
    }
    return view;
  };
  const std::vector<const Vector*> r = vector_view(rows);
  const std::vector<const Vector*> c = vector_view(cols);

  parallel_for(static_cast<std::int64_t>(rows.size()), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto ii = static_cast<std::size_t>(i);
        const double v = measure.kind == SimilarityMeasure::Kind::linear
                             ? eval_linear(*r[ii], *c[j])
                             : eval_rbf(*r[ii], *c[j], measure.gamma);
        out.values(i, static_cast<Eigen::Index>(j)) = v;
      }
    }
  });
  return out;
}

Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) fail_data("cannot symmetrize a non-square matrix");
  return 0.5 * (a + a.transpose());
}

}  // namespace besvm
