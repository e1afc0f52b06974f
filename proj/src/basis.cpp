#include "besvm/basis.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace besvm {

namespace {

// Class id -> ascending sample indices, iterated in ascending class order.
std::map<int, std::vector<std::size_t>> group_by_class(const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

void check_class_size(int class_id, std::size_t have, int want) {
  if (static_cast<std::size_t>(want) > have) {
    fail_data("class " + std::to_string(class_id) + " has " + std::to_string(have) +
              " samples, need " + std::to_string(want));
  }
}

}  // namespace

std::vector<std::size_t> select_random(const std::vector<int>& labels, int per_class,
                                       std::uint64_t seed) {
  if (per_class < 1) fail_config("per-class basis count must be positive");
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (auto& [class_id, members] : group_by_class(labels)) {
    check_class_size(class_id, members.size(), per_class);
    // Partial Fisher-Yates: after i swaps the first i entries are a uniform
    // without-replacement draw.
    std::vector<std::size_t> pool = members;
    for (int i = 0; i < per_class; ++i) {
      const std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(per_class));
    std::sort(pool.begin(), pool.end());
    out.insert(out.end(), pool.begin(), pool.end());
  }
  return out;
}

std::vector<std::size_t> select_index_stride(const std::vector<int>& labels, int per_class) {
  if (per_class < 1) fail_config("per-class basis count must be positive");
  std::vector<std::size_t> out;
  for (auto& [class_id, members] : group_by_class(labels)) {
    check_class_size(class_id, members.size(), per_class);
    for (int i = 0; i < per_class; ++i) {
      const std::size_t pos = static_cast<std::size_t>(i) * members.size() /
                              static_cast<std::size_t>(per_class);
      out.push_back(members[pos]);
    }
  }
  return out;
}

double kmedoids_objective(const Matrix& s, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m : medoids) {
      best = std::max(best, s(i, static_cast<Eigen::Index>(m)));
    }
    total += best;
  }
  return total;
}

namespace {

// Farthest-point style expansion: the candidate whose strongest similarity
// to the current medoids is weakest; ties go to the lowest index.
std::size_t least_covered_candidate(const Matrix& s, const std::vector<char>& chosen) {
  const Eigen::Index n = s.rows();
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_j = 0;
  bool found = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (chosen[static_cast<std::size_t>(j)]) continue;
    double strongest = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < n; ++c) {
      if (chosen[static_cast<std::size_t>(c)]) strongest = std::max(strongest, s(j, c));
    }
    if (strongest < best_score) {
      best_score = strongest;
      best_j = static_cast<std::size_t>(j);
      found = true;
    }
  }
  if (!found) fail_numeric("k-medoids expansion ran out of candidates");
  return best_j;
}

}  // namespace

std::vector<std::size_t> select_kernel_kmedoids(const Matrix& s, int k, int max_iter,
                                                std::uint64_t seed) {
  (void)seed;
  if (s.rows() != s.cols()) fail_data("k-medoids needs a square similarity matrix");
  const Eigen::Index n = s.rows();
  if (k < 1 || static_cast<Eigen::Index>(k) > n) {
    fail_config("k-medoids k=" + std::to_string(k) + " out of range for n=" + std::to_string(n));
  }
  if (max_iter < 0) fail_config("max_iter must be nonnegative");

  // Greedy start: best single medoid by total similarity, then repeatedly
  // the least covered point.
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> medoids;
  {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double total = s.col(j).sum();
      if (total > best) {
        best = total;
        best_j = static_cast<std::size_t>(j);
      }
    }
    medoids.push_back(best_j);
    chosen[best_j] = 1;
  }
  while (medoids.size() < static_cast<std::size_t>(k)) {
    const std::size_t j = least_covered_candidate(s, chosen);
    medoids.push_back(j);
    chosen[j] = 1;
  }
  std::sort(medoids.begin(), medoids.end());

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment: each point to its most similar medoid; medoids are sorted,
    // so first-wins resolves ties toward the lowest index.
    std::vector<std::size_t> assign(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_m = 0;
      for (std::size_t m = 0; m < medoids.size(); ++m) {
        const double v = s(i, static_cast<Eigen::Index>(medoids[m]));
        if (v > best) {
          best = v;
          best_m = m;
        }
      }
      assign[static_cast<std::size_t>(i)] = best_m;
    }

    // Update: the member with the highest total similarity from its cluster
    // becomes the new medoid; an empty cluster keeps its old one.
    std::vector<std::vector<std::size_t>> clusters(medoids.size());
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      clusters[assign[i]].push_back(i);
    }
    std::vector<std::size_t> next;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      if (clusters[m].empty()) {
        next.push_back(medoids[m]);
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_cand = clusters[m].front();
      for (std::size_t cand : clusters[m]) {
        double total = 0.0;
        for (std::size_t p : clusters[m]) {
          total += s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(cand));
        }
        if (total > best) {
          best = total;
          best_cand = cand;
        }
      }
      next.push_back(best_cand);
    }

    // Dedupe (an empty cluster's kept medoid can collide with an elected
    // one) and refill with the greedy expansion so we always hold k.
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.size() < static_cast<std::size_t>(k)) {
      std::vector<char> mask(static_cast<std::size_t>(n), 0);
      for (std::size_t m : next) mask[m] = 1;
      while (next.size() < static_cast<std::size_t>(k)) {
        const std::size_t j = least_covered_candidate(s, mask);
        next.push_back(j);
        mask[j] = 1;
      }
      std::sort(next.begin(), next.end());
    }

    if (next == medoids) break;
    medoids = next;
  }
  return medoids;
}

std::vector<std::size_t> select_kmedoids_per_class(const SimilarityMeasure& measure,
                                                   const std::vector<Exemplar>& samples,
                                                   const std::vector<int>& labels, int per_class,
                                                   int max_iter, std::uint64_t seed) {
  if (samples.size() != labels.size()) fail_data("sample/label count mismatch");
  if (per_class < 1) fail_config("per-class basis count must be positive");

  std::vector<std::size_t> out;
  for (auto& [class_id, members] : group_by_class(labels)) {
    check_class_size(class_id, members.size(), per_class);
    std::vector<Exemplar> subset;
    subset.reserve(members.size());
    for (std::size_t idx : members) subset.push_back(samples[idx]);
    const Matrix s = gram(measure, subset, subset).values;
    for (std::size_t local : select_kernel_kmedoids(s, per_class, max_iter, seed)) {
      out.push_back(members[local]);
    }
  }
  return out;
}

BasisSet make_basis(const std::vector<std::vector<Exemplar>>& sample_columns,
                    const std::vector<int>& labels, const std::vector<std::size_t>& indices) {
  if (sample_columns.empty()) fail_config("no sample columns given");
  for (const auto& column : sample_columns) {
    if (column.size() != labels.size()) fail_data("sample/label count mismatch");
  }

  BasisSet basis;
  basis.payloads.resize(sample_columns.size());
  for (std::size_t idx : indices) {
    if (idx >= labels.size()) fail_data("basis index " + std::to_string(idx) + " out of range");
    basis.class_ids.push_back(labels[idx]);
    basis.source_indices.push_back(idx);
    for (std::size_t m = 0; m < sample_columns.size(); ++m) {
      basis.payloads[m].push_back(sample_columns[m][idx]);
    }
  }
  return basis;
}

}  // namespace besvm
