#pragma once

#include "besvm/core.hpp"
#include "besvm/embedding.hpp"
#include "besvm/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace besvm {

// All selectors return dataset indices grouped by ascending class id and
// sorted ascending within each class, so a selection serializes stably.

// Uniform draw without replacement of per_class samples from every class.
std::vector<std::size_t> select_random(const std::vector<int>& labels, int per_class,
                                       std::uint64_t seed);

// Deterministic coverage of each class's index-ordered samples: positions
// floor(i * n_c / per_class) for i = 0..per_class-1.
std::vector<std::size_t> select_index_stride(const std::vector<int>& labels, int per_class);

// Alternating assignment/update k-medoids that maximizes the total
// similarity of points to their medoids, started from a deterministic
// greedy seeding (the seed argument is reserved for a future randomized
// restart mode). s(i, j) reads "similarity of point i to candidate j".
std::vector<std::size_t> select_kernel_kmedoids(const Matrix& s, int k, int max_iter,
                                                std::uint64_t seed = 0);

// The objective the k-medoids iteration maximizes, for a given medoid set.
double kmedoids_objective(const Matrix& s, const std::vector<std::size_t>& medoids);

// Runs kernel k-medoids inside each class on the class's self-similarity
// matrix under the given measure.
std::vector<std::size_t> select_kmedoids_per_class(const SimilarityMeasure& measure,
                                                   const std::vector<Exemplar>& samples,
                                                   const std::vector<int>& labels, int per_class,
                                                   int max_iter, std::uint64_t seed = 0);

// Assembles the BasisSet for the chosen indices, mirroring the broadcast
// structure of sample_columns (one payload column, or one per measure).
BasisSet make_basis(const std::vector<std::vector<Exemplar>>& sample_columns,
                    const std::vector<int>& labels, const std::vector<std::size_t>& indices);

}  // namespace besvm
