#include "besvm/basis.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace besvm;

namespace {

std::map<int, std::vector<std::size_t>> by_class(const std::vector<int>& labels,
                                                 const std::vector<std::size_t>& picked) {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t idx : picked) out[labels[idx]].push_back(idx);
  return out;
}

}  // namespace

TEST_CASE("random selection is class balanced, valid and seed deterministic") {
  std::vector<int> labels;
  for (int i = 0; i < 90; ++i) labels.push_back(i % 3);

  const std::vector<std::size_t> a = select_random(labels, 10, 5);
  const std::vector<std::size_t> b = select_random(labels, 10, 5);
  const std::vector<std::size_t> c = select_random(labels, 10, 6);
  CHECK(a == b);
  CHECK(a != c);
  REQUIRE(a.size() == 30);

  auto groups = by_class(labels, a);
  for (auto& [cls, members] : groups) {
    CHECK(members.size() == 10);
    CHECK(std::is_sorted(members.begin(), members.end()));
    CHECK(std::adjacent_find(members.begin(), members.end()) == members.end());  // no repeats
  }
}

TEST_CASE("random selection of a whole class returns the whole class") {
  const std::vector<int> labels = {0, 1, 0, 1, 0};
  const std::vector<std::size_t> picked = select_random(labels, 2, 9);
  auto groups = by_class(labels, picked);
  CHECK(groups[1] == std::vector<std::size_t>{1, 3});
}

TEST_CASE("random selection at paper scale: ten classes of one hundred") {
  std::vector<int> labels;
  for (int i = 0; i < 1500; ++i) labels.push_back(i % 10);
  const std::vector<std::size_t> picked = select_random(labels, 100, 0);
  REQUIRE(picked.size() == 1000);
  auto groups = by_class(labels, picked);
  for (auto& [cls, members] : groups) CHECK(members.size() == 100);
}

TEST_CASE("random selection rejects undersized classes") {
  const std::vector<int> labels = {0, 0, 1};
  CHECK_THROWS_AS(select_random(labels, 2, 0), Error);
}

TEST_CASE("index stride picks evenly spaced class positions") {
  // Class 0 sits at even indices so positions and indices differ.
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) labels.push_back(i % 2);

  const std::vector<std::size_t> picked = select_index_stride(labels, 5);
  auto groups = by_class(labels, picked);
  // Class 0 members are 0,2,4,...,18; positions {0,2,4,6,8} -> indices {0,4,8,12,16}.
  CHECK(groups[0] == std::vector<std::size_t>{0, 4, 8, 12, 16});
  CHECK(groups[1] == std::vector<std::size_t>{1, 5, 9, 13, 17});
}

TEST_CASE("index stride on a class of seven picking three") {
  const std::vector<int> labels(7, 0);
  const std::vector<std::size_t> picked = select_index_stride(labels, 3);
  CHECK(picked == std::vector<std::size_t>{0, 2, 4});  // floor(i*7/3)
}

TEST_CASE("index stride with per_class equal to the class size takes everything") {
  const std::vector<int> labels(6, 0);
  const std::vector<std::size_t> picked = select_index_stride(labels, 6);
  CHECK(picked == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("k-medoids on the frozen 3x3 similarity matrix") {
  Matrix s(3, 3);
  s << 1.0, 0.9, 0.1,
       0.9, 1.0, 0.1,
       0.1, 0.1, 1.0;
  CHECK(select_kernel_kmedoids(s, 1, 10) == std::vector<std::size_t>{0});
  CHECK(select_kernel_kmedoids(s, 2, 10) == std::vector<std::size_t>{0, 2});
  CHECK(select_kernel_kmedoids(s, 3, 10) == std::vector<std::size_t>{0, 1, 2});
  CHECK(kmedoids_objective(s, {0, 2}) == doctest::Approx(2.9));
}

TEST_CASE("k-medoids objective never decreases with more iterations") {
  Rng rng(44);
  const int n = 20;
  Matrix s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = rng.uniform();
    s(i, i) = 1.5;  // self similarity dominates
  }
  double prev = -1e300;
  for (int iters = 0; iters <= 6; ++iters) {
    const double obj = kmedoids_objective(s, select_kernel_kmedoids(s, 4, iters));
    CHECK(obj >= prev - 1e-12);
    prev = obj;
  }
}

TEST_CASE("k-medoids recovers one medoid per similarity block") {
  const int n = 10;  // two well-separated groups of five
  Matrix s(n, n);
  Rng rng(45);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool same = (i < 5) == (j < 5);
      s(i, j) = same ? 0.9 + 0.1 * rng.uniform() : 0.05 * rng.uniform();
    }
  }
  const std::vector<std::size_t> medoids = select_kernel_kmedoids(s, 2, 20);
  REQUIRE(medoids.size() == 2);
  CHECK(medoids[0] < 5);
  CHECK(medoids[1] >= 5);
}

TEST_CASE("k-medoids with k equal to n keeps every point") {
  Matrix s = Matrix::Identity(4, 4);
  CHECK(select_kernel_kmedoids(s, 4, 5) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(select_kernel_kmedoids(s, 5, 5), Error);
  CHECK_THROWS_AS(select_kernel_kmedoids(s, 0, 5), Error);
}

TEST_CASE("per-class k-medoids selects within each class") {
  Rng rng(46);
  std::vector<Exemplar> samples;
  std::vector<int> labels;
  for (int i = 0; i < 24; ++i) {
    Vector v(3);
    const int cls = i % 2;
    for (int j = 0; j < 3; ++j) v[j] = rng.gaussian() + (cls == 0 ? -2.0 : 2.0);
    samples.emplace_back(v);
    labels.push_back(cls);
  }

  const std::vector<std::size_t> picked =
      select_kmedoids_per_class(SimilarityMeasure::rbf(0.5), samples, labels, 3, 10);
  REQUIRE(picked.size() == 6);
  auto groups = by_class(labels, picked);
  CHECK(groups[0].size() == 3);
  CHECK(groups[1].size() == 3);

  const std::vector<std::size_t> again =
      select_kmedoids_per_class(SimilarityMeasure::rbf(0.5), samples, labels, 3, 10);
  CHECK(picked == again);
}

TEST_CASE("make_basis carries labels, indices and payload structure") {
  std::vector<Exemplar> flat, grids;
  std::vector<int> labels;
  Rng rng(47);
  for (int i = 0; i < 5; ++i) {
    Vector v(2);
    v << rng.gaussian(), rng.gaussian();
    flat.emplace_back(v);
    FeatureGrid g;
    g.rows = 1;
    g.cols = 1;
    g.cell_dim = 2;
    g.data = {v[0], v[1]};
    grids.emplace_back(g);
    labels.push_back(i % 2);
  }

  const BasisSet basis = make_basis({flat, grids}, labels, {1, 4, 2});
  REQUIRE(basis.size() == 3);
  CHECK(basis.class_ids == std::vector<int>{1, 0, 0});
  CHECK(basis.source_indices == std::vector<std::size_t>{1, 4, 2});
  REQUIRE(basis.payloads.size() == 2);
  CHECK(std::holds_alternative<Vector>(basis.payload_column(0)[0]));
  CHECK(std::holds_alternative<FeatureGrid>(basis.payload_column(1)[0]));

  CHECK_THROWS_AS(make_basis({flat}, labels, {7}), Error);
}
