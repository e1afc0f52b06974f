#include "besvm/datasets.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace besvm;

namespace {

std::string temp_path(const char* name) {
  return std::string("besvm_test_") + name;
}

}  // namespace

TEST_CASE("cifar batch round trip is bit exact") {
  LabeledImageSet set;
  set.images.resize(2);
  set.labels = {3, 7};
  for (std::size_t i = 0; i < 2; ++i) {
    set.images[i].resize(kCifarImageBytes);
    for (std::size_t b = 0; b < kCifarImageBytes; ++b) {
      set.images[i][b] = static_cast<std::uint8_t>((b * 31 + i * 7 + 5) % 256);
    }
  }

  const std::string path = temp_path("cifar_roundtrip.bin");
  save_cifar10_batch(path, set);

  const LabeledImageSet back = load_cifar10_batch(path, 2);
  REQUIRE(back.size() == 2);
  CHECK(back.labels == set.labels);
  CHECK(back.images[0] == set.images[0]);
  CHECK(back.images[1] == set.images[1]);
  std::remove(path.c_str());
}

TEST_CASE("cifar loader rejects wrong file size") {
  const std::string path = temp_path("cifar_short.bin");
  {
    std::ofstream out(path, std::ios::binary);
    std::vector<char> junk(100, 0);
    out.write(junk.data(), static_cast<std::streamsize>(junk.size()));
  }
  CHECK_THROWS_AS(load_cifar10_batch(path, 1), Error);
  try {
    load_cifar10_batch(path, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::data);
  }
  std::remove(path.c_str());
}

TEST_CASE("cifar loader rejects out of range label") {
  const std::string path = temp_path("cifar_badlabel.bin");
  {
    std::ofstream out(path, std::ios::binary);
    std::vector<char> record(kCifarRecordBytes, 0);
    record[0] = 12;  // only 10 classes exist
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
  }
  CHECK_THROWS_AS(load_cifar10_batch(path, 1), Error);
  std::remove(path.c_str());
}

TEST_CASE("csv points parse labels and features") {
  const std::string path = temp_path("points.csv");
  {
    std::ofstream out(path);
    out << "1,0.5,-2.25\n";
    out << "0,1.0,3.5\n";
    out << "\n";  // blank lines are skipped
    out << "1,-0.125,0.0\n";
  }
  const LabeledPointSet set = load_csv_points(path);
  REQUIRE(set.size() == 3);
  CHECK(set.points.rows() == 3);
  CHECK(set.points.cols() == 2);
  CHECK(set.labels[0] == 1);
  CHECK(set.labels[1] == 0);
  CHECK(set.points(0, 1) == doctest::Approx(-2.25));
  CHECK(set.points(2, 0) == doctest::Approx(-0.125));
  std::remove(path.c_str());
}

TEST_CASE("csv points reject ragged rows") {
  const std::string path = temp_path("points_ragged.csv");
  {
    std::ofstream out(path);
    out << "1,0.5,2.0\n";
    out << "0,1.0\n";
  }
  CHECK_THROWS_AS(load_csv_points(path), Error);
  std::remove(path.c_str());
}

TEST_CASE("two rings hit their radii when noise is zero") {
  const LabeledPointSet set = make_two_rings(50, 1.0, 2.0, 0.0, 42);
  REQUIRE(set.size() == 100);
  for (int i = 0; i < 100; ++i) {
    const double radius = set.points.row(i).norm();
    const double want = set.labels[static_cast<std::size_t>(i)] == 0 ? 1.0 : 2.0;
    CHECK(std::abs(radius - want) < 1e-12);
  }
}

TEST_CASE("two rings are deterministic in the seed") {
  const LabeledPointSet a = make_two_rings(20, 1.0, 2.0, 0.05, 7);
  const LabeledPointSet b = make_two_rings(20, 1.0, 2.0, 0.05, 7);
  const LabeledPointSet c = make_two_rings(20, 1.0, 2.0, 0.05, 8);
  CHECK((a.points - b.points).norm() == 0.0);
  CHECK((a.points - c.points).norm() != 0.0);
}

TEST_CASE("fold split partitions samples contiguously") {
  const FoldSplit split = split_folds(10, {4, 3, 3});
  REQUIRE(split.fold_count == 3);
  CHECK(split.fold_indices(0) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(split.fold_indices(1) == std::vector<std::size_t>{4, 5, 6});
  CHECK(split.complement_indices(1) == std::vector<std::size_t>{0, 1, 2, 3, 7, 8, 9});

  // Every sample lands in exactly one fold.
  std::vector<int> seen(10, 0);
  for (int f = 0; f < 3; ++f) {
    for (std::size_t i : split.fold_indices(f)) ++seen[i];
  }
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("fold split rejects mismatched totals") {
  CHECK_THROWS_AS(split_folds(10, {4, 4}), Error);
}

TEST_CASE("even folds spread the remainder over the first folds") {
  const FoldSplit split = split_even_folds(11, 3);
  CHECK(split.fold_indices(0).size() == 4);
  CHECK(split.fold_indices(1).size() == 4);
  CHECK(split.fold_indices(2).size() == 3);
}

TEST_CASE("texture rasters are deterministic and non constant") {
  const std::vector<Raster> a = make_texture_rasters(3, 16, 16, 11);
  const std::vector<Raster> b = make_texture_rasters(3, 16, 16, 11);
  REQUIRE(a.size() == 3);
  CHECK(a[0].pixels == b[0].pixels);
  CHECK(a[2].pixels == b[2].pixels);

  // A textured image should not collapse to a single gray level.
  int min_v = 255, max_v = 0;
  for (std::uint8_t p : a[0].pixels) {
    min_v = std::min<int>(min_v, p);
    max_v = std::max<int>(max_v, p);
  }
  CHECK(max_v - min_v > 30);
}

TEST_CASE("raster view of an image set indexes channel planar data") {
  LabeledImageSet set;
  set.height = 2;
  set.width = 2;
  set.channels = 3;
  set.images.resize(1);
  set.images[0].resize(12);
  for (std::size_t i = 0; i < 12; ++i) set.images[0][i] = static_cast<std::uint8_t>(i);
  set.labels = {0};

  const Raster r = to_raster(set, 0);
  CHECK(r.at(0, 0, 0) == 0);
  CHECK(r.at(0, 1, 1) == 3);
  CHECK(r.at(1, 0, 0) == 4);
  CHECK(r.at(2, 1, 0) == 10);
}
