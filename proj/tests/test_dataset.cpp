#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "qdc/dataset.hpp"
#include "qdc/errors.hpp"

using namespace qdc;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "qdc_dataset_tests";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

std::pair<std::string, std::string> make_idx_pair(const std::string& name,
                                                  std::uint32_t image_magic,
                                                  std::uint32_t image_count,
                                                  std::uint32_t label_count,
                                                  const std::vector<std::uint8_t>& pixels,
                                                  const std::vector<std::uint8_t>& labels,
                                                  std::uint32_t rows = 2, std::uint32_t cols = 2) {
  const fs::path dir = temp_dir();
  const fs::path img = dir / (name + "-images");
  const fs::path lab = dir / (name + "-labels");
  std::vector<std::uint8_t> ibytes;
  push_be_u32(ibytes, image_magic);
  push_be_u32(ibytes, image_count);
  push_be_u32(ibytes, rows);
  push_be_u32(ibytes, cols);
  ibytes.insert(ibytes.end(), pixels.begin(), pixels.end());
  write_bytes(img, ibytes);
  std::vector<std::uint8_t> lbytes;
  push_be_u32(lbytes, 0x00000801u);
  push_be_u32(lbytes, label_count);
  lbytes.insert(lbytes.end(), labels.begin(), labels.end());
  write_bytes(lab, lbytes);
  return {img.string(), lab.string()};
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path);
  out << text;
  return path.string();
}

Dataset toy_dataset(std::size_t n, int classes) {
  Dataset d;
  d.features = Matrix(n, 2);
  d.labels.resize(n);
  d.class_count = classes;
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = static_cast<double>(i);
    d.features(i, 1) = static_cast<double>(i) * 0.5;
    d.labels[i] = static_cast<int>(i % static_cast<std::size_t>(classes)) + 1;
  }
  for (int k = 0; k < classes; ++k) d.label_map.push_back(k);
  return d;
}

}  // namespace

TEST_CASE("load_idx scales pixels and shifts labels") {
  auto [img, lab] = make_idx_pair("ok", 0x00000803u, 1, 1, {0, 128, 255, 0}, {3});
  const Dataset d = load_idx(img, lab);
  REQUIRE(d.n_samples() == 1);
  REQUIRE(d.n_features() == 4);
  CHECK(d.features(0, 0) == doctest::Approx(0.0));
  CHECK(d.features(0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(d.features(0, 2) == doctest::Approx(1.0));
  CHECK(d.features(0, 3) == doctest::Approx(0.0));
  CHECK(d.labels[0] == 4);
  CHECK(d.class_count == 10);
}

TEST_CASE("load_idx rejects a wrong magic") {
  auto [img, lab] = make_idx_pair("badmagic", 0x00000802u, 1, 1, {0, 0, 0, 0}, {1});
  CHECK_THROWS_AS(load_idx(img, lab), format_error);
}

TEST_CASE("load_idx rejects an image/label count mismatch") {
  auto [img, lab] =
      make_idx_pair("mismatch", 0x00000803u, 10, 9, std::vector<std::uint8_t>(40, 0),
                    std::vector<std::uint8_t>(9, 1));
  CHECK_THROWS_AS(load_idx(img, lab), format_error);
}

TEST_CASE("load_idx rejects truncated image data") {
  auto [img, lab] = make_idx_pair("trunc", 0x00000803u, 2, 2, {0, 0, 0, 0, 7}, {1, 2});
  CHECK_THROWS_AS(load_idx(img, lab), format_error);
}

TEST_CASE("load_idx is bit-identical across loads") {
  auto [img, lab] = make_idx_pair("twice", 0x00000803u, 2, 2,
                                  {1, 2, 3, 4, 5, 6, 7, 8}, {0, 9});
  const Dataset a = load_idx(img, lab);
  const Dataset b = load_idx(img, lab);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
}

TEST_CASE("load_csv remaps labels in ascending raw order") {
  const std::string path = write_text("two.csv", "f1,label\n0.5,5\n1.25,9\n");
  const Dataset d = load_csv(path, "label");
  REQUIRE(d.n_samples() == 2);
  CHECK(d.class_count == 2);
  CHECK(d.labels[0] == 1);
  CHECK(d.labels[1] == 2);
  CHECK(d.label_map[0] == 5);
  CHECK(d.label_map[1] == 9);
  CHECK(d.features(1, 0) == doctest::Approx(1.25));
}

TEST_CASE("load_csv parses plain real features") {
  const std::string path = write_text("one.csv", "x,label\n1.5,0\n");
  const Dataset d = load_csv(path, "label");
  CHECK(d.features(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("load_csv failure modes") {
  CHECK_THROWS_AS(load_csv(write_text("empty.csv", ""), "label"), format_error);
  CHECK_THROWS_AS(load_csv(write_text("norows.csv", "x,label\n"), "label"), format_error);
  CHECK_THROWS_AS(load_csv(write_text("badcell.csv", "x,label\nfoo,1\n"), "label"),
                  format_error);
  CHECK_THROWS_AS(load_csv(write_text("nolabel.csv", "x,y\n1,2\n"), "label"), format_error);
}

TEST_CASE("split produces a disjoint exhaustive partition") {
  const Dataset d = toy_dataset(10, 2);
  const SplitSpec spec{0.5, 123, 0};
  auto [train, test] = split(d, spec);
  CHECK(train.n_samples() == 5);
  CHECK(test.n_samples() == 5);

  // Recover original indices through the first feature (it is the index).
  std::set<int> seen;
  for (std::size_t i = 0; i < train.n_samples(); ++i)
    seen.insert(static_cast<int>(train.features(i, 0)));
  for (std::size_t i = 0; i < test.n_samples(); ++i)
    seen.insert(static_cast<int>(test.features(i, 0)));
  CHECK(seen.size() == 10);
}

TEST_CASE("split is deterministic in (seed, repetition)") {
  const Dataset d = toy_dataset(40, 4);
  const SplitSpec spec{0.6, 777, 3};
  auto [a_train, a_test] = split(d, spec);
  auto [b_train, b_test] = split(d, spec);
  CHECK(a_train.features == b_train.features);
  CHECK(a_test.features == b_test.features);
  CHECK(a_train.labels == b_train.labels);

  // A different repetition index reshuffles.
  auto [c_train, c_test] = split(d, SplitSpec{0.6, 777, 4});
  CHECK(a_train.features != c_train.features);
}

TEST_CASE("split honors the 80/20 convention") {
  const Dataset d = toy_dataset(5000, 10);
  auto [train, test] = split(d, SplitSpec{0.8, 1, 0});
  CHECK(train.n_samples() == 4000);
  CHECK(test.n_samples() == 1000);
}

TEST_CASE("split reports a class missing from the training side") {
  Dataset d = toy_dataset(12, 2);
  d.class_count = 3;
  d.labels.back() = 3;  // a single class-3 sample
  d.label_map.push_back(2);
  bool threw = false;
  for (std::uint64_t seed = 0; seed < 64 && !threw; ++seed) {
    try {
      (void)split(d, SplitSpec{0.5, seed, 0});
    } catch (const degenerate_split&) {
      threw = true;
    }
  }
  CHECK(threw);
}
