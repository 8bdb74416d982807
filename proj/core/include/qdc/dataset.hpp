#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qdc/matrix.hpp"

namespace qdc {

// Labeled feature matrix. Labels are contiguous in {1..K}; label_map keeps
// the original label values (label_map[k-1] is the raw label remapped to k).
struct Dataset {
  Matrix features;                  // N x p
  std::vector<int> labels;          // values in {1..K}
  int class_count = 0;              // K
  std::vector<long long> label_map;

  std::size_t n_samples() const { return features.rows(); }
  std::size_t n_features() const { return features.cols(); }

  // Per-class sample counts, indexed k-1.
  std::vector<std::size_t> class_sizes() const;
  // Throws when a label is out of range, a class is empty, or a feature is
  // not finite.
  void validate() const;
};

struct SplitSpec {
  double train_fraction = 0.5;
  std::uint64_t seed = 0;
  std::uint32_t repetition_index = 0;
};

// MNIST-style IDX pair: big-endian magics 0x00000803 (images) and
// 0x00000801 (labels). Pixels are scaled to [0,1]; labels are shifted from
// {0..9} to {1..10}.
Dataset load_idx(const std::string& image_path, const std::string& label_path);

// Comma-separated with a header row; the named column carries integer
// labels, every other column is a numeric feature. Raw labels are remapped
// to {1..K} in ascending order of the distinct values.
Dataset load_csv(const std::string& path, const std::string& label_column);

// Same CSV layout without a label column: every cell is a feature.
Matrix load_feature_csv(const std::string& path);

// Deterministic shuffled split. The permutation depends only on
// (spec.seed, spec.repetition_index). Throws degenerate_split when some
// class ends up absent from the training side.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec);

// First n rows (the whole set when n is 0 or exceeds it); used to cap
// shuffled splits to a configured size.
Dataset take_prefix(const Dataset& d, std::size_t n);

}  // namespace qdc
