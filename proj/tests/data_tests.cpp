// Longer dataset-gated checks: the squared-feature ridge baseline must
// strictly beat the plain ridge baseline on balanced accuracy at every
// feature count (3 repetitions, desk scale). Exits 77 when the digit
// dataset is not available.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <vector>

#include "qdc/bench.hpp"

using namespace qdc;

namespace {

namespace fs = std::filesystem;

std::optional<fs::path> find_data_dir() {
  std::vector<fs::path> candidates;
  if (const char* env = std::getenv("QDC_DATA_DIR")) candidates.emplace_back(env);
  candidates.emplace_back("data");
  candidates.emplace_back("../data");
  candidates.emplace_back("../../data");
  for (const auto& dir : candidates)
    if (fs::exists(dir / "train-images-idx3-ubyte")) return dir;
  return std::nullopt;
}

}  // namespace

int main() {
  const auto dir = find_data_dir();
  if (!dir) {
    std::cout << "[SKIP] baseline orderings (requires MNIST idx files under data/)\n";
    return 77;
  }

  bool ok = true;
  for (std::size_t features : {5, 10, 20, 50}) {
    ExperimentConfig cfg;
    cfg.experiment_id = "baseline-ordering";
    cfg.dataset.format = "idx";
    cfg.dataset.images = (*dir / "train-images-idx3-ubyte").string();
    cfg.dataset.labels = (*dir / "train-labels-idx1-ubyte").string();
    cfg.pipeline.pca = features;
    cfg.pipeline.normalization = "none";
    cfg.classifier.kind = "ridge";
    cfg.split.train_fraction = 0.5;
    cfg.split.repetitions = 3;
    cfg.split.seed = 20240503;
    cfg.split.train_size = 3000;
    cfg.split.test_size = 5000;
    cfg.output.record_wall_time = false;

    const RunReport plain = run(cfg);
    ExperimentConfig squared = cfg;
    squared.pipeline.copies = 2;
    const RunReport poly = run(squared);

    const double ba_plain = plain.aggregate_mean().ba_test;
    const double ba_poly = poly.aggregate_mean().ba_test;
    std::cout << "features=" << features << " ridge=" << ba_plain
              << " ridge_sq=" << ba_poly << '\n';
    if (!(plain.ok_count() == 3 && poly.ok_count() == 3 && ba_poly > ba_plain)) {
      ok = false;
      std::cout << "[FAIL] squared features did not improve at " << features
                << " features\n";
    }
  }
  std::cout << (ok ? "[PASS] baseline orderings\n" : "[FAIL] baseline orderings\n");
  return ok ? 0 : 1;
}
