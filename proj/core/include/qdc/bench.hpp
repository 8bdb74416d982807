#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdc/classifiers.hpp"
#include "qdc/dataset.hpp"

namespace qdc {

// -- Experiment description (JSON, schema version 1, unknown keys rejected)

struct DatasetConfig {
  std::string format;        // "idx" | "csv"
  std::string images;        // idx image file
  std::string labels;        // idx label file
  std::string extra_images;  // optional second idx pair, pooled in
  std::string extra_labels;
  std::string path;                  // csv file
  std::string label_column = "label";  // csv label column name
};

struct PipelineConfig {
  bool center = false;
  bool standardize = false;
  std::size_t pca = 0;               // 0 = off
  std::string normalization = "l2";  // "l2" | "stereographic" | "none"
  std::size_t copies = 1;
  std::size_t state_subspace = 0;  // 0 = off
};

struct ClassifierConfig {
  std::string kind;  // see classifier_kind_from_string
  double rel_threshold = kDefaultPinvThreshold;
  double lambda = -1.0;  // ridge penalty, < 0 selects by CV
  double Lambda = 1.0;   // LP box bound
  double tol = kDefaultSdpTol;
  int max_iters = kDefaultSdpMaxIters;
  bool inconclusive = false;
};

struct SplitConfig {
  double train_fraction = 0.5;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;  // cap after the shuffle, 0 = all
  std::size_t test_size = 0;
};

struct CvConfig {
  std::string parameter;  // "rel_threshold" | "lambda" | "Lambda"
  Vector grid;
  std::string scheme = "k-fold";  // "k-fold" | "leave-one-out"
  int folds = 5;
};

struct OutputConfig {
  // Wall times are observational; disabling them makes reports
  // byte-reproducible.
  bool record_wall_time = true;
  double budget_seconds = 1800.0;  // repetitions past this are recorded NA
};

struct ExperimentConfig {
  int version = 1;
  std::string experiment_id;
  DatasetConfig dataset;
  PipelineConfig pipeline;
  ClassifierConfig classifier;
  SplitConfig split;
  std::optional<CvConfig> cv;
  OutputConfig output;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

FitOptions fit_options_from(const ExperimentConfig& config);
Dataset load_dataset(const DatasetConfig& config);

// -- Reports ---------------------------------------------------------------

struct RepetitionRow {
  int repetition = 0;
  std::uint64_t split_seed = 0;
  double ba_train = 0, ba_test = 0;
  double psucc_train = 0, psucc_test = 0;
  double mse_train = 0, mse_test = 0;
  double wall_ms = 0;
  std::string status = "ok";  // "ok" or an error tag; non-ok rows are NA
  bool ok() const { return status == "ok"; }
};

struct RunReport {
  std::string experiment_id;
  std::string classifier;
  std::size_t features = 0;
  std::size_t copies = 1;
  std::vector<RepetitionRow> rows;

  std::size_t ok_count() const;
  // Mean / sample standard deviation over the ok repetitions.
  RepetitionRow aggregate_mean() const;
  RepetitionRow aggregate_std() const;
  // Fixed column set:
  // experiment_id,classifier,features,copies,repetition,split_seed,
  // ba_train,ba_test,psucc_train,psucc_test,mse_train,mse_test,wall_ms,status
  std::string to_csv() const;
};

// Runs every repetition of the experiment; failures are recorded as NA
// rows without aborting the remaining repetitions.
RunReport run(const ExperimentConfig& config);

// Grid search for one meta-parameter by cross-validated balanced accuracy
// on the training side of repetition 0. Ties pick the smallest value.
double cv_select(const ExperimentConfig& config, const std::string& parameter,
                 const Vector& grid, const std::string& scheme, int folds);

// -- Copy-count sweeps -------------------------------------------------------

struct SweepRow {
  std::string copies_label;  // "1", "2", ... or "inf"
  double ba_mean = 0, ba_std = 0;
  int n_ok = 0;
  bool underflow = false;  // some repetition had every test score < 1e-280
  std::string status = "ok";
};

struct SweepReport {
  std::string experiment_id;
  std::string classifier;
  std::size_t features = 0;
  std::vector<SweepRow> rows;
  std::string to_csv() const;
};

// Re-runs the kernel measurement classifier for each copy count (and the
// infinite-copy limit when requested) over the configured repetitions.
SweepReport sweep_copies(const ExperimentConfig& config,
                         const std::vector<std::size_t>& m_values, bool include_infinity);

// Minimal SVG line chart of a sweep series.
void write_sweep_svg(const SweepReport& report, const std::string& path);

// Deterministic float formatting shared by every report writer.
std::string format_double(double v);

}  // namespace qdc
