#include "qdc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qdc/errors.hpp"
#include "qdc/metrics.hpp"
#include "qdc/model_io.hpp"

namespace qdc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");
  reject_unknown_keys(j,
                      {"version", "experiment_id", "dataset", "pipeline", "classifier",
                       "split", "cv", "output"},
                      "top level");

  ExperimentConfig cfg;
  cfg.version = get_or<int>(j, "version", 0);
  if (cfg.version != 1) throw config_error("config: unsupported schema version");
  cfg.experiment_id = get_or<std::string>(j, "experiment_id", "experiment");

  if (!j.contains("dataset")) throw config_error("config: missing 'dataset'");
  {
    const json& d = j.at("dataset");
    reject_unknown_keys(
        d, {"format", "images", "labels", "extra_images", "extra_labels", "path", "label_column"},
        "dataset");
    cfg.dataset.format = get_or<std::string>(d, "format", "");
    cfg.dataset.images = get_or<std::string>(d, "images", "");
    cfg.dataset.labels = get_or<std::string>(d, "labels", "");
    cfg.dataset.extra_images = get_or<std::string>(d, "extra_images", "");
    cfg.dataset.extra_labels = get_or<std::string>(d, "extra_labels", "");
    cfg.dataset.path = get_or<std::string>(d, "path", "");
    cfg.dataset.label_column = get_or<std::string>(d, "label_column", "label");
    if (cfg.dataset.format != "idx" && cfg.dataset.format != "csv")
      throw config_error("config: dataset.format must be 'idx' or 'csv'");
    if (cfg.dataset.format == "idx" && (cfg.dataset.images.empty() || cfg.dataset.labels.empty()))
      throw config_error("config: idx dataset needs 'images' and 'labels'");
    if (cfg.dataset.format == "csv" && cfg.dataset.path.empty())
      throw config_error("config: csv dataset needs 'path'");
  }

  if (j.contains("pipeline")) {
    const json& p = j.at("pipeline");
    reject_unknown_keys(
        p, {"center", "standardize", "pca", "normalization", "copies", "state_subspace"},
        "pipeline");
    cfg.pipeline.center = get_or<bool>(p, "center", false);
    cfg.pipeline.standardize = get_or<bool>(p, "standardize", false);
    cfg.pipeline.pca = get_or<std::size_t>(p, "pca", 0);
    cfg.pipeline.normalization = get_or<std::string>(p, "normalization", "l2");
    cfg.pipeline.copies = get_or<std::size_t>(p, "copies", 1);
    cfg.pipeline.state_subspace = get_or<std::size_t>(p, "state_subspace", 0);
    if (cfg.pipeline.normalization != "l2" && cfg.pipeline.normalization != "stereographic" &&
        cfg.pipeline.normalization != "none")
      throw config_error("config: pipeline.normalization must be l2|stereographic|none");
    if (cfg.pipeline.copies < 1) throw config_error("config: pipeline.copies must be >= 1");
  }

  if (!j.contains("classifier")) throw config_error("config: missing 'classifier'");
  {
    const json& c = j.at("classifier");
    reject_unknown_keys(
        c, {"kind", "rel_threshold", "lambda", "Lambda", "tol", "max_iters", "inconclusive"},
        "classifier");
    cfg.classifier.kind = get_or<std::string>(c, "kind", "");
    (void)classifier_kind_from_string(cfg.classifier.kind);  // validates
    cfg.classifier.rel_threshold = get_or<double>(c, "rel_threshold", kDefaultPinvThreshold);
    cfg.classifier.lambda = get_or<double>(c, "lambda", -1.0);
    cfg.classifier.Lambda = get_or<double>(c, "Lambda", 1.0);
    cfg.classifier.tol = get_or<double>(c, "tol", kDefaultSdpTol);
    cfg.classifier.max_iters = get_or<int>(c, "max_iters", kDefaultSdpMaxIters);
    cfg.classifier.inconclusive = get_or<bool>(c, "inconclusive", false);
  }

  if (j.contains("split")) {
    const json& s = j.at("split");
    reject_unknown_keys(
        s, {"train_fraction", "repetitions", "seed", "train_size", "test_size"}, "split");
    cfg.split.train_fraction = get_or<double>(s, "train_fraction", 0.5);
    cfg.split.repetitions = get_or<int>(s, "repetitions", 1);
    cfg.split.seed = get_or<std::uint64_t>(s, "seed", 0);
    cfg.split.train_size = get_or<std::size_t>(s, "train_size", 0);
    cfg.split.test_size = get_or<std::size_t>(s, "test_size", 0);
    if (cfg.split.repetitions < 1) throw config_error("config: repetitions must be >= 1");
    if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0))
      throw config_error("config: train_fraction outside (0,1)");
  }

  if (j.contains("cv")) {
    const json& c = j.at("cv");
    reject_unknown_keys(c, {"parameter", "grid", "scheme", "folds"}, "cv");
    CvConfig cv;
    cv.parameter = get_or<std::string>(c, "parameter", "");
    cv.grid = get_or<Vector>(c, "grid", {});
    cv.scheme = get_or<std::string>(c, "scheme", "k-fold");
    cv.folds = get_or<int>(c, "folds", 5);
    if (cv.parameter != "rel_threshold" && cv.parameter != "lambda" && cv.parameter != "Lambda")
      throw config_error("config: cv.parameter must be rel_threshold|lambda|Lambda");
    if (cv.grid.empty()) throw config_error("config: cv.grid must be nonempty");
    if (cv.scheme != "k-fold" && cv.scheme != "leave-one-out")
      throw config_error("config: cv.scheme must be k-fold|leave-one-out");
    cfg.cv = std::move(cv);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, {"record_wall_time", "budget_seconds"}, "output");
    cfg.output.record_wall_time = get_or<bool>(o, "record_wall_time", true);
    cfg.output.budget_seconds = get_or<double>(o, "budget_seconds", 1800.0);
  }

  // Stage/kind compatibility, checked statically so misuse is a config
  // error rather than a run full of failed repetitions.
  {
    const ClassifierKind kind = classifier_kind_from_string(cfg.classifier.kind);
    const bool state_based = is_povm_kind(kind) || kind == ClassifierKind::QncC ||
                             kind == ClassifierKind::KPgmInfC;
    if (state_based && cfg.pipeline.normalization == "none")
      throw config_error("config: this classifier kind requires a normalization stage");
    const bool direct_state = kind == ClassifierKind::SdpC || kind == ClassifierKind::SdpGammaC ||
                              kind == ClassifierKind::PgmC || kind == ClassifierKind::QncC;
    if (cfg.pipeline.state_subspace > 0 && !direct_state)
      throw config_error("config: state_subspace only applies to the direct state classifiers");
    if ((kind == ClassifierKind::LpC || kind == ClassifierKind::RidgeC) &&
        cfg.pipeline.copies > 2)
      throw config_error("config: the linear baselines support copies up to 2");
    if (kind == ClassifierKind::KPgmInfC && cfg.pipeline.copies > 1)
      throw config_error("config: copies are implicit in the infinite-copy classifier");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

Dataset load_dataset(const DatasetConfig& config) {
  if (config.format != "idx") return load_csv(config.path, config.label_column);
  Dataset d = load_idx(config.images, config.labels);
  if (!config.extra_images.empty()) {
    const Dataset extra = load_idx(config.extra_images, config.extra_labels);
    if (extra.n_features() != d.n_features())
      throw format_error("dataset: pooled idx pairs disagree on feature count");
    Matrix merged(d.n_samples() + extra.n_samples(), d.n_features());
    std::copy(d.features.data(), d.features.data() + d.n_samples() * d.n_features(),
              merged.data());
    std::copy(extra.features.data(),
              extra.features.data() + extra.n_samples() * extra.n_features(),
              merged.data() + d.n_samples() * d.n_features());
    d.features = std::move(merged);
    d.labels.insert(d.labels.end(), extra.labels.begin(), extra.labels.end());
  }
  return d;
}

FitOptions fit_options_from(const ExperimentConfig& config) {
  FitOptions opt;
  opt.center = config.pipeline.center;
  opt.standardize = config.pipeline.standardize;
  opt.pca = config.pipeline.pca;
  if (config.pipeline.normalization == "l2")
    opt.normalization = NormalizationKind::L2;
  else if (config.pipeline.normalization == "stereographic")
    opt.normalization = NormalizationKind::Stereographic;
  else
    opt.normalization = NormalizationKind::None;
  opt.copies = config.pipeline.copies;
  opt.state_subspace = config.pipeline.state_subspace;
  opt.rel_threshold = config.classifier.rel_threshold;
  opt.ridge_lambda = config.classifier.lambda;
  opt.lp_bound = config.classifier.Lambda;
  opt.sdp_tol = config.classifier.tol;
  opt.sdp_max_iters = config.classifier.max_iters;
  opt.sdp_inconclusive = config.classifier.inconclusive;
  return opt;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::string error_tag(const qdc::error& e) {
  if (dynamic_cast<const degenerate_split*>(&e)) return "degenerate_split";
  if (dynamic_cast<const degenerate_class*>(&e)) return "degenerate_class";
  if (dynamic_cast<const solver_failure*>(&e)) return "solver_failure";
  if (dynamic_cast<const resource_limit*>(&e)) return "resource_limit";
  if (dynamic_cast<const format_error*>(&e)) return "format_error";
  if (dynamic_cast<const config_error*>(&e)) return "config_error";
  if (dynamic_cast<const not_psd*>(&e)) return "not_psd";
  if (dynamic_cast<const zero_vector*>(&e)) return "zero_vector";
  if (dynamic_cast<const null_projection*>(&e)) return "null_projection";
  return "error";
}

struct EvalResult {
  double ba = 0, psucc = 0, mse = 0;
};

EvalResult evaluate(const ClassifierModel& model, const Dataset& data, const Vector& priors) {
  std::vector<Vector> score_rows;
  std::vector<int> preds;
  score_rows.reserve(data.n_samples());
  preds.reserve(data.n_samples());
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    const double* row = data.features.row(i);
    Vector raw(row, row + data.n_features());
    Vector s = scores(model, raw);
    if (model.kind == ClassifierKind::KPgmInfC)
      preds.push_back(predict(model, raw));
    else
      preds.push_back(argmax_label(s));
    score_rows.push_back(std::move(s));
  }
  EvalResult out;
  ConfusionMatrix cm = confusion(preds, data.labels, data.class_count);
  // Classes can be missing from a capped evaluation set; average over the
  // ones present.
  const std::vector<long long> nk = cm.column_sums();
  double ba = 0.0;
  int present = 0;
  for (std::size_t k = 0; k < cm.class_count; ++k) {
    if (nk[k] == 0) continue;
    ba += static_cast<double>(cm.at(k, k)) / static_cast<double>(nk[k]);
    ++present;
  }
  out.ba = present ? ba / present : 0.0;
  out.psucc = empirical_success_probability(score_rows, data.labels, priors);
  out.mse = mean_squared_error(score_rows, data.labels);
  return out;
}

Vector train_priors(const Dataset& train) {
  Vector p(static_cast<std::size_t>(train.class_count), 0.0);
  for (int y : train.labels) p[static_cast<std::size_t>(y - 1)] += 1.0;
  for (double& v : p) v /= static_cast<double>(train.n_samples());
  return p;
}

double cv_mean_ba(ClassifierKind kind, const Dataset& train, const FitOptions& opt,
                  const std::string& scheme, int folds) {
  const std::size_t n = train.n_samples();
  const int f_count =
      (scheme == "leave-one-out") ? static_cast<int>(n) : std::max(2, std::min<int>(folds, static_cast<int>(n)));
  double ba_sum = 0.0;
  int ba_n = 0;
  for (int f = 0; f < f_count; ++f) {
    std::vector<std::size_t> tr_idx, val_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i % static_cast<std::size_t>(f_count)) == f)
        val_idx.push_back(i);
      else
        tr_idx.push_back(i);
    }
    if (val_idx.empty() || tr_idx.empty()) continue;

    Dataset fold_train;
    fold_train.features = Matrix(tr_idx.size(), train.n_features());
    fold_train.labels.resize(tr_idx.size());
    fold_train.class_count = train.class_count;
    fold_train.label_map = train.label_map;
    for (std::size_t r = 0; r < tr_idx.size(); ++r) {
      const double* src = train.features.row(tr_idx[r]);
      std::copy(src, src + train.n_features(), fold_train.features.row(r));
      fold_train.labels[r] = train.labels[tr_idx[r]];
    }
    bool all_classes = true;
    {
      std::vector<char> seen(static_cast<std::size_t>(train.class_count), 0);
      for (int y : fold_train.labels) seen[static_cast<std::size_t>(y - 1)] = 1;
      for (char c : seen) all_classes = all_classes && c;
    }
    if (!all_classes) continue;

    ClassifierModel model;
    try {
      model = fit(kind, fold_train, opt);
    } catch (const qdc::error&) {
      continue;  // an unusable fold never wins the grid point
    }
    std::vector<int> preds, truth;
    for (std::size_t i : val_idx) {
      const double* row = train.features.row(i);
      Vector raw(row, row + train.n_features());
      preds.push_back(predict(model, raw));
      truth.push_back(train.labels[i]);
    }
    ConfusionMatrix cm = confusion(preds, truth, train.class_count);
    const std::vector<long long> nk = cm.column_sums();
    double ba = 0.0;
    int present = 0;
    for (std::size_t k = 0; k < cm.class_count; ++k) {
      if (nk[k] == 0) continue;
      ba += static_cast<double>(cm.at(k, k)) / static_cast<double>(nk[k]);
      ++present;
    }
    if (!present) continue;
    ba_sum += ba / present;
    ++ba_n;
  }
  return ba_n ? ba_sum / ba_n : -1.0;
}

void set_parameter(FitOptions& opt, const std::string& parameter, double value) {
  if (parameter == "rel_threshold")
    opt.rel_threshold = value;
  else if (parameter == "lambda")
    opt.ridge_lambda = value;
  else if (parameter == "Lambda")
    opt.lp_bound = value;
  else
    throw config_error("cv: unknown parameter '" + parameter + "'");
}

double cv_select_on(ClassifierKind kind, const Dataset& train, FitOptions opt,
                    const std::string& parameter, const Vector& grid,
                    const std::string& scheme, int folds) {
  Vector sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_value = sorted.front();
  double best_ba = -2.0;
  for (double value : sorted) {
    set_parameter(opt, parameter, value);
    const double ba = cv_mean_ba(kind, train, opt, scheme, folds);
    if (ba > best_ba + 1e-12) {
      best_ba = ba;
      best_value = value;
    }
  }
  return best_value;
}

}  // namespace

std::size_t RunReport::ok_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.ok() ? 1 : 0;
  return n;
}

namespace {

template <typename Get>
double mean_over_ok(const std::vector<RepetitionRow>& rows, Get get) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.ok()) {
      s += get(r);
      ++n;
    }
  return n ? s / static_cast<double>(n) : 0.0;
}

template <typename Get>
double std_over_ok(const std::vector<RepetitionRow>& rows, Get get) {
  const double mu = mean_over_ok(rows, get);
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.ok()) {
      const double d = get(r) - mu;
      s += d * d;
      ++n;
    }
  // Sample standard deviation over repetitions.
  return n > 1 ? std::sqrt(s / static_cast<double>(n - 1)) : 0.0;
}

}  // namespace

RepetitionRow RunReport::aggregate_mean() const {
  RepetitionRow m;
  m.status = "mean";
  m.ba_train = mean_over_ok(rows, [](const RepetitionRow& r) { return r.ba_train; });
  m.ba_test = mean_over_ok(rows, [](const RepetitionRow& r) { return r.ba_test; });
  m.psucc_train = mean_over_ok(rows, [](const RepetitionRow& r) { return r.psucc_train; });
  m.psucc_test = mean_over_ok(rows, [](const RepetitionRow& r) { return r.psucc_test; });
  m.mse_train = mean_over_ok(rows, [](const RepetitionRow& r) { return r.mse_train; });
  m.mse_test = mean_over_ok(rows, [](const RepetitionRow& r) { return r.mse_test; });
  m.wall_ms = mean_over_ok(rows, [](const RepetitionRow& r) { return r.wall_ms; });
  return m;
}

RepetitionRow RunReport::aggregate_std() const {
  RepetitionRow m;
  m.status = "std";
  m.ba_train = std_over_ok(rows, [](const RepetitionRow& r) { return r.ba_train; });
  m.ba_test = std_over_ok(rows, [](const RepetitionRow& r) { return r.ba_test; });
  m.psucc_train = std_over_ok(rows, [](const RepetitionRow& r) { return r.psucc_train; });
  m.psucc_test = std_over_ok(rows, [](const RepetitionRow& r) { return r.psucc_test; });
  m.mse_train = std_over_ok(rows, [](const RepetitionRow& r) { return r.mse_train; });
  m.mse_test = std_over_ok(rows, [](const RepetitionRow& r) { return r.mse_test; });
  m.wall_ms = std_over_ok(rows, [](const RepetitionRow& r) { return r.wall_ms; });
  return m;
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out << "experiment_id,classifier,features,copies,repetition,split_seed,ba_train,ba_test,"
         "psucc_train,psucc_test,mse_train,mse_test,wall_ms,status\n";
  auto metric_cells = [&](const RepetitionRow& r, bool na) {
    std::ostringstream cells;
    if (na) {
      cells << "NA,NA,NA,NA,NA,NA";
    } else {
      cells << format_double(r.ba_train) << ',' << format_double(r.ba_test) << ','
            << format_double(r.psucc_train) << ',' << format_double(r.psucc_test) << ','
            << format_double(r.mse_train) << ',' << format_double(r.mse_test);
    }
    return cells.str();
  };
  for (const auto& r : rows) {
    out << experiment_id << ',' << classifier << ',' << features << ',' << copies << ','
        << r.repetition << ',' << r.split_seed << ',' << metric_cells(r, !r.ok()) << ','
        << format_double(r.wall_ms) << ',' << r.status << '\n';
  }
  if (ok_count() > 0) {
    const RepetitionRow mu = aggregate_mean();
    const RepetitionRow sd = aggregate_std();
    out << experiment_id << ',' << classifier << ',' << features << ',' << copies
        << ",mean,," << metric_cells(mu, false) << ',' << format_double(mu.wall_ms)
        << ",mean\n";
    out << experiment_id << ',' << classifier << ',' << features << ',' << copies << ",std,,"
        << metric_cells(sd, false) << ',' << format_double(sd.wall_ms) << ",std\n";
  } else {
    out << experiment_id << ',' << classifier << ',' << features << ',' << copies
        << ",mean,,NA,NA,NA,NA,NA,NA,0,all_failed\n";
  }
  return out.str();
}

RunReport run(const ExperimentConfig& config) {
  const Dataset full = load_dataset(config.dataset);
  const ClassifierKind kind = classifier_kind_from_string(config.classifier.kind);
  FitOptions base_options = fit_options_from(config);

  RunReport report;
  report.experiment_id = config.experiment_id;
  report.classifier = config.classifier.kind;
  report.copies = config.pipeline.copies;
  report.features =
      config.pipeline.pca > 0 ? config.pipeline.pca : full.n_features();

  const auto t_start = std::chrono::steady_clock::now();
  for (int rep = 0; rep < config.split.repetitions; ++rep) {
    RepetitionRow row;
    row.repetition = rep;
    row.split_seed = config.split.seed;

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (elapsed > config.output.budget_seconds) {
      row.status = "budget_exceeded";
      report.rows.push_back(row);
      continue;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
      SplitSpec spec{config.split.train_fraction, config.split.seed,
                     static_cast<std::uint32_t>(rep)};
      auto [train, test] = split(full, spec);
      train = take_prefix(train, config.split.train_size);
      test = take_prefix(test, config.split.test_size);
      train.validate();

      FitOptions options = base_options;
      if (config.cv) {
        const double value = cv_select_on(kind, train, options, config.cv->parameter,
                                          config.cv->grid, config.cv->scheme, config.cv->folds);
        set_parameter(options, config.cv->parameter, value);
      }

      const ClassifierModel model = fit(kind, train, options);
      const Vector priors = train_priors(train);
      const EvalResult on_train = evaluate(model, train, priors);
      const EvalResult on_test = evaluate(model, test, priors);
      row.ba_train = on_train.ba;
      row.psucc_train = on_train.psucc;
      row.mse_train = on_train.mse;
      row.ba_test = on_test.ba;
      row.psucc_test = on_test.psucc;
      row.mse_test = on_test.mse;
    } catch (const qdc::error& e) {
      row.status = error_tag(e);
    } catch (const std::exception&) {
      row.status = "error";
    }
    if (config.output.record_wall_time) {
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
    }
    report.rows.push_back(row);
  }
  return report;
}

double cv_select(const ExperimentConfig& config, const std::string& parameter,
                 const Vector& grid, const std::string& scheme, int folds) {
  if (grid.empty()) throw config_error("cv_select: empty grid");
  const Dataset full = load_dataset(config.dataset);
  SplitSpec spec{config.split.train_fraction, config.split.seed, 0};
  auto [train, test] = split(full, spec);
  (void)test;
  train = take_prefix(train, config.split.train_size);
  const ClassifierKind kind = classifier_kind_from_string(config.classifier.kind);
  return cv_select_on(kind, train, fit_options_from(config), parameter, grid, scheme, folds);
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  out << "experiment_id,classifier,features,copies,ba_mean,ba_std,n_ok,underflow,status\n";
  for (const auto& r : rows) {
    out << experiment_id << ',' << classifier << ',' << features << ',' << r.copies_label
        << ',';
    if (r.n_ok > 0)
      out << format_double(r.ba_mean) << ',' << format_double(r.ba_std);
    else
      out << "NA,NA";
    out << ',' << r.n_ok << ',' << (r.underflow ? 1 : 0) << ',' << r.status << '\n';
  }
  return out.str();
}

SweepReport sweep_copies(const ExperimentConfig& config,
                         const std::vector<std::size_t>& m_values, bool include_infinity) {
  const ClassifierKind kind = classifier_kind_from_string(config.classifier.kind);
  if (kind != ClassifierKind::KPgmC)
    throw config_error("sweep: copy sweeps are defined for the kernel measurement classifier");
  for (std::size_t i = 1; i < m_values.size(); ++i)
    if (m_values[i] <= m_values[i - 1])
      throw config_error("sweep: copy counts must be strictly ascending");

  const Dataset full = load_dataset(config.dataset);
  const FitOptions base_options = fit_options_from(config);

  SweepReport report;
  report.experiment_id = config.experiment_id;
  report.classifier = config.classifier.kind;
  report.features = config.pipeline.pca > 0 ? config.pipeline.pca : full.n_features();

  struct Cell {
    Vector bas;
    bool underflow = false;
  };
  std::vector<Cell> cells(m_values.size() + (include_infinity ? 1 : 0));

  for (int rep = 0; rep < config.split.repetitions; ++rep) {
    SplitSpec spec{config.split.train_fraction, config.split.seed,
                   static_cast<std::uint32_t>(rep)};
    auto [train, test] = split(full, spec);
    train = take_prefix(train, config.split.train_size);
    test = take_prefix(test, config.split.test_size);
    train.validate();

    // The feature pipeline and all train/test overlaps are shared across
    // copy counts; only the element-wise Gram power changes with m. The
    // arithmetic below reproduces the standalone classifier bit for bit.
    FitOptions options = base_options;
    options.copies = 1;
    ClassifierModel base;
    try {
      base = fit(ClassifierKind::KPgmC, train, options);
    } catch (const qdc::error&) {
      continue;
    }
    const Matrix& x = base.kernel->train_vectors;
    const std::vector<int>& labels = base.kernel->labels;
    const std::size_t n_train = x.rows();
    const std::size_t n_test = test.n_samples();
    const std::size_t k_count = static_cast<std::size_t>(test.class_count);

    Matrix overlaps(n_test, n_train);
    for (std::size_t t = 0; t < n_test; ++t) {
      const double* raw = test.features.row(t);
      const Vector z = base.pipeline.apply(Vector(raw, raw + test.n_features()));
      double* row = overlaps.row(t);
      for (std::size_t i = 0; i < n_train; ++i) {
        const double* xi = x.row(i);
        double g = 0.0;
        for (std::size_t f = 0; f < z.size(); ++f) g += xi[f] * z[f];
        row[i] = g;
      }
    }

    auto ba_of = [&](const std::vector<int>& preds) {
      ConfusionMatrix cm = confusion(preds, test.labels, test.class_count);
      const std::vector<long long> nk = cm.column_sums();
      double ba = 0.0;
      int present = 0;
      for (std::size_t k = 0; k < cm.class_count; ++k) {
        if (nk[k] == 0) continue;
        ba += static_cast<double>(cm.at(k, k)) / static_cast<double>(nk[k]);
        ++present;
      }
      return present ? ba / present : -1.0;
    };

    for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
      const std::size_t m = m_values[mi];
      KernelPgmModel kernel;
      try {
        kernel = kpgm_fit(x, labels, m, base_options.rel_threshold);
      } catch (const qdc::error&) {
        continue;
      }
      std::vector<int> preds(n_test);
      bool any_alive = false;
      Vector w(n_train), class_scores(k_count);
      for (std::size_t t = 0; t < n_test; ++t) {
        const double* row = overlaps.row(t);
        for (std::size_t i = 0; i < n_train; ++i)
          w[i] = (m == 1) ? row[i] : std::pow(row[i], static_cast<double>(m));
        const Vector v = kernel.g_inv_sqrt.mat() * w;
        std::fill(class_scores.begin(), class_scores.end(), 0.0);
        for (std::size_t i = 0; i < n_train; ++i)
          class_scores[static_cast<std::size_t>(labels[i] - 1)] += v[i] * v[i];
        double mx = 0.0;
        for (double s : class_scores) mx = std::max(mx, s);
        if (mx >= 1e-280) any_alive = true;
        preds[t] = argmax_label(class_scores);
      }
      const double ba = ba_of(preds);
      if (ba < 0.0) continue;
      cells[mi].bas.push_back(ba);
      if (!any_alive) cells[mi].underflow = true;
    }

    if (include_infinity) {
      std::vector<int> preds(n_test);
      for (std::size_t t = 0; t < n_test; ++t) {
        const double* row = overlaps.row(t);
        std::size_t best_i = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n_train; ++i) {
          const double a = std::fabs(row[i]);
          if (a > best) {
            best = a;
            best_i = i;
          }
        }
        preds[t] = labels[best_i];
      }
      const double ba = ba_of(preds);
      if (ba >= 0.0) cells.back().bas.push_back(ba);
    }
  }

  for (std::size_t mi = 0; mi < cells.size(); ++mi) {
    SweepRow row;
    const bool inf_row = include_infinity && mi + 1 == cells.size();
    row.copies_label = inf_row ? "inf" : std::to_string(m_values[mi]);
    const Vector& bas = cells[mi].bas;
    row.n_ok = static_cast<int>(bas.size());
    row.underflow = cells[mi].underflow;
    if (!bas.empty()) {
      double mu = 0.0;
      for (double b : bas) mu += b;
      mu /= static_cast<double>(bas.size());
      double var = 0.0;
      for (double b : bas) var += (b - mu) * (b - mu);
      row.ba_mean = mu;
      row.ba_std = bas.size() > 1 ? std::sqrt(var / static_cast<double>(bas.size() - 1)) : 0.0;
      row.status = row.underflow ? "underflow" : "ok";
    } else {
      row.status = "all_failed";
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_sweep_svg(const SweepReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw format_error("svg: cannot write " + path);
  const std::size_t n = report.rows.size();
  const double width = 640, height = 400, margin = 50;
  double lo = 1.0, hi = 0.0;
  for (const auto& r : report.rows) {
    if (r.n_ok == 0) continue;
    lo = std::min(lo, r.ba_mean);
    hi = std::max(hi, r.ba_mean);
  }
  if (hi <= lo) {
    lo = 0.0;
    hi = 1.0;
  }
  const double pad = 0.1 * (hi - lo);
  lo -= pad;
  hi += pad;

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
      << "' y2='" << height - margin << "' stroke='black'/>\n";
  out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
      << height - margin << "' stroke='black'/>\n";
  std::ostringstream points;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = report.rows[i];
    if (r.n_ok == 0) continue;
    const double x = margin + (width - 2 * margin) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.5);
    const double y = height - margin - (height - 2 * margin) * (r.ba_mean - lo) / (hi - lo);
    points << x << ',' << y << ' ';
    out << "<circle cx='" << x << "' cy='" << y << "' r='3' fill='steelblue'/>\n";
    out << "<text x='" << x << "' y='" << height - margin + 16
        << "' font-size='11' text-anchor='middle'>" << r.copies_label << "</text>\n";
  }
  out << "<polyline fill='none' stroke='steelblue' points='" << points.str() << "'/>\n";
  out << "<text x='" << width / 2 << "' y='" << height - 8
      << "' font-size='12' text-anchor='middle'>copies</text>\n";
  out << "<text x='14' y='" << height / 2
      << "' font-size='12' text-anchor='middle' transform='rotate(-90 14 " << height / 2
      << ")'>balanced accuracy</text>\n";
  out << "</svg>\n";
}

}  // namespace qdc
