// Command-line front end: config-driven benchmark runs, model training,
// batch prediction and copy-count sweeps.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 solver failure
// (or a run whose repetitions all failed).

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdc/bench.hpp"
#include "qdc/errors.hpp"
#include "qdc/model_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

// "1..8,12,inf" -> ({1,...,8,12}, true)
std::pair<std::vector<std::size_t>, bool> parse_m_list(const std::string& text) {
  std::vector<std::size_t> values;
  bool infinity = false;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    if (token == "inf") {
      infinity = true;
      continue;
    }
    const auto dots = token.find("..");
    try {
      if (dots == std::string::npos) {
        values.push_back(std::stoul(token));
      } else {
        const std::size_t lo = std::stoul(token.substr(0, dots));
        const std::size_t hi = std::stoul(token.substr(dots + 2));
        if (hi < lo) throw qdc::config_error("sweep: descending range in --m");
        for (std::size_t m = lo; m <= hi; ++m) values.push_back(m);
      }
    } catch (const std::logic_error&) {
      throw qdc::config_error("sweep: cannot parse --m token '" + token + "'");
    }
  }
  if (values.empty() && !infinity) throw qdc::config_error("sweep: empty --m list");
  return {values, infinity};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qdc::format_error("cannot write " + path);
  out << text;
}

int run_bench(const std::string& config_path, const std::string& out_path) {
  const qdc::ExperimentConfig config = qdc::load_config(config_path);
  const qdc::RunReport report = qdc::run(config);
  write_file(out_path, report.to_csv());
  if (report.ok_count() == 0) {
    std::cerr << "qdc bench: every repetition failed\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_train(const std::string& config_path, const std::string& model_path) {
  const qdc::ExperimentConfig config = qdc::load_config(config_path);
  const qdc::Dataset full = qdc::load_dataset(config.dataset);
  // Train on the training side of repetition 0.
  qdc::SplitSpec spec{config.split.train_fraction, config.split.seed, 0};
  auto [train, test] = qdc::split(full, spec);
  (void)test;
  train = qdc::take_prefix(train, config.split.train_size);
  const qdc::ClassifierKind kind = qdc::classifier_kind_from_string(config.classifier.kind);
  const qdc::ClassifierModel model = qdc::fit(kind, train, qdc::fit_options_from(config));
  qdc::save_model(model, model_path);
  return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_path) {
  const qdc::ClassifierModel model = qdc::load_model(model_path);
  const qdc::Matrix features = qdc::load_feature_csv(input_path);

  std::ostringstream out;
  out << "index,predicted_label";
  for (int k = 1; k <= model.class_count; ++k) out << ",score_" << k;
  out << '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* row = features.row(i);
    qdc::Vector raw(row, row + features.cols());
    const qdc::Vector s = qdc::scores(model, raw);
    out << i << ',' << qdc::predict(model, raw);
    for (double v : s) out << ',' << qdc::format_double(v);
    out << '\n';
  }
  write_file(out_path, out.str());
  return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& m_text,
              const std::string& out_path, const std::string& svg_path) {
  const qdc::ExperimentConfig config = qdc::load_config(config_path);
  const auto [m_values, infinity] = parse_m_list(m_text);
  const qdc::SweepReport report = qdc::sweep_copies(config, m_values, infinity);
  write_file(out_path, report.to_csv());
  if (!svg_path.empty()) qdc::write_sweep_svg(report, svg_path);
  bool any_ok = false;
  for (const auto& row : report.rows) any_ok = any_ok || row.n_ok > 0;
  if (!any_ok) {
    std::cerr << "qdc sweep: every repetition failed\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-measurement-inspired multiclass classifiers"};
  app.require_subcommand(1);

  std::string config_path, out_path, model_path, input_path, m_text = "1..8", svg_path;

  CLI::App* bench = app.add_subcommand("bench", "run a config-driven experiment");
  bench->add_option("--config", config_path, "experiment JSON")->required();
  bench->add_option("--out", out_path, "output CSV")->required();

  CLI::App* train = app.add_subcommand("train", "fit a model and serialize it");
  train->add_option("--config", config_path, "experiment JSON")->required();
  train->add_option("--model", model_path, "output model file")->required();

  CLI::App* predict = app.add_subcommand("predict", "score new samples with a saved model");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--input", input_path, "feature CSV (header row, no label column)")
      ->required();
  predict->add_option("--out", out_path, "output CSV")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "balanced accuracy vs copy count");
  sweep->add_option("--config", config_path, "experiment JSON")->required();
  sweep->add_option("--m", m_text, "copy counts, e.g. 1..8,inf");
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_option("--svg", svg_path, "optional SVG chart");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) return run_bench(config_path, out_path);
    if (train->parsed()) return run_train(config_path, model_path);
    if (predict->parsed()) return run_predict(model_path, input_path, out_path);
    if (sweep->parsed()) return run_sweep(config_path, m_text, out_path, svg_path);
  } catch (const qdc::config_error& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qdc::format_error& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return kExitData;
  } catch (const qdc::degenerate_split& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return kExitData;
  } catch (const qdc::degenerate_class& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return kExitData;
  } catch (const qdc::solver_failure& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return kExitSolver;
  } catch (const qdc::error& e) {
    std::cerr << "qdc: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
