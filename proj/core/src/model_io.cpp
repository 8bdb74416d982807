#include "qdc/model_io.hpp"

#include <fstream>

#include "json.hpp"
#include "qdc/errors.hpp"

namespace qdc {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.rows() * m.cols());
  return j;
}

Matrix matrix_from_json(const json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw format_error("model: matrix payload size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

const char* to_string(NormalizationKind kind) {
  switch (kind) {
    case NormalizationKind::None: return "none";
    case NormalizationKind::L2: return "l2";
    case NormalizationKind::Stereographic: return "stereographic";
  }
  return "?";
}

NormalizationKind normalization_from_string(const std::string& s) {
  if (s == "none") return NormalizationKind::None;
  if (s == "l2") return NormalizationKind::L2;
  if (s == "stereographic") return NormalizationKind::Stereographic;
  throw format_error("model: unknown normalization '" + s + "'");
}

json pipeline_to_json(const Pipeline& pipeline) {
  json stages = json::array();
  for (const PipelineStage& stage : pipeline.stages()) {
    json s;
    if (const auto* c = std::get_if<CenterStage>(&stage)) {
      s["stage"] = "center";
      s["mean"] = c->mean;
    } else if (const auto* st = std::get_if<StandardizeStage>(&stage)) {
      s["stage"] = "standardize";
      s["inv_std"] = st->inv_std;
    } else if (const auto* p = std::get_if<PcaStage>(&stage)) {
      s["stage"] = "pca";
      s["mean"] = p->model.mean;
      s["components"] = matrix_to_json(p->model.components);
    } else if (const auto* n = std::get_if<NormalizeStage>(&stage)) {
      s["stage"] = "normalize";
      s["kind"] = to_string(n->kind);
    } else if (std::get_if<PolyExpandStage>(&stage)) {
      s["stage"] = "poly_expand";
    } else if (const auto* t = std::get_if<TensorStage>(&stage)) {
      s["stage"] = "tensor";
      s["copies"] = t->copies;
      s["entry_cap"] = t->entry_cap;
    } else if (const auto* sub = std::get_if<SubspaceStage>(&stage)) {
      s["stage"] = "subspace";
      s["basis"] = matrix_to_json(sub->basis);
    }
    stages.push_back(std::move(s));
  }
  return stages;
}

Pipeline pipeline_from_json(const json& stages) {
  Pipeline p;
  for (const json& s : stages) {
    const std::string name = s.at("stage").get<std::string>();
    if (name == "center") {
      p.push(CenterStage{s.at("mean").get<Vector>()});
    } else if (name == "standardize") {
      p.push(StandardizeStage{s.at("inv_std").get<Vector>()});
    } else if (name == "pca") {
      PcaModel m;
      m.mean = s.at("mean").get<Vector>();
      m.components = matrix_from_json(s.at("components"));
      p.push(PcaStage{std::move(m)});
    } else if (name == "normalize") {
      p.push(NormalizeStage{normalization_from_string(s.at("kind").get<std::string>())});
    } else if (name == "poly_expand") {
      p.push(PolyExpandStage{});
    } else if (name == "tensor") {
      p.push(TensorStage{s.at("copies").get<std::size_t>(),
                         s.value("entry_cap", kDefaultTensorCap)});
    } else if (name == "subspace") {
      p.push(SubspaceStage{matrix_from_json(s.at("basis"))});
    } else {
      throw format_error("model: unknown pipeline stage '" + name + "'");
    }
  }
  return p;
}

json povm_to_json(const Povm& povm) {
  json j;
  j["dim"] = povm.dim();
  j["k"] = povm.outcome_count();
  j["completeness_mode"] = to_string(povm.mode);
  json elems = json::array();
  for (const auto& e : povm.elements) {
    const Matrix& m = e.mat();
    elems.push_back(std::vector<double>(m.data(), m.data() + m.rows() * m.cols()));
  }
  j["elements"] = std::move(elems);
  if (povm.support) j["support"] = matrix_to_json(povm.support->mat());
  return j;
}

Povm povm_from_json(const json& j) {
  Povm povm;
  const std::size_t dim = j.at("dim").get<std::size_t>();
  const std::string mode = j.at("completeness_mode").get<std::string>();
  if (mode == "exact")
    povm.mode = CompletenessMode::Exact;
  else if (mode == "subnormalized")
    povm.mode = CompletenessMode::Subnormalized;
  else if (mode == "subspace_exact")
    povm.mode = CompletenessMode::SubspaceExact;
  else
    throw format_error("model: unknown completeness mode '" + mode + "'");
  for (const json& e : j.at("elements")) {
    const std::vector<double> data = e.get<std::vector<double>>();
    if (data.size() != dim * dim) throw format_error("model: element size mismatch");
    Matrix m(dim, dim);
    std::copy(data.begin(), data.end(), m.data());
    povm.elements.emplace_back(SymMatrix(m));
  }
  if (j.contains("support")) povm.support = SymMatrix(matrix_from_json(j.at("support")));
  return povm;
}

json ensemble_to_json(const ClassEnsemble& ens) {
  json j;
  j["priors"] = ens.priors;
  json cents = json::array();
  for (const auto& c : ens.centroids) cents.push_back(matrix_to_json(c.mat()));
  j["centroids"] = std::move(cents);
  return j;
}

ClassEnsemble ensemble_from_json(const json& j) {
  ClassEnsemble ens;
  ens.priors = j.at("priors").get<Vector>();
  for (const json& c : j.at("centroids"))
    ens.centroids.emplace_back(SymMatrix(matrix_from_json(c)));
  return ens;
}

}  // namespace

std::string model_to_json(const ClassifierModel& model) {
  json j;
  j["format"] = "qdc-model";
  j["version"] = 1;
  j["kind"] = to_string(model.kind);
  j["class_count"] = model.class_count;
  j["copies"] = model.copies;
  j["pipeline"] = pipeline_to_json(model.pipeline);

  json payload;
  switch (model.kind) {
    case ClassifierKind::SdpC:
    case ClassifierKind::SdpGammaC:
    case ClassifierKind::PgmC:
      payload["povm"] = povm_to_json(*model.povm);
      break;
    case ClassifierKind::QncC:
      payload["ensemble"] = ensemble_to_json(*model.centroids);
      break;
    case ClassifierKind::LpC:
    case ClassifierKind::RidgeC:
      payload["weights"] = matrix_to_json(*model.linear_weights);
      break;
    case ClassifierKind::KPgmC: {
      const KernelPgmModel& k = *model.kernel;
      payload["train_vectors"] = matrix_to_json(k.train_vectors);
      payload["g_inv_sqrt"] = matrix_to_json(k.g_inv_sqrt.mat());
      payload["labels"] = k.labels;
      payload["copies"] = k.copies;
      payload["rel_threshold"] = k.rel_threshold;
      break;
    }
    case ClassifierKind::KPgmInfC:
      payload["train_vectors"] = matrix_to_json(*model.stored_vectors);
      payload["labels"] = model.stored_labels;
      break;
  }
  j["payload"] = std::move(payload);
  return j.dump();
}

ClassifierModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw format_error(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "qdc-model")
      throw format_error("model: not a qdc-model file");
    if (j.at("version").get<int>() != 1) throw format_error("model: unsupported version");

    ClassifierModel model;
    model.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    model.class_count = j.at("class_count").get<int>();
    model.copies = j.at("copies").get<std::size_t>();
    model.pipeline = pipeline_from_json(j.at("pipeline"));

    const json& payload = j.at("payload");
    switch (model.kind) {
      case ClassifierKind::SdpC:
      case ClassifierKind::SdpGammaC:
      case ClassifierKind::PgmC:
        model.povm = povm_from_json(payload.at("povm"));
        break;
      case ClassifierKind::QncC:
        model.centroids = ensemble_from_json(payload.at("ensemble"));
        break;
      case ClassifierKind::LpC:
      case ClassifierKind::RidgeC:
        model.linear_weights = matrix_from_json(payload.at("weights"));
        break;
      case ClassifierKind::KPgmC: {
        KernelPgmModel k;
        k.train_vectors = matrix_from_json(payload.at("train_vectors"));
        k.g_inv_sqrt = SymMatrix(matrix_from_json(payload.at("g_inv_sqrt")));
        k.labels = payload.at("labels").get<std::vector<int>>();
        k.copies = payload.at("copies").get<std::size_t>();
        k.rel_threshold = payload.at("rel_threshold").get<double>();
        k.class_count = model.class_count;
        model.kernel = std::move(k);
        break;
      }
      case ClassifierKind::KPgmInfC:
        model.stored_vectors = matrix_from_json(payload.at("train_vectors"));
        model.stored_labels = payload.at("labels").get<std::vector<int>>();
        break;
    }
    return model;
  } catch (const json::exception& e) {
    throw format_error(std::string("model: malformed payload: ") + e.what());
  }
}

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("model: cannot write " + path);
  out << model_to_json(model);
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("model: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace qdc
