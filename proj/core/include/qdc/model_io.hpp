#pragma once

#include <string>

#include "qdc/classifiers.hpp"

namespace qdc {

// Versioned JSON container for fitted models (format "qdc-model",
// version 1). Holds the classifier kind, the fitted pipeline stages and
// the kind-specific payload; measurement elements are stored row-major.
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const std::string& text);

}  // namespace qdc
