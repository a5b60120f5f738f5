#pragma once

#include <string>

#include "oobball/forest.hpp"

namespace oobball {

inline constexpr int kForestFormatVersion = 1;

// Structured-text (JSON) model files. The schema is documented in docs/model_format.md.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace oobball
