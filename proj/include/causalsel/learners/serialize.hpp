#pragma once

#include <string>

#include "causalsel/learners/stacking.hpp"

namespace causalsel {

// JSON documents of the form {"schema_version": 1, "type": ..., ...} with
// type one of "ridge", "logistic", "gbt", "stacked". Doubles are written with
// round-trip precision, so load(save(m)) predicts bit-identically.
std::string save_model(const BaseModel& model);
std::string save_model(const StackedModel& model);

// Throws ConfigError on malformed input or a type mismatch.
BaseModel load_base_model(const std::string& json_text);
StackedModel load_stacked_model(const std::string& json_text);

}  // namespace causalsel
