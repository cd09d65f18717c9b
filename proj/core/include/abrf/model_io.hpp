#pragma once

#include <string>
#include <vector>

#include "abrf/model.hpp"

#include <json.hpp>

namespace abrf {

using Json = nlohmann::ordered_json;

// Versioned JSON encodings (field names documented in the README).
Json tree_to_json(const Tree& tree);
Tree tree_from_json(const Json& j);

Json forest_to_json(const Forest& forest);
Forest forest_from_json(const Json& j);

Json params_to_json(const AttentionParams& params);
AttentionParams params_from_json(const Json& j);

// A fitted predictor ready for `predict`: the forest, the attention
// parameters and the model id, plus the schema needed to check inputs and
// the feature scaler when one was fitted.
struct SavedModel {
  Model model = Model::kBaseline;
  Forest forest;
  AttentionParams params;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  MinMaxScaler scaler;  // empty unless the model was fit with scaling

  Prediction predict(std::span<const double> x) const;
};

Json model_to_json(const SavedModel& saved);
SavedModel model_from_json(const Json& j);

void save_model(const SavedModel& saved, const std::string& path);
SavedModel load_model(const std::string& path);

}  // namespace abrf
