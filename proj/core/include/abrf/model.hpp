#pragma once

#include <string>

#include "abrf/attention.hpp"
#include "abrf/forest.hpp"

namespace abrf {

// Prediction strategies: the plain ensemble average, untrained softmax
// weighting, contamination-trained bias (least-squares or L1), trainable
// softmax, and the combined variant.
enum class Model { kBaseline, kSoftmax, kAbrf1Qp, kAbrf1Lp, kAbrf2, kAbrf3 };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

bool model_uses_eps_grid(Model model);
bool model_uses_tau_grid(Model model);
bool model_is_gradient_trained(Model model);

// Attention weights for one instance under the given model.
std::vector<double> model_weights(Model model, const InstancePanel& panel,
                                  const AttentionParams& params);

// Routes x through the forest and combines the per-tree outputs with the
// model's attention weights. For abrf2/abrf3 the panel is built with the
// feature weights z.
Prediction predict_with_model(const Forest& forest, Model model,
                              const AttentionParams& params, std::span<const double> x);

}  // namespace abrf
