#include "abrf/model.hpp"

namespace abrf {

std::string to_string(Model model) {
  switch (model) {
    case Model::kBaseline: return "baseline";
    case Model::kSoftmax: return "softmax";
    case Model::kAbrf1Qp: return "abrf1-qp";
    case Model::kAbrf1Lp: return "abrf1-lp";
    case Model::kAbrf2: return "abrf2";
    default: return "abrf3";
  }
}

Model model_from_string(const std::string& name) {
  if (name == "baseline") return Model::kBaseline;
  if (name == "softmax") return Model::kSoftmax;
  if (name == "abrf1-qp" || name == "abrf1") return Model::kAbrf1Qp;
  if (name == "abrf1-lp") return Model::kAbrf1Lp;
  if (name == "abrf2") return Model::kAbrf2;
  if (name == "abrf3") return Model::kAbrf3;
  throw Error("unknown model '" + name +
              "' (expected baseline|softmax|abrf1-qp|abrf1-lp|abrf2|abrf3)");
}

bool model_uses_eps_grid(Model model) {
  return model == Model::kAbrf1Qp || model == Model::kAbrf1Lp || model == Model::kAbrf3;
}

bool model_uses_tau_grid(Model model) {
  return model == Model::kSoftmax || model == Model::kAbrf1Qp || model == Model::kAbrf1Lp;
}

bool model_is_gradient_trained(Model model) {
  return model == Model::kAbrf2 || model == Model::kAbrf3;
}

std::vector<double> model_weights(Model model, const InstancePanel& panel,
                                  const AttentionParams& params) {
  switch (model) {
    case Model::kBaseline:
      return uniform_simplex(panel.n_trees);
    case Model::kSoftmax:
      return softmax_scores(panel.distances, params.tau, params.sign);
    case Model::kAbrf1Qp:
    case Model::kAbrf1Lp: {
      const std::vector<double> scores =
          softmax_scores(panel.distances, params.tau, params.sign);
      return contaminate(scores, params.w, params.epsilon);
    }
    case Model::kAbrf2:
      return abrf2_weights(panel, params.v, params.sign);
    default:
      return abrf3_weights(panel, params);
  }
}

Prediction predict_with_model(const Forest& forest, Model model,
                              const AttentionParams& params, std::span<const double> x) {
  if (model == Model::kBaseline) return predict_baseline(forest, x);
  const bool weighted = model_is_gradient_trained(model) && !params.z.empty();
  const InstancePanel pan =
      weighted ? panel(forest, x, params.z) : panel(forest, x);
  const std::vector<double> alpha = model_weights(model, pan, params);
  Prediction out;
  if (forest.mode == Task::kRegression) {
    out.value = predict_regression(alpha, pan.values);
  } else {
    auto [dist, label] = predict_classification(
        alpha, pan.class_dists, static_cast<std::size_t>(forest.num_classes));
    out.class_dist = std::move(dist);
    out.label = label;
  }
  return out;
}

}  // namespace abrf
