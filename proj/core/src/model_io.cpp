#include "abrf/model_io.hpp"

#include <fstream>

namespace abrf {

namespace {

Json condition_to_json(const GrowthCondition& c) {
  Json j;
  j["kind"] = c.kind == GrowthCondition::Kind::kMaxDepth ? "max_depth" : "min_leaf";
  j["value"] = c.value;
  return j;
}

GrowthCondition condition_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int value = j.at("value").get<int>();
  if (kind == "max_depth") return GrowthCondition::max_depth(value);
  if (kind == "min_leaf") return GrowthCondition::min_leaf(value);
  throw Error("unknown growth condition kind '" + kind + "'");
}

}  // namespace

Json tree_to_json(const Tree& tree) {
  Json j;
  j["version"] = 1;
  j["mode"] = to_string(tree.mode);
  j["splitter"] = to_string(tree.splitter);
  j["n_features"] = tree.n_features;
  j["num_classes"] = tree.num_classes;
  Json nodes = Json::array();
  for (const TreeNode& node : tree.nodes) {
    Json n;
    if (node.feature < 0) {
      n["leaf"] = node.leaf;
    } else {
      n["f"] = node.feature;
      n["t"] = node.threshold;
      n["l"] = node.left;
      n["r"] = node.right;
    }
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  Json leaves = Json::array();
  for (const LeafStats& leaf : tree.leaves) {
    Json l;
    l["members"] = leaf.member_indices;
    l["mean"] = leaf.mean_vector;
    if (tree.mode == Task::kRegression)
      l["value"] = leaf.mean_target;
    else
      l["dist"] = leaf.class_dist;
    leaves.push_back(std::move(l));
  }
  j["leaves"] = std::move(leaves);
  return j;
}

Tree tree_from_json(const Json& j) {
  Tree tree;
  tree.mode = task_from_string(j.at("mode").get<std::string>());
  tree.splitter = j.at("splitter").get<std::string>() == "cart" ? Splitter::kCart
                                                                : Splitter::kErt;
  tree.n_features = j.at("n_features").get<std::size_t>();
  tree.num_classes = j.at("num_classes").get<int>();
  for (const Json& n : j.at("nodes")) {
    TreeNode node;
    if (n.contains("leaf")) {
      node.leaf = n.at("leaf").get<int>();
    } else {
      node.feature = n.at("f").get<int>();
      node.threshold = n.at("t").get<double>();
      node.left = n.at("l").get<int>();
      node.right = n.at("r").get<int>();
    }
    tree.nodes.push_back(node);
  }
  for (const Json& l : j.at("leaves")) {
    LeafStats leaf;
    leaf.member_indices = l.at("members").get<std::vector<std::size_t>>();
    leaf.mean_vector = l.at("mean").get<std::vector<double>>();
    if (tree.mode == Task::kRegression)
      leaf.mean_target = l.at("value").get<double>();
    else
      leaf.class_dist = l.at("dist").get<std::vector<double>>();
    tree.leaves.push_back(std::move(leaf));
  }
  if (tree.nodes.empty()) throw Error("tree document has no nodes");
  return tree;
}

Json forest_to_json(const Forest& forest) {
  Json j;
  Json config;
  config["n_trees"] = forest.config.n_trees;
  config["ensemble"] = to_string(forest.config.ensemble);
  config["condition"] = condition_to_json(forest.config.condition);
  config["max_features"] = forest.config.max_features;
  config["seed"] = forest.config.seed;
  j["config"] = std::move(config);
  j["mode"] = to_string(forest.mode);
  j["n_features"] = forest.n_features;
  j["num_classes"] = forest.num_classes;
  Json trees = Json::array();
  for (const Tree& tree : forest.trees) trees.push_back(tree_to_json(tree));
  j["trees"] = std::move(trees);
  return j;
}

Forest forest_from_json(const Json& j) {
  Forest forest;
  const Json& config = j.at("config");
  forest.config.n_trees = config.at("n_trees").get<std::size_t>();
  forest.config.ensemble = ensemble_from_string(config.at("ensemble").get<std::string>());
  forest.config.condition = condition_from_json(config.at("condition"));
  forest.config.max_features = config.at("max_features").get<std::size_t>();
  forest.config.seed = config.at("seed").get<std::uint64_t>();
  forest.mode = task_from_string(j.at("mode").get<std::string>());
  forest.n_features = j.at("n_features").get<std::size_t>();
  forest.num_classes = j.at("num_classes").get<int>();
  for (const Json& t : j.at("trees")) forest.trees.push_back(tree_from_json(t));
  if (forest.trees.empty()) throw Error("forest document has no trees");
  return forest;
}

Json params_to_json(const AttentionParams& params) {
  Json j;
  j["softmax_sign"] = to_string(params.sign);
  j["epsilon"] = params.epsilon;
  j["tau"] = params.tau;
  j["w"] = params.w;
  j["v"] = params.v;
  j["z"] = params.z;
  return j;
}

AttentionParams params_from_json(const Json& j) {
  AttentionParams params;
  params.sign = softmax_sign_from_string(j.at("softmax_sign").get<std::string>());
  params.epsilon = j.at("epsilon").get<double>();
  params.tau = j.at("tau").get<double>();
  params.w = j.at("w").get<std::vector<double>>();
  params.v = j.at("v").get<std::vector<double>>();
  params.z = j.at("z").get<std::vector<double>>();
  return params;
}

Prediction SavedModel::predict(std::span<const double> x) const {
  if (scaler.empty()) return predict_with_model(forest, model, params, x);
  const std::vector<double> scaled = scaler.apply(x);
  return predict_with_model(forest, model, params, scaled);
}

Json model_to_json(const SavedModel& saved) {
  Json j;
  j["format"] = "abrf-model";
  j["version"] = 1;
  j["model"] = to_string(saved.model);
  j["task"] = to_string(saved.forest.mode);
  j["feature_names"] = saved.feature_names;
  j["class_names"] = saved.class_names;
  if (!saved.scaler.empty()) {
    Json scaler;
    scaler["lo"] = saved.scaler.lo;
    scaler["hi"] = saved.scaler.hi;
    j["scaler"] = std::move(scaler);
  }
  j["attention"] = params_to_json(saved.params);
  j["forest"] = forest_to_json(saved.forest);
  return j;
}

SavedModel model_from_json(const Json& j) {
  if (j.value("format", "") != "abrf-model")
    throw Error("not an abrf model document");
  if (j.value("version", 0) != 1)
    throw Error("unsupported model document version");
  SavedModel saved;
  saved.model = model_from_string(j.at("model").get<std::string>());
  saved.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  saved.class_names = j.at("class_names").get<std::vector<std::string>>();
  if (j.contains("scaler")) {
    saved.scaler.lo = j.at("scaler").at("lo").get<std::vector<double>>();
    saved.scaler.hi = j.at("scaler").at("hi").get<std::vector<double>>();
  }
  saved.params = params_from_json(j.at("attention"));
  saved.forest = forest_from_json(j.at("forest"));
  return saved;
}

void save_model(const SavedModel& saved, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << model_to_json(saved).dump(1) << '\n';
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("cannot parse model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace abrf
