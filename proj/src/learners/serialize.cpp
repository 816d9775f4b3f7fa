#include "causalsel/learners/serialize.hpp"

#include <json.hpp>

#include "causalsel/errors.hpp"

namespace causalsel {

using nlohmann::json;

namespace {

constexpr int kModelSchema = 1;

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json base_json(const BaseModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RidgeModel>) {
          return {{"type", "ridge"},
                  {"weights", vector_json(m.weights)},
                  {"intercept", m.intercept},
                  {"lambda", m.lambda}};
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          return {{"type", "logistic"},     {"weights", vector_json(m.weights)},
                  {"intercept", m.intercept}, {"l2", m.l2},
                  {"max_iter", m.max_iter},   {"tol", m.tol},
                  {"converged", m.converged}, {"iterations", m.iterations}};
        } else {
          json trees = json::array();
          for (const auto& tree : m.trees) {
            json nodes = json::array();
            for (const auto& node : tree.nodes) {
              nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
            }
            trees.push_back(nodes);
          }
          return {{"type", "gbt"},
                  {"loss", m.params.loss == GbtLoss::kSquared ? "squared" : "logistic"},
                  {"learning_rate", m.params.learning_rate},
                  {"max_leaf_nodes", m.params.max_leaf_nodes},
                  {"n_rounds", m.params.n_rounds},
                  {"min_samples_leaf", m.params.min_samples_leaf},
                  {"l2_regularization", m.params.l2_regularization},
                  {"base_score", m.base_score},
                  {"trees", trees}};
        }
      },
      model);
}

BaseModel base_from(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ridge") {
    RidgeModel m;
    m.weights = vector_from(j.at("weights"));
    m.intercept = j.at("intercept").get<double>();
    m.lambda = j.at("lambda").get<double>();
    return m;
  }
  if (type == "logistic") {
    LogisticModel m;
    m.weights = vector_from(j.at("weights"));
    m.intercept = j.at("intercept").get<double>();
    m.l2 = j.at("l2").get<double>();
    m.max_iter = j.at("max_iter").get<int>();
    m.tol = j.at("tol").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    return m;
  }
  if (type == "gbt") {
    GbtModel m;
    const std::string loss = j.at("loss").get<std::string>();
    if (loss != "squared" && loss != "logistic") throw ConfigError("model: unknown gbt loss " + loss);
    m.params.loss = loss == "squared" ? GbtLoss::kSquared : GbtLoss::kLogistic;
    m.params.learning_rate = j.at("learning_rate").get<double>();
    m.params.max_leaf_nodes = j.at("max_leaf_nodes").get<int>();
    m.params.n_rounds = j.at("n_rounds").get<int>();
    m.params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    m.params.l2_regularization = j.at("l2_regularization").get<double>();
    m.base_score = j.at("base_score").get<double>();
    for (const auto& nodes : j.at("trees")) {
      RegressionTree tree;
      for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.value = n.at(4).get<double>();
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  }
  throw ConfigError("model: unknown base model type '" + type + "'");
}

json parse_document(const std::string& text, const char* expected_type) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema_version", 0) != kModelSchema) {
    throw ConfigError("model: unsupported or missing schema_version");
  }
  if (expected_type && j.value("type", std::string()) != expected_type) {
    throw ConfigError(std::string("model: expected type ") + expected_type);
  }
  return j;
}

}  // namespace

std::string save_model(const BaseModel& model) {
  json j = base_json(model);
  j["schema_version"] = kModelSchema;
  return j.dump();
}

std::string save_model(const StackedModel& model) {
  json bases = json::array();
  for (const auto& base : model.base_models) bases.push_back(base_json(base));
  json j{{"schema_version", kModelSchema},
         {"type", "stacked"},
         {"task", model.task == Task::kRegression ? "regression" : "classification"},
         {"oof_folds", model.oof_folds},
         {"meta_weights", vector_json(model.meta_weights)},
         {"base_models", bases}};
  return j.dump();
}

BaseModel load_base_model(const std::string& json_text) {
  const json j = parse_document(json_text, nullptr);
  try {
    return base_from(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

StackedModel load_stacked_model(const std::string& json_text) {
  const json j = parse_document(json_text, "stacked");
  try {
    StackedModel m;
    const std::string task = j.at("task").get<std::string>();
    if (task != "regression" && task != "classification") throw ConfigError("model: unknown task " + task);
    m.task = task == "regression" ? Task::kRegression : Task::kClassification;
    m.oof_folds = j.at("oof_folds").get<int>();
    m.meta_weights = vector_from(j.at("meta_weights"));
    for (const auto& base : j.at("base_models")) m.base_models.push_back(base_from(base));
    if (static_cast<std::size_t>(m.meta_weights.size()) != m.base_models.size()) {
      throw ConfigError("model: meta_weights and base_models differ in count");
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

}  // namespace causalsel
