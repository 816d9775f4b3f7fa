#include "causalsel/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "causalsel/errors.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

using nlohmann::json;

namespace {

void allow_keys(const json& object, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!object.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
void read(const json& object, const char* key, T& out, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

SplitFractions read_split(const json& j, const std::string& where, SplitFractions split) {
  allow_keys(j, where, {"train", "test", "nuisance"});
  read(j, "train", split.train, where);
  read(j, "test", split.test, where);
  read(j, "nuisance", split.nuisance, where);
  return split;
}

json split_json(const SplitFractions& s) {
  return json{{"train", s.train}, {"test", s.test}, {"nuisance", s.nuisance}};
}

void check_subset(const std::vector<std::string>& values, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (values.empty()) throw ConfigError(where + ": must not be empty");
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return v == a; }) ==
        allowed.end()) {
      throw ConfigError(where + ": unknown value '" + v + "'");
    }
    if (!seen.insert(v).second) throw ConfigError(where + ": duplicate value '" + v + "'");
  }
}

}  // namespace

void CampaignConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("schema_version " + std::to_string(schema_version) + " is not supported");
  }
  if (n_instances < 1) throw ConfigError("n_instances must be >= 1");
  if (!(theta_lo >= 0.0 && theta_lo <= theta_hi)) {
    throw ConfigError("theta_range must satisfy 0 <= lo <= hi");
  }
  if (paper_faithful && theta_hi > 2.5) {
    throw ConfigError("theta_range must lie within [0, 2.5] for paper-faithful campaigns");
  }
  if (source.kind == "caussim") {
    SimConfig sim = source.sim;
    sim.theta = theta_lo;
    sim.validate();
  } else if (source.kind == "csv") {
    if (source.paths.empty()) throw ConfigError("source.paths must list at least one file");
  } else {
    throw ConfigError("source.kind must be caussim or csv");
  }
  if (family.kind != "caussim_120" && family.kind != "gbt_18" && family.kind != "custom") {
    throw ConfigError("family.kind must be caussim_120, gbt_18 or custom");
  }
  if (family.base != "caussim" && family.base != "gbt") {
    throw ConfigError("family.base must be caussim or gbt");
  }
  check_subset(nuisances, {"oracle", "linear", "stacked"}, "nuisances");
  check_subset(procedures, {"shared", "separate"}, "procedures");
  split_shared.validate();
  split_separate.validate();
  if (split_shared.nuisance != 0.0) throw ConfigError("split_shared.nuisance must be 0");
  if (std::count(procedures.begin(), procedures.end(), "separate") &&
      split_separate.nuisance <= 0.0) {
    throw ConfigError("split_separate.nuisance must be > 0");
  }
  if (hp_budget < 1) throw ConfigError("hp_budget must be >= 1");
  if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
  if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("eta must lie in (0, 0.5)");
  if (overlap.plugin != "linear" && overlap.plugin != "gbt") {
    throw ConfigError("overlap.plugin must be linear or gbt");
  }
  if (sweep) {
    if (sweep->ratios.empty()) throw ConfigError("sweep.ratios must not be empty");
    for (const double r : sweep->ratios) {
      if (!(r > 0.0 && r < 1.0)) throw ConfigError("sweep.ratios must lie in (0, 1)");
    }
    if (!(sweep->holdout_frac > 0.0 && sweep->holdout_frac < 1.0)) {
      throw ConfigError("sweep.holdout_frac must lie in (0, 1)");
    }
  }
}

CampaignConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  allow_keys(root, "config",
             {"schema_version", "name", "n_instances", "seed", "theta_range", "paper_faithful",
              "source", "family", "nuisances", "procedures", "split_shared", "split_separate",
              "hp_budget", "cv_folds", "eta", "nuisance_grid", "overlap", "sweep"});
  CampaignConfig cfg;
  if (!root.contains("schema_version")) throw ConfigError("config: missing schema_version");
  read(root, "schema_version", cfg.schema_version, "config");
  if (cfg.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version " + std::to_string(cfg.schema_version) + " is not supported");
  }
  read(root, "name", cfg.name, "config");
  read(root, "n_instances", cfg.n_instances, "config");
  read(root, "seed", cfg.seed, "config");
  read(root, "paper_faithful", cfg.paper_faithful, "config");
  if (root.contains("theta_range")) {
    std::vector<double> range;
    read(root, "theta_range", range, "config");
    if (range.size() != 2) throw ConfigError("config.theta_range: expected [lo, hi]");
    cfg.theta_lo = range[0];
    cfg.theta_hi = range[1];
  }
  if (root.contains("source")) {
    const json& s = root["source"];
    allow_keys(s, "source",
               {"kind", "paths", "n", "p_a", "dim", "d_basis", "gamma", "sigma_noise",
                "noise_fraction", "sigma0_sq", "sigma1_sq", "coef_scale"});
    read(s, "kind", cfg.source.kind, "source");
    read(s, "paths", cfg.source.paths, "source");
    read(s, "n", cfg.source.sim.n, "source");
    read(s, "p_a", cfg.source.sim.p_a, "source");
    read(s, "dim", cfg.source.sim.dim, "source");
    read(s, "d_basis", cfg.source.sim.d_basis, "source");
    read(s, "gamma", cfg.source.sim.gamma, "source");
    if (s.contains("sigma_noise") && !s["sigma_noise"].is_null()) {
      double sigma = 0.0;
      read(s, "sigma_noise", sigma, "source");
      cfg.source.sim.sigma_noise = sigma;
    }
    read(s, "noise_fraction", cfg.source.sim.noise_fraction, "source");
    read(s, "sigma0_sq", cfg.source.sim.sigma0_sq, "source");
    read(s, "sigma1_sq", cfg.source.sim.sigma1_sq, "source");
    read(s, "coef_scale", cfg.source.sim.coef_scale, "source");
  }
  if (root.contains("family")) {
    const json& f = root["family"];
    allow_keys(f, "family",
               {"kind", "base", "lambdas", "n_bases", "n_knots", "gamma", "learning_rates",
                "max_leaf_nodes", "n_rounds", "min_samples_leaf"});
    read(f, "kind", cfg.family.kind, "family");
    read(f, "base", cfg.family.base, "family");
    read(f, "lambdas", cfg.family.caussim.lambdas, "family");
    read(f, "n_bases", cfg.family.caussim.n_bases, "family");
    read(f, "n_knots", cfg.family.caussim.n_knots, "family");
    read(f, "gamma", cfg.family.caussim.gamma, "family");
    read(f, "learning_rates", cfg.family.gbt.learning_rates, "family");
    read(f, "max_leaf_nodes", cfg.family.gbt.max_leaf_nodes, "family");
    read(f, "n_rounds", cfg.family.gbt.n_rounds, "family");
    read(f, "min_samples_leaf", cfg.family.gbt.min_samples_leaf, "family");
  }
  read(root, "nuisances", cfg.nuisances, "config");
  read(root, "procedures", cfg.procedures, "config");
  if (root.contains("split_shared")) {
    cfg.split_shared = read_split(root["split_shared"], "split_shared", cfg.split_shared);
  }
  if (root.contains("split_separate")) {
    cfg.split_separate = read_split(root["split_separate"], "split_separate", cfg.split_separate);
  }
  read(root, "hp_budget", cfg.hp_budget, "config");
  read(root, "cv_folds", cfg.cv_folds, "config");
  read(root, "eta", cfg.eta, "config");
  if (root.contains("nuisance_grid")) {
    const json& g = root["nuisance_grid"];
    allow_keys(g, "nuisance_grid",
               {"ridge_lambdas", "logistic_cs", "gbt_learning_rates", "gbt_leaves", "gbt_rounds",
                "gbt_min_samples_leaf"});
    read(g, "ridge_lambdas", cfg.nuisance_grid.ridge_lambdas, "nuisance_grid");
    read(g, "logistic_cs", cfg.nuisance_grid.logistic_cs, "nuisance_grid");
    read(g, "gbt_learning_rates", cfg.nuisance_grid.gbt_learning_rates, "nuisance_grid");
    read(g, "gbt_leaves", cfg.nuisance_grid.gbt_leaves, "nuisance_grid");
    read(g, "gbt_rounds", cfg.nuisance_grid.gbt_rounds, "nuisance_grid");
    read(g, "gbt_min_samples_leaf", cfg.nuisance_grid.gbt_min_samples_leaf, "nuisance_grid");
  }
  if (root.contains("overlap")) {
    const json& o = root["overlap"];
    allow_keys(o, "overlap", {"plugin", "calibrate"});
    read(o, "plugin", cfg.overlap.plugin, "overlap");
    read(o, "calibrate", cfg.overlap.calibrate, "overlap");
  }
  if (root.contains("sweep") && !root["sweep"].is_null()) {
    const json& w = root["sweep"];
    allow_keys(w, "sweep", {"ratios", "holdout_frac"});
    SweepConfig sweep;
    read(w, "ratios", sweep.ratios, "sweep");
    read(w, "holdout_frac", sweep.holdout_frac, "sweep");
    cfg.sweep = sweep;
  }
  cfg.validate();
  return cfg;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const CampaignConfig& cfg) {
  json source{{"kind", cfg.source.kind},
              {"n", cfg.source.sim.n},
              {"p_a", cfg.source.sim.p_a},
              {"dim", cfg.source.sim.dim},
              {"d_basis", cfg.source.sim.d_basis},
              {"gamma", cfg.source.sim.gamma},
              {"noise_fraction", cfg.source.sim.noise_fraction},
              {"sigma0_sq", cfg.source.sim.sigma0_sq},
              {"sigma1_sq", cfg.source.sim.sigma1_sq},
              {"coef_scale", cfg.source.sim.coef_scale}};
  if (cfg.source.sim.sigma_noise) source["sigma_noise"] = *cfg.source.sim.sigma_noise;
  if (!cfg.source.paths.empty()) source["paths"] = cfg.source.paths;
  json root{
      {"schema_version", cfg.schema_version},
      {"name", cfg.name},
      {"n_instances", cfg.n_instances},
      {"seed", cfg.seed},
      {"theta_range", {cfg.theta_lo, cfg.theta_hi}},
      {"paper_faithful", cfg.paper_faithful},
      {"source", source},
      {"family",
       {{"kind", cfg.family.kind},
        {"base", cfg.family.base},
        {"lambdas", cfg.family.caussim.lambdas},
        {"n_bases", cfg.family.caussim.n_bases},
        {"n_knots", cfg.family.caussim.n_knots},
        {"gamma", cfg.family.caussim.gamma},
        {"learning_rates", cfg.family.gbt.learning_rates},
        {"max_leaf_nodes", cfg.family.gbt.max_leaf_nodes},
        {"n_rounds", cfg.family.gbt.n_rounds},
        {"min_samples_leaf", cfg.family.gbt.min_samples_leaf}}},
      {"nuisances", cfg.nuisances},
      {"procedures", cfg.procedures},
      {"split_shared", split_json(cfg.split_shared)},
      {"split_separate", split_json(cfg.split_separate)},
      {"hp_budget", cfg.hp_budget},
      {"cv_folds", cfg.cv_folds},
      {"eta", cfg.eta},
      {"nuisance_grid",
       {{"ridge_lambdas", cfg.nuisance_grid.ridge_lambdas},
        {"logistic_cs", cfg.nuisance_grid.logistic_cs},
        {"gbt_learning_rates", cfg.nuisance_grid.gbt_learning_rates},
        {"gbt_leaves", cfg.nuisance_grid.gbt_leaves},
        {"gbt_rounds", cfg.nuisance_grid.gbt_rounds},
        {"gbt_min_samples_leaf", cfg.nuisance_grid.gbt_min_samples_leaf}}},
      {"overlap", {{"plugin", cfg.overlap.plugin}, {"calibrate", cfg.overlap.calibrate}}},
  };
  if (cfg.sweep) {
    root["sweep"] = {{"ratios", cfg.sweep->ratios}, {"holdout_frac", cfg.sweep->holdout_frac}};
  }
  return root.dump(2) + "\n";
}

std::vector<std::string> recipe_names() {
  return {"fig4_desk", "fig6_desk", "fig7_desk", "fig8_desk"};
}

CampaignConfig recipe(const std::string& name) {
  CampaignConfig cfg;
  cfg.name = name;
  cfg.seed = 2023;
  cfg.source.kind = "caussim";
  cfg.source.sim.n = 5000;
  cfg.family.kind = "caussim_120";
  if (name == "fig4_desk") {
    // Risk comparison across overlap tertiles.
    cfg.n_instances = 60;
    cfg.nuisances = {"stacked"};
    cfg.procedures = {"shared"};
  } else if (name == "fig6_desk") {
    cfg.n_instances = 30;
    cfg.nuisances = {"stacked"};
    cfg.procedures = {"shared", "separate"};
  } else if (name == "fig7_desk") {
    cfg.n_instances = 30;
    cfg.nuisances = {"linear", "stacked"};
    cfg.procedures = {"shared"};
  } else if (name == "fig8_desk") {
    cfg.n_instances = 10;
    cfg.nuisances = {"stacked"};
    cfg.procedures = {"shared"};
    cfg.sweep = SweepConfig{{0.5, 0.6, 0.7, 0.8, 0.9}, 0.3};
  } else {
    throw ConfigError("unknown recipe '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

CandidateFamily build_family(const CampaignConfig& cfg) {
  const std::uint64_t family_seed = child_seed(cfg.seed, 0xfa);
  if (cfg.family.kind == "caussim_120") return caussim_family(family_seed);
  if (cfg.family.kind == "gbt_18") return gbt_family();
  if (cfg.family.base == "gbt") return gbt_family(cfg.family.gbt);
  return caussim_family(family_seed, cfg.family.caussim);
}

}  // namespace causalsel
