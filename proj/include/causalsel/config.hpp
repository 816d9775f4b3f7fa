#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalsel/candidates.hpp"
#include "causalsel/datagen.hpp"
#include "causalsel/nuisance.hpp"
#include "causalsel/selection.hpp"

namespace causalsel {

inline constexpr int kSchemaVersion = 1;

struct SourceConfig {
  std::string kind = "caussim";  // caussim | csv
  // Simulation settings; seed and theta are set per instance.
  SimConfig sim;
  // csv: one instance per file, cycled when n_instances exceeds the count.
  std::vector<std::string> paths;
};

struct FamilyConfig {
  std::string kind = "caussim_120";  // caussim_120 | gbt_18 | custom
  // For custom families: which grid the options below describe.
  std::string base = "caussim";  // caussim | gbt
  CaussimFamilyOptions caussim;
  GbtFamilyOptions gbt;
};

struct OverlapConfig {
  // Plug-in model used when the data has no oracle propensity.
  std::string plugin = "gbt";  // linear | gbt
  bool calibrate = true;
};

struct SweepConfig {
  std::vector<double> ratios;
  double holdout_frac = 0.3;
};

struct CampaignConfig {
  int schema_version = kSchemaVersion;
  std::string name = "campaign";
  int n_instances = 1;
  std::uint64_t seed = 0;
  double theta_lo = 0.0;
  double theta_hi = 2.5;
  bool paper_faithful = true;
  SourceConfig source;
  FamilyConfig family;
  std::vector<std::string> nuisances{"stacked"};
  std::vector<std::string> procedures{"shared"};
  SplitFractions split_shared = default_split(Procedure::kShared);
  SplitFractions split_separate = default_split(Procedure::kSeparate);
  int hp_budget = 10;
  int cv_folds = 5;
  double eta = kDefaultClip;
  NuisanceGrid nuisance_grid;
  OverlapConfig overlap;
  // When set the campaign runs the split-ratio sweep instead of selection.
  std::optional<SweepConfig> sweep;

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError on malformed JSON, unknown keys, wrong types or an
// unsupported schema_version.
CampaignConfig parse_config(const std::string& json_text);
CampaignConfig load_config(const std::string& path);
std::string config_to_json(const CampaignConfig& cfg);

// Named desk-scale experiment recipes: fig4_desk, fig6_desk, fig7_desk,
// fig8_desk. Throws ConfigError on an unknown name.
CampaignConfig recipe(const std::string& name);
std::vector<std::string> recipe_names();

// The family a campaign evaluates; member ids are stable across instances.
CandidateFamily build_family(const CampaignConfig& cfg);

}  // namespace causalsel
