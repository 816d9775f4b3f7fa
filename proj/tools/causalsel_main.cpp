#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "causalsel/campaign.hpp"
#include "causalsel/config.hpp"
#include "causalsel/csv_io.hpp"
#include "causalsel/errors.hpp"
#include "causalsel/format.hpp"
#include "causalsel/overlap.hpp"
#include "causalsel/selection.hpp"

namespace {

using namespace causalsel;

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

CampaignConfig resolve_config(const std::string& config_path, const std::string& recipe_name) {
  if (!config_path.empty() && !recipe_name.empty()) {
    throw ConfigError("give either --config or --recipe, not both");
  }
  if (!recipe_name.empty()) return recipe(recipe_name);
  if (config_path.empty()) throw ConfigError("one of --config or --recipe is required");
  return load_config(config_path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal model-selection risks: simulation, selection and overlap tools"};
  app.require_subcommand(1);

  std::string config_path, recipe_name, out_path, data_path, manifest_path;
  std::size_t instance = 0;
  int jobs = 1;
  int n_instances = 0;

  auto* simulate_cmd = app.add_subcommand("simulate", "Write one simulated instance as CSV");
  simulate_cmd->add_option("--config", config_path, "Campaign config JSON");
  simulate_cmd->add_option("--recipe", recipe_name, "Named recipe instead of a config file");
  simulate_cmd->add_option("--instance", instance, "Instance index");
  simulate_cmd->add_option("--out", out_path, "Output CSV")->required();

  std::string family_name = "caussim_120";
  std::string procedure_name = "shared";
  std::string nuisance_list = "stacked";
  std::string selected_path;
  std::uint64_t seed = 0;
  auto* select_cmd = app.add_subcommand("select", "Run model selection on one dataset");
  select_cmd->add_option("--data", data_path, "Dataset CSV")->required();
  select_cmd->add_option("--family", family_name, "caussim_120 or gbt_18");
  select_cmd->add_option("--procedure", procedure_name, "shared or separate");
  select_cmd->add_option("--nuisances", nuisance_list, "Comma list of oracle,linear,stacked");
  select_cmd->add_option("--seed", seed, "Seed for splits, nuisances and the family");
  select_cmd->add_option("--out", out_path, "Risk table CSV")->required();
  select_cmd->add_option("--selected", selected_path, "Optional CSV of selected candidates");
  select_cmd->add_option("--manifest", manifest_path, "Optional family manifest CSV");

  std::string source_name = "plugin_gbt";
  bool no_calibrate = false;
  auto* ntv_cmd = app.add_subcommand("ntv", "Normalized total variation of a dataset");
  ntv_cmd->add_option("--data", data_path, "Dataset CSV")->required();
  ntv_cmd->add_option("--source", source_name, "oracle, plugin_linear or plugin_gbt");
  ntv_cmd->add_flag("--no-calibrate", no_calibrate, "Skip Platt calibration of the plug-in");
  ntv_cmd->add_option("--seed", seed, "Seed for the holdout split");

  auto* campaign_cmd = app.add_subcommand("campaign", "Run a campaign");
  campaign_cmd->add_option("--config", config_path, "Campaign config JSON");
  campaign_cmd->add_option("--recipe", recipe_name, "Named recipe instead of a config file");
  campaign_cmd->add_option("--out", out_path, "Results CSV")->required();
  campaign_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  campaign_cmd->add_option("--instances", n_instances, "Override n_instances");
  campaign_cmd->add_option("--manifest", manifest_path, "Optional family manifest CSV");

  auto* recipe_cmd = app.add_subcommand("recipe", "Print a named recipe as config JSON");
  recipe_cmd->add_option("name", recipe_name, "fig4_desk, fig6_desk, fig7_desk or fig8_desk")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: kind=usage message=" << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (simulate_cmd->parsed()) {
      const CampaignConfig cfg = resolve_config(config_path, recipe_name);
      if (cfg.source.kind != "caussim") throw ConfigError("simulate needs a caussim source");
      const CampaignInstance inst = make_instance(cfg, instance);
      write_dataset_csv(out_path, inst.data);
      std::cerr << "wrote " << inst.data.size() << " rows (theta=" << format_double(*inst.theta)
                << ", ntv=" << format_double(inst.overlap.ntv) << ") to " << out_path << "\n";
    } else if (select_cmd->parsed()) {
      const Dataset data = ingest_csv(data_path);
      CampaignConfig cfg;
      cfg.seed = seed;
      cfg.family.kind = family_name;
      if (family_name != "caussim_120" && family_name != "gbt_18") {
        throw ConfigError("--family must be caussim_120 or gbt_18");
      }
      const CandidateFamily family = build_family(cfg);
      SelectionConfig sel;
      sel.procedure = parse_procedure(procedure_name);
      sel.split = default_split(sel.procedure);
      sel.nuisance_modes = split_list(nuisance_list);
      sel.seed = seed;
      const SelectionRun run = run_selection(data, family, sel);
      std::ofstream out = open_output(out_path);
      run.risk_table.write_csv(out);
      finish(out, out_path);
      if (!selected_path.empty()) {
        std::ofstream sel_out = open_output(selected_path);
        sel_out << "risk_name,nuisance_mode,selected_candidate\n";
        for (const auto& column : run.risk_table.columns) {
          sel_out << to_string(column.risk) << ',' << column.nuisance_mode << ','
                  << run.selected.at(column.key()) << '\n';
        }
        finish(sel_out, selected_path);
      }
      if (!manifest_path.empty()) {
        std::ofstream man = open_output(manifest_path);
        write_manifest(man, family);
        finish(man, manifest_path);
      }
      std::cerr << "evaluated " << family.size() << " candidates on " << run.test_rows.size()
                << " test rows\n";
    } else if (ntv_cmd->parsed()) {
      const Dataset data = ingest_csv(data_path);
      OverlapReport report;
      if (source_name == "oracle") {
        report = ntv_oracle(data);
      } else if (source_name == "plugin_linear" || source_name == "plugin_gbt") {
        PluginOptions options;
        options.seed = seed;
        report = ntv_plugin(data,
                            source_name == "plugin_linear" ? OverlapSource::kPluginLinear
                                                           : OverlapSource::kPluginGbt,
                            !no_calibrate, options);
      } else {
        throw ConfigError("--source must be oracle, plugin_linear or plugin_gbt");
      }
      std::cout << "ntv,source,calibrated\n"
                << format_double(report.ntv) << ',' << to_string(report.source) << ','
                << (report.calibrated ? "true" : "false") << "\n";
    } else if (campaign_cmd->parsed()) {
      CampaignConfig cfg = resolve_config(config_path, recipe_name);
      if (n_instances > 0) cfg.n_instances = n_instances;
      run_campaign(cfg, out_path, jobs, &std::cerr);
      if (!manifest_path.empty()) {
        std::ofstream man = open_output(manifest_path);
        write_manifest(man, build_family(cfg));
        finish(man, manifest_path);
      }
    } else if (recipe_cmd->parsed()) {
      std::cout << config_to_json(recipe(recipe_name));
    }
  } catch (const Error& e) {
    std::cerr << "error: kind=" << to_string(e.kind()) << " message=" << one_line(e.what())
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal message=" << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
