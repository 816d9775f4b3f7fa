#include "causalsel/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "causalsel/csv_io.hpp"
#include "causalsel/errors.hpp"
#include "causalsel/format.hpp"
#include "causalsel/rng.hpp"

namespace causalsel {

namespace {

std::string optional_field(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::optional<double> parse_optional(const std::string& text, std::size_t line) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw DataError("results: line " + std::to_string(line) + ": invalid number '" + text + "'");
  }
  return value;
}

SelectionConfig selection_config(const CampaignConfig& cfg, Procedure procedure,
                                 std::uint64_t seed) {
  SelectionConfig sel;
  sel.procedure = procedure;
  sel.split = procedure == Procedure::kShared ? cfg.split_shared : cfg.split_separate;
  sel.nuisance_modes = cfg.nuisances;
  sel.hp_budget = cfg.hp_budget;
  sel.cv_folds = cfg.cv_folds;
  sel.eta = cfg.eta;
  sel.nuisance_grid = cfg.nuisance_grid;
  sel.seed = seed;
  return sel;
}

}  // namespace

CampaignInstance make_instance(const CampaignConfig& cfg, std::size_t index) {
  const std::uint64_t instance_seed = child_seed(cfg.seed, index);
  CampaignInstance instance;
  if (cfg.source.kind == "caussim") {
    Rng rng(child_seed(instance_seed, 0));
    SimConfig sim = cfg.source.sim;
    sim.theta = rng.uniform(cfg.theta_lo, cfg.theta_hi);
    sim.seed = child_seed(instance_seed, 1);
    instance.theta = sim.theta;
    instance.data = simulate(sim);
    instance.overlap = ntv_oracle(instance.data, sim.p_a);
    return instance;
  }
  const std::string& path = cfg.source.paths[index % cfg.source.paths.size()];
  instance.data = ingest_csv(path);
  if (instance.data.has_oracle()) {
    instance.overlap = ntv_oracle(instance.data);
  } else {
    PluginOptions options;
    options.seed = child_seed(instance_seed, 3);
    instance.overlap = ntv_plugin(instance.data,
                                  cfg.overlap.plugin == "linear" ? OverlapSource::kPluginLinear
                                                                 : OverlapSource::kPluginGbt,
                                  cfg.overlap.calibrate, options);
  }
  return instance;
}

std::string run_instance(const CampaignConfig& cfg, const CandidateFamily& family,
                         std::size_t index) {
  const CampaignInstance instance = make_instance(cfg, index);
  const std::uint64_t instance_seed = child_seed(cfg.seed, index);
  const std::string prefix = std::to_string(index) + "," + optional_field(instance.theta) + "," +
                             format_double(instance.overlap.ntv) + ",";
  std::ostringstream out;

  if (cfg.sweep) {
    const SelectionConfig sel =
        selection_config(cfg, Procedure::kShared, child_seed(instance_seed, 2));
    const auto rows =
        split_ratio_sweep(instance.data, family, cfg.sweep->ratios, sel, cfg.sweep->holdout_frac);
    for (const auto& row : rows) {
      out << prefix << format_double(row.ratio) << ',' << row.metric << ','
          << format_double(row.value) << ',' << row.selected_candidate << '\n';
    }
    return out.str();
  }

  for (const auto& name : cfg.procedures) {
    const Procedure procedure = parse_procedure(name);
    const SelectionRun run = run_selection(
        instance.data, family, selection_config(cfg, procedure, child_seed(instance_seed, 2)));
    const bool has_oracle = run.risk_table.find(RiskName::kTau, kNoNuisance) != nullptr;
    AgreementReport report;
    if (has_oracle) report = agreement(run);
    for (const auto& column : run.risk_table.columns) {
      if (column.risk == RiskName::kTau) continue;
      const std::string key = column.key();
      auto get = [&](const std::map<std::string, double>& m) -> std::optional<double> {
        const auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        return it->second;
      };
      out << prefix << to_string(procedure) << ',' << to_string(column.risk) << ','
          << column.nuisance_mode << ',' << optional_field(get(report.kendall)) << ','
          << optional_field(get(report.relative_kendall)) << ','
          << optional_field(get(report.excess_tau_risk)) << ',' << run.selected.at(key) << '\n';
    }
  }
  return out.str();
}

void run_campaign(const CampaignConfig& cfg, std::ostream& out, int jobs, std::ostream* log) {
  cfg.validate();
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  const CandidateFamily family = build_family(cfg);
  const auto n = static_cast<std::size_t>(cfg.n_instances);
  std::vector<std::string> chunks(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        chunks[i] = run_instance(cfg, family, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::size_t finished = ++done;
      if (log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *log << "[" << cfg.name << "] instance " << i << " done (" << finished << "/" << n
             << ")\n";
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  out << (cfg.sweep ? kSweepHeader : kResultsHeader) << '\n';
  for (const auto& chunk : chunks) out << chunk;
}

void run_campaign(const CampaignConfig& cfg, const std::string& out_path, int jobs,
                  std::ostream* log) {
  std::ostringstream buffer;
  run_campaign(cfg, buffer, jobs, log);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << buffer.str();
  out.flush();
  if (!out) throw IoError("write to '" + out_path + "' failed");
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw DataError("results: unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) {
      throw DataError("results: line " + std::to_string(line_no) + " has " +
                      std::to_string(f.size()) + " fields");
    }
    ResultRow row;
    const auto id = parse_optional(f[0], line_no);
    const auto ntv_value = parse_optional(f[2], line_no);
    if (!id || !ntv_value) throw DataError("results: line " + std::to_string(line_no) + ": missing id or ntv");
    row.instance_id = static_cast<std::size_t>(*id);
    row.theta = parse_optional(f[1], line_no);
    row.ntv = *ntv_value;
    row.procedure = f[3];
    row.risk_name = f[4];
    row.nuisance_mode = f[5];
    row.kendall = parse_optional(f[6], line_no);
    row.relative_kendall = parse_optional(f[7], line_no);
    row.excess_tau_risk = parse_optional(f[8], line_no);
    row.selected_candidate = f[9];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace causalsel
