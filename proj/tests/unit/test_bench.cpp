#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "causalsel/campaign.hpp"
#include "causalsel/config.hpp"
#include "causalsel/csv_io.hpp"
#include "causalsel/datagen.hpp"
#include "causalsel/errors.hpp"
#include "causalsel/selection.hpp"

using namespace causalsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "causalsel_test_bench";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int status = 0;
  std::string err;
};

// Runs the CLI binary from CAUSALSEL_CLI with stderr captured.
CliResult cli(const std::string& args) {
  const char* bin = std::getenv("CAUSALSEL_CLI");
  if (bin == nullptr) return {-1, "CAUSALSEL_CLI not set"};
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " 2>" + err.string() + " >/dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

CampaignConfig tiny_config() {
  CampaignConfig cfg;
  cfg.name = "tiny";
  cfg.n_instances = 1;
  cfg.seed = 5;
  cfg.source.sim.n = 400;
  cfg.family.kind = "custom";
  cfg.family.caussim.n_bases = 1;
  cfg.family.caussim.lambdas = {0.1};
  cfg.nuisances = {"oracle"};
  cfg.procedures = {"shared", "separate"};
  return cfg;
}

}  // namespace

TEST(CsvIo, RoundTripIsBitIdentical) {
  SimConfig sim;
  sim.seed = 3;
  sim.n = 300;
  const Dataset d = simulate(sim);
  std::stringstream buf;
  write_dataset_csv(buf, d);
  const Dataset back = read_dataset_csv(buf);
  EXPECT_TRUE(back.x == d.x);
  EXPECT_TRUE(back.a == d.a);
  EXPECT_TRUE(back.y == d.y);
  ASSERT_TRUE(back.has_oracle());
  EXPECT_TRUE(back.oracle->e == d.oracle->e);
  EXPECT_TRUE(back.oracle->cate == d.oracle->cate);
}

TEST(CsvIo, BadTreatmentNamesColumn) {
  std::istringstream in("x_0,a,y\n0.1,0,1.0\n0.2,2,1.5\n");
  try {
    read_dataset_csv(in, "bad.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("column a"), std::string::npos) << e.what();
  }
}

TEST(CsvIo, PartialOracleRejected) {
  std::istringstream in("x_0,a,y,mu_0\n0.1,0,1.0,0.5\n0.2,1,1.5,0.5\n");
  EXPECT_THROW(read_dataset_csv(in), DataError);
}

TEST(CsvIo, WithoutOracleTauRiskIsAbsent) {
  SimConfig sim;
  sim.seed = 8;
  sim.n = 5000;
  Dataset d = simulate(sim);
  CandidateFamily f = caussim_family(2, CaussimFamilyOptions{{1.0}, 1, 2, 1.0});
  SelectionConfig c;
  c.nuisance_modes = {"linear"};
  std::stringstream with;
  write_dataset_csv(with, d);
  const SelectionRun a = run_selection(read_dataset_csv(with), f, c);
  EXPECT_NE(a.risk_table.find(RiskName::kTau, kNoNuisance), nullptr);
  d.oracle.reset();
  std::stringstream without;
  write_dataset_csv(without, d);
  const SelectionRun b = run_selection(read_dataset_csv(without), f, c);
  EXPECT_EQ(b.risk_table.find(RiskName::kTau, kNoNuisance), nullptr);
  EXPECT_NE(b.risk_table.find(RiskName::kR, "linear"), nullptr);
  EXPECT_NE(b.risk_table.find(RiskName::kMu, kNoNuisance), nullptr);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& name : recipe_names()) {
    const CampaignConfig cfg = recipe(name);
    EXPECT_EQ(config_to_json(parse_config(config_to_json(cfg))), config_to_json(cfg)) << name;
  }
}

TEST(Config, RejectsUnknownKeysAndVersions) {
  EXPECT_THROW(parse_config("{\"schema_version\": 1, \"bogus\": 3}"), ConfigError);
  EXPECT_THROW(parse_config("{\"schema_version\": 2}"), ConfigError);
  EXPECT_THROW(parse_config("{\"n_instances\": 2}"), ConfigError);
  EXPECT_THROW(parse_config("{\"schema_version\": 1, \"theta_range\": [0, 3]}"), ConfigError);
  EXPECT_THROW(recipe("fig99"), ConfigError);
}

TEST(Campaign, OneRowPerRiskPerProcedure) {
  std::ostringstream out;
  run_campaign(tiny_config(), out);
  std::istringstream in(out.str());
  const auto rows = read_results_csv(in);
  // mu_risk plus four oracle-nuisance risks, for two procedures.
  EXPECT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.kendall.has_value());
    EXPECT_TRUE(r.theta.has_value());
  }
}

TEST(Campaign, OutputIndependentOfJobs) {
  CampaignConfig cfg = tiny_config();
  cfg.n_instances = 3;
  cfg.nuisances = {"oracle", "linear"};
  std::ostringstream a, b;
  run_campaign(cfg, a, 1);
  run_campaign(cfg, b, 3);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Cli, SimulateSelectNtvAndCampaign) {
  if (std::getenv("CAUSALSEL_CLI") == nullptr) GTEST_SKIP() << "CAUSALSEL_CLI not set";
  const fs::path dir = scratch();
  const fs::path config = dir / "tiny.json";
  {
    std::ofstream out(config);
    out << config_to_json(tiny_config());
  }
  const fs::path data = dir / "d.csv";
  ASSERT_EQ(cli("simulate --config " + config.string() + " --out " + data.string()).status, 0);
  const Dataset d = ingest_csv(data.string());
  EXPECT_EQ(d.size(), 400u);

  const fs::path risks = dir / "risks.csv";
  const CliResult sel = cli("select --data " + data.string() +
                            " --family gbt_18 --nuisances oracle,linear --out " + risks.string());
  ASSERT_EQ(sel.status, 0) << sel.err;
  EXPECT_EQ(slurp(risks).substr(0, 42), "candidate_id,risk_name,nuisance_mode,value");

  const CliResult ntv = cli("ntv --data " + data.string() + " --source oracle");
  EXPECT_EQ(ntv.status, 0) << ntv.err;

  const fs::path r1 = dir / "r1.csv", r2 = dir / "r2.csv";
  ASSERT_EQ(cli("campaign --config " + config.string() + " --out " + r1.string()).status, 0);
  ASSERT_EQ(cli("campaign --config " + config.string() + " --jobs 2 --out " + r2.string()).status,
            0);
  EXPECT_EQ(slurp(r1), slurp(r2));
  EXPECT_EQ(slurp(r1).substr(0, slurp(r1).find('\n')), kResultsHeader);
}

TEST(Cli, ErrorsAreReported) {
  if (std::getenv("CAUSALSEL_CLI") == nullptr) GTEST_SKIP() << "CAUSALSEL_CLI not set";
  const fs::path dir = scratch();
  const fs::path bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "x_0,a,y\n0.1,0,1.0\n0.2,2,1.5\n";
  }
  const CliResult r = cli("ntv --data " + bad.string() + " --source plugin_linear");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("kind=data"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column a"), std::string::npos) << r.err;

  const fs::path cfg = dir / "bad.json";
  {
    std::ofstream out(cfg);
    out << "{\"schema_version\": 7}";
  }
  const CliResult c = cli("campaign --config " + cfg.string() + " --out " + (dir / "x.csv").string());
  EXPECT_EQ(c.status, 1);
  EXPECT_NE(c.err.find("kind=config"), std::string::npos) << c.err;

  EXPECT_EQ(cli("campaign --jobs 0 --recipe fig4_desk --out x.csv").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
}
