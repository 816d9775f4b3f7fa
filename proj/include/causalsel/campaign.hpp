#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalsel/config.hpp"
#include "causalsel/overlap.hpp"

namespace causalsel {

inline constexpr const char* kResultsHeader =
    "instance_id,theta,ntv,procedure,risk_name,nuisance_mode,kendall,relative_kendall,"
    "excess_tau_risk,selected_candidate";
inline constexpr const char* kSweepHeader =
    "instance_id,theta,ntv,ratio,metric,value,selected_candidate";

struct CampaignInstance {
  Dataset data;
  // Unset for CSV sources.
  std::optional<double> theta;
  OverlapReport overlap;
};

// Dataset and overlap report of instance `index`; a pure function of
// (cfg, index).
CampaignInstance make_instance(const CampaignConfig& cfg, std::size_t index);

// CSV rows (no header) for one instance.
std::string run_instance(const CampaignConfig& cfg, const CandidateFamily& family,
                         std::size_t index);

// Runs every instance with up to `jobs` worker threads and writes the header
// plus all rows ordered by instance index, so the output does not depend on
// `jobs`. Progress goes to `log` when given.
void run_campaign(const CampaignConfig& cfg, std::ostream& out, int jobs = 1,
                  std::ostream* log = nullptr);
// Throws IoError when the file cannot be written.
void run_campaign(const CampaignConfig& cfg, const std::string& out_path, int jobs = 1,
                  std::ostream* log = nullptr);

// One parsed row of a selection results file. Empty numeric fields are
// unset.
struct ResultRow {
  std::size_t instance_id = 0;
  std::optional<double> theta;
  double ntv = 0.0;
  std::string procedure;
  std::string risk_name;
  std::string nuisance_mode;
  std::optional<double> kendall;
  std::optional<double> relative_kendall;
  std::optional<double> excess_tau_risk;
  std::string selected_candidate;
};

// Throws DataError on a malformed file.
std::vector<ResultRow> read_results_csv(std::istream& in);

}  // namespace causalsel
