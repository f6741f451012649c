#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqa/domain.hpp"
#include "dqa/econ.hpp"
#include "dqa/experiment.hpp"
#include "dqa/rank.hpp"

namespace dqa {

/// Parse or validation failure tied to a position in an input file.
class InputError : public Error {
 public:
  InputError(ErrorCode code, int line, std::string field, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

using SourceCampaigns = std::map<std::string, std::vector<CampaignAggregate>>;

// Column order of campaign files.
inline constexpr const char* kCampaignHeader =
    "campaign_id,source_id,population,d_plus,d_minus,g_plus,g_minus";

/// Reads a campaign file: a header row, then one campaign/source pair per
/// line. Unknown counts are completed from the population. Campaigns shared
/// by several sources must report the same population and ground truth.
SourceCampaigns parse_campaigns(std::istream& in);
SourceCampaigns parse_campaign_file(const std::filesystem::path& path);

void write_campaigns(std::ostream& out, const SourceCampaigns& per_source);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// "category,precision" rows after a header.
PrecisionTable parse_precision_table(std::istream& in);

// "user_id,tags" rows after a header; tags are ';'-separated, may be empty.
std::vector<std::vector<std::string>> parse_tagged_users(std::istream& in);

nlohmann::json to_json(const PredictiveValues& values);
PredictiveValues predictive_values_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QualityReport& report);
QualityReport quality_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RankEntry& entry);
RankEntry rank_entry_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SampleSizePlan& plan);
SampleSizePlan sample_size_plan_from_json(const nlohmann::json& j);

// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
void write_grid_csv(std::ostream& out, const std::vector<GridPoint>& grid);

}  // namespace dqa
