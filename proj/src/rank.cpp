#include "dqa/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace dqa {

double positive_fraction(const CampaignAggregate& agg) {
  const double recognized = agg.d_plus() + agg.d_minus();
  if (recognized <= 0.0) {
    throw Error(ErrorCode::NoRecognizedUsers,
                fmt::format("source recognizes nobody in campaign '{}'", agg.campaign_id));
  }
  return agg.d_plus() / recognized;
}

double truth_positive_fraction(const CampaignAggregate& agg) {
  const double recognized = agg.g_plus() + agg.g_minus();
  if (agg.g_plus() <= 0.0 || recognized <= 0.0) {
    throw Error(ErrorCode::ZeroGroundTruthPositives,
                fmt::format("ground truth has no positives in campaign '{}'", agg.campaign_id));
  }
  return agg.g_plus() / recognized;
}

double relative_err(const CampaignAggregate& agg) {
  const double r = truth_positive_fraction(agg);
  const double r_hat = positive_fraction(agg);
  return std::abs(r - r_hat) / r;
}

namespace detail {
double absolute_err(const CampaignAggregate& agg) {
  return std::abs(truth_positive_fraction(agg) - positive_fraction(agg));
}
}  // namespace detail

RankEntry score_source(const std::string& source_id,
                       const std::vector<CampaignAggregate>& campaigns) {
  RankEntry entry;
  entry.source_id = source_id;
  for (const auto& agg : campaigns) {
    try {
      entry.per_campaign_err.push_back(relative_err(agg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRecognizedUsers &&
          e.code() != ErrorCode::ZeroGroundTruthPositives) {
        throw;
      }
      ++entry.skipped_campaigns;
    }
  }
  if (entry.per_campaign_err.empty()) {
    throw Error(ErrorCode::NoUsableCampaigns,
                fmt::format("source '{}' has no campaign with a defined relative error",
                            source_id));
  }
  entry.mean_err = std::accumulate(entry.per_campaign_err.begin(), entry.per_campaign_err.end(),
                                   0.0) /
                   static_cast<double>(entry.per_campaign_err.size());
  return entry;
}

std::vector<RankEntry> rank_sources(
    const std::map<std::string, std::vector<CampaignAggregate>>& per_source) {
  std::vector<RankEntry> entries;
  entries.reserve(per_source.size());
  for (const auto& [source_id, campaigns] : per_source) {
    entries.push_back(score_source(source_id, campaigns));
  }
  std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.mean_err != b.mean_err) return a.mean_err < b.mean_err;
    return a.source_id < b.source_id;
  });
  return entries;
}

double estimate_positives_rank(double population, double tau_hat, double r_hat,
                               double mean_err) {
  if (!(mean_err < 1.0)) {
    throw Error(ErrorCode::DegenerateErr,
                fmt::format("mean relative error {} >= 1 cannot be extrapolated", mean_err));
  }
  if (tau_hat < 0.0 || tau_hat > 1.0 || r_hat < 0.0 || r_hat > 1.0 || population < 0.0) {
    throw Error(ErrorCode::InvalidParameters, "tau_hat and r_hat must lie in [0, 1]");
  }
  return population * tau_hat * r_hat / (1.0 - mean_err);
}

}  // namespace dqa
