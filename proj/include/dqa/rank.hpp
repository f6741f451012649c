#pragma once

#include <map>
#include <string>
#include <vector>

#include "dqa/domain.hpp"

namespace dqa {

/// Fraction of the users a source recognizes that it tags Positive,
/// d+ / (d+ + d-). Throws NoRecognizedUsers when d+ + d- = 0.
double positive_fraction(const CampaignAggregate& agg);

/// Ground-truth counterpart of positive_fraction, g+ / (g+ + g-).
double truth_positive_fraction(const CampaignAggregate& agg);

/// |R - R_hat| / R, the error of extrapolating the source's positive share to
/// the ground-truth population.
double relative_err(const CampaignAggregate& agg);

namespace detail {
// Unscaled closeness |R - R_hat|; kept as a comparison baseline only.
double absolute_err(const CampaignAggregate& agg);
}  // namespace detail

struct RankEntry {
  std::string source_id;
  std::vector<double> per_campaign_err;
  double mean_err = 0.0;
  // Campaigns dropped because relative_err was undefined for them.
  int skipped_campaigns = 0;
};

/// Scores every source by its mean relative error over its campaigns and
/// returns the sources best first. Ties go to the lexicographically smaller
/// source id.
std::vector<RankEntry> rank_sources(
    const std::map<std::string, std::vector<CampaignAggregate>>& per_source);

RankEntry score_source(const std::string& source_id,
                       const std::vector<CampaignAggregate>& campaigns);

/// Positive-population estimate from the ranking surrogate,
/// population * tau_hat * r_hat / (1 - mean_err).
double estimate_positives_rank(double population, double tau_hat, double r_hat,
                               double mean_err);

}  // namespace dqa
