#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqa/domain.hpp"

namespace dqa {

/// How predicted tags are handed out in a synthetic campaign: a fixed
/// number of users per tag, then a remainder assigned uniformly at random.
struct SplitSpec {
  int fixed_per_tag = 20;
  int uniform_remainder = 40;

  int total() const { return 3 * fixed_per_tag + uniform_remainder; }
};

struct UserTags {
  Tag predicted = Tag::Unknown;
  Tag truth = Tag::Unknown;

  bool operator==(const UserTags&) const = default;
};

/// Per-user (predicted, truth) pairs. Only the simulator ever holds these.
struct AudienceSample {
  std::vector<UserTags> users;
  std::uint64_t seed = 0;

  bool operator==(const AudienceSample&) const = default;
};

AudienceSample gen_campaign(const PredictiveValues& profile, const SplitSpec& split,
                            std::uint64_t seed);

// Inverse-CDF draw from the profile row of `predicted`; `u` is uniform on [0, 1).
Tag sample_truth(const PredictiveValues& profile, Tag predicted, double u);

/// Adds independent uniform noise in [-zeta, zeta] to every entry, clamps to
/// [0, 1] and renormalizes each row.
PredictiveValues perturb_profile(const PredictiveValues& profile, double zeta, std::uint64_t seed);

CampaignAggregate aggregate(const AudienceSample& sample, const std::string& campaign_id);

/// Noiseless aggregate: G = D * P, with D = `d_counts`.
CampaignAggregate expected_aggregate(const PredictiveValues& profile,
                                     const Eigen::Vector3d& d_counts,
                                     const std::string& campaign_id);

enum class OracleMetric { Accuracy, TruePositiveRate };

// Indicator averages over the whole sample; TruePositiveRate counts users
// with truth == predicted == Positive and divides by the sample size.
double oracle_metric(const AudienceSample& sample, OracleMetric metric);

}  // namespace dqa
