#include "dqa/simulate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dqa/rng.hpp"

namespace dqa {

namespace {

constexpr Tag kTags[kNumTags] = {Tag::Positive, Tag::Negative, Tag::Unknown};

void require_nonempty(const AudienceSample& sample) {
  if (sample.users.empty()) throw Error(ErrorCode::EmptySample, "audience sample is empty");
}

}  // namespace

Tag sample_truth(const PredictiveValues& profile, Tag predicted, double u) {
  const auto row = profile.p.row(static_cast<int>(predicted));
  double cdf = 0.0;
  for (int j = 0; j < kNumTags - 1; ++j) {
    cdf += row(j);
    if (u < cdf) return kTags[j];
  }
  return Tag::Unknown;
}

AudienceSample gen_campaign(const PredictiveValues& profile, const SplitSpec& split,
                            std::uint64_t seed) {
  if (split.fixed_per_tag < 0 || split.uniform_remainder < 0) {
    throw Error(ErrorCode::InvalidSplit,
                fmt::format("split counts must be nonnegative (fixed {}, uniform {})",
                            split.fixed_per_tag, split.uniform_remainder));
  }
  require_valid(profile);

  AudienceSample sample;
  sample.seed = seed;
  sample.users.reserve(static_cast<std::size_t>(split.total()));

  CounterRng rng(seed);
  for (Tag tag : kTags) {
    for (int i = 0; i < split.fixed_per_tag; ++i) sample.users.push_back({tag, tag});
  }
  for (int i = 0; i < split.uniform_remainder; ++i) {
    const Tag tag = kTags[rng.below(kNumTags)];
    sample.users.push_back({tag, tag});
  }
  for (auto& user : sample.users) user.truth = sample_truth(profile, user.predicted, rng.uniform());
  return sample;
}

PredictiveValues perturb_profile(const PredictiveValues& profile, double zeta,
                                 std::uint64_t seed) {
  require_valid(profile);
  if (!(zeta >= 0.0 && zeta <= 0.35)) {
    throw Error(ErrorCode::InvalidParameters, fmt::format("zeta {} outside [0, 0.35]", zeta));
  }
  if (zeta == 0.0) return profile;

  CounterRng rng(seed);
  PredictiveValues::Matrix m = profile.p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = std::clamp(m(r, c) + rng.uniform(-zeta, zeta), 0.0, 1.0);
  }
  for (int r = 0; r < 3; ++r) {
    const double total = m.row(r).sum();
    // All three entries clamped to zero; fall back to the unperturbed row.
    if (total <= 0.0) {
      m.row(r) = profile.p.row(r);
    } else {
      m.row(r) /= total;
    }
  }
  return PredictiveValues(m);
}

CampaignAggregate aggregate(const AudienceSample& sample, const std::string& campaign_id) {
  require_nonempty(sample);
  CampaignAggregate agg;
  agg.campaign_id = campaign_id;
  for (const auto& user : sample.users) {
    agg.source(static_cast<int>(user.predicted)) += 1.0;
    agg.truth(static_cast<int>(user.truth)) += 1.0;
  }
  agg.population = static_cast<double>(sample.users.size());
  return agg;
}

CampaignAggregate expected_aggregate(const PredictiveValues& profile,
                                     const Eigen::Vector3d& d_counts,
                                     const std::string& campaign_id) {
  require_valid(profile);
  CampaignAggregate agg;
  agg.campaign_id = campaign_id;
  agg.source = d_counts;
  agg.truth = profile.p.transpose() * d_counts;
  agg.population = d_counts.sum();
  return agg;
}

double oracle_metric(const AudienceSample& sample, OracleMetric metric) {
  require_nonempty(sample);
  const auto hit = [metric](const UserTags& u) {
    if (metric == OracleMetric::Accuracy) return u.truth == u.predicted;
    return u.truth == Tag::Positive && u.predicted == Tag::Positive;
  };
  const auto hits = std::count_if(sample.users.begin(), sample.users.end(), hit);
  return static_cast<double>(hits) / static_cast<double>(sample.users.size());
}

}  // namespace dqa
