#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dqa/domain.hpp"
#include "dqa/simulate.hpp"

namespace dqa {

struct NamedProfile {
  std::string name;
  PredictiveValues values;
};

/// A reproducible synthetic study: which profiles, how campaigns are split,
/// and the grids swept for the campaign-count and noise experiments.
struct Scenario {
  std::uint64_t seed = 0;
  int trials = 100;
  double xi = 1.0;
  SplitSpec split;
  std::vector<int> campaign_counts = {3, 4, 5, 6, 7, 8, 9, 10, 12};
  std::vector<double> zeta_grid = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
  int noise_campaigns = 6;
  std::vector<NamedProfile> profiles;
};

// The two profiles and the 20/20/20 + 40 split over 100 trials.
Scenario default_scenario(std::uint64_t seed);

/// `count` sampled campaigns. With zeta > 0 every campaign draws its truth
/// from its own perturbed copy of `profile`.
std::vector<CampaignAggregate> simulate_campaigns(const PredictiveValues& profile,
                                                  const SplitSpec& split, int count, double zeta,
                                                  std::uint64_t seed);

struct TrialResult {
  std::string profile;
  int num_campaigns = 0;
  double zeta = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string failure;
  PredictiveValues estimate;
  double objective = 0.0;
  double abs_err_alpha1 = 0.0;
};

std::uint64_t trial_seed(std::uint64_t base, std::size_t profile_index, int num_campaigns,
                         double zeta, int trial);

TrialResult run_trial(const Scenario& scenario, std::size_t profile_index, int num_campaigns,
                      double zeta, int trial);

// Every (profile, campaign count, zeta, trial) combination, in that order.
std::vector<TrialResult> run_scenario(const Scenario& scenario);

struct GridPoint {
  std::string profile;
  int num_campaigns = 0;
  double zeta = 0.0;
  double mean_abs_err_alpha1 = 0.0;
  int trials = 0;
  int failures = 0;
};

// Mean |alpha_1 estimate - alpha_1| against the campaign count, no noise.
std::vector<GridPoint> campaign_count_grid(const Scenario& scenario);

// Mean |alpha_1 estimate - alpha_1| against zeta at noise_campaigns campaigns.
std::vector<GridPoint> noise_grid(const Scenario& scenario);

struct HoldoutCorrelation {
  double inferred = 0.0;
  double rank = 0.0;
};

/// Fits both estimators on the first half of `num_campaigns` simulated
/// campaigns (sizes uniform in [min_population, max_population]) and
/// correlates their positive-population estimates with the truth on the
/// second half.
HoldoutCorrelation holdout_correlation(const PredictiveValues& profile, int num_campaigns,
                                       int min_population, int max_population, double xi,
                                       std::uint64_t seed);

}  // namespace dqa
