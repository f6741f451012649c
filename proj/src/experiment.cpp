#include "dqa/experiment.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "dqa/infer.hpp"
#include "dqa/rank.hpp"
#include "dqa/rng.hpp"
#include "dqa/stats.hpp"

namespace dqa {

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.seed = seed;
  s.profiles = {{"HighQuality", high_quality_profile()}, {"LowQuality", low_quality_profile()}};
  return s;
}

std::vector<CampaignAggregate> simulate_campaigns(const PredictiveValues& profile,
                                                  const SplitSpec& split, int count, double zeta,
                                                  std::uint64_t seed) {
  std::vector<CampaignAggregate> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const PredictiveValues campaign_profile =
        zeta > 0.0 ? perturb_profile(profile, zeta, derive_seed(seed, idx, 1)) : profile;
    const AudienceSample sample = gen_campaign(campaign_profile, split, derive_seed(seed, idx, 0));
    out.push_back(aggregate(sample, fmt::format("c{}", i)));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t profile_index, int num_campaigns,
                         double zeta, int trial) {
  std::uint64_t s = derive_seed(base, profile_index, static_cast<std::uint64_t>(num_campaigns));
  return derive_seed(s, std::bit_cast<std::uint64_t>(zeta), static_cast<std::uint64_t>(trial));
}

TrialResult run_trial(const Scenario& scenario, std::size_t profile_index, int num_campaigns,
                      double zeta, int trial) {
  const NamedProfile& profile = scenario.profiles.at(profile_index);
  TrialResult r;
  r.profile = profile.name;
  r.num_campaigns = num_campaigns;
  r.zeta = zeta;
  r.trial = trial;
  r.seed = trial_seed(scenario.seed, profile_index, num_campaigns, zeta, trial);

  QpProblem problem;
  problem.campaigns = simulate_campaigns(profile.values, scenario.split, num_campaigns, zeta, r.seed);
  problem.xi = scenario.xi;
  try {
    const QpSolution sol = infer_predictive_values(problem);
    r.ok = true;
    r.estimate = sol.values;
    r.objective = sol.objective;
    r.abs_err_alpha1 = std::abs(sol.values.precision() - profile.values.precision());
  } catch (const Error& e) {
    r.failure = e.what();
  }
  return r;
}

std::vector<TrialResult> run_scenario(const Scenario& scenario) {
  std::vector<TrialResult> out;
  for (std::size_t p = 0; p < scenario.profiles.size(); ++p)
    for (int k : scenario.campaign_counts)
      for (double zeta : scenario.zeta_grid)
        for (int t = 0; t < scenario.trials; ++t) out.push_back(run_trial(scenario, p, k, zeta, t));
  return out;
}

namespace {

GridPoint grid_point(const Scenario& scenario, std::size_t p, int k, double zeta) {
  GridPoint g;
  g.profile = scenario.profiles[p].name;
  g.num_campaigns = k;
  g.zeta = zeta;
  double total = 0.0;
  for (int t = 0; t < scenario.trials; ++t) {
    const TrialResult r = run_trial(scenario, p, k, zeta, t);
    if (!r.ok) {
      ++g.failures;
      continue;
    }
    total += r.abs_err_alpha1;
    ++g.trials;
  }
  g.mean_abs_err_alpha1 = g.trials > 0 ? total / g.trials : std::nan("");
  return g;
}

}  // namespace

std::vector<GridPoint> campaign_count_grid(const Scenario& scenario) {
  std::vector<GridPoint> out;
  for (std::size_t p = 0; p < scenario.profiles.size(); ++p)
    for (int k : scenario.campaign_counts) out.push_back(grid_point(scenario, p, k, 0.0));
  return out;
}

std::vector<GridPoint> noise_grid(const Scenario& scenario) {
  std::vector<GridPoint> out;
  for (std::size_t p = 0; p < scenario.profiles.size(); ++p)
    for (double zeta : scenario.zeta_grid)
      out.push_back(grid_point(scenario, p, scenario.noise_campaigns, zeta));
  return out;
}

HoldoutCorrelation holdout_correlation(const PredictiveValues& profile, int num_campaigns,
                                       int min_population, int max_population, double xi,
                                       std::uint64_t seed) {
  if (num_campaigns < 8 || min_population < 5 || max_population < min_population) {
    throw Error(ErrorCode::InvalidParameters, "holdout needs >= 8 campaigns and valid sizes");
  }
  CounterRng sizes(derive_seed(seed, 0xC0FFEE));
  std::vector<CampaignAggregate> campaigns;
  for (int i = 0; i < num_campaigns; ++i) {
    const auto span = static_cast<std::uint64_t>(max_population - min_population + 1);
    const int m = min_population + static_cast<int>(sizes.below(span));
    const SplitSpec split{m / 5, m - 3 * (m / 5)};
    const AudienceSample sample =
        gen_campaign(profile, split, derive_seed(seed, static_cast<std::uint64_t>(i)));
    campaigns.push_back(aggregate(sample, fmt::format("c{}", i)));
  }
  const auto half = campaigns.begin() + num_campaigns / 2;
  const std::vector<CampaignAggregate> train(campaigns.begin(), half);
  const std::vector<CampaignAggregate> test(half, campaigns.end());

  const QpSolution fit = infer_predictive_values(QpProblem{train, xi, true});
  const RankEntry scored = score_source("source", train);
  double tau = 0.0;
  for (const auto& c : train) tau += (c.g_plus() + c.g_minus()) / c.population;
  tau /= static_cast<double>(train.size());

  std::vector<double> truth, inferred, ranked;
  for (const auto& c : test) {
    truth.push_back(c.g_plus());
    inferred.push_back(estimate_positives_inferred(fit.values, c.source));
    ranked.push_back(estimate_positives_rank(c.population, tau, positive_fraction(c), scored.mean_err));
  }
  return {pearson_correlation(inferred, truth), pearson_correlation(ranked, truth)};
}

}  // namespace dqa
