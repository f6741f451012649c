#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dqa {

/// Precision from a dedicated performance campaign: of the n_reached users
/// the source tagged, n_target_reported were confirmed by the ground truth.
double brute_force_precision(std::int64_t n_target_reported, std::int64_t n_reached);

struct SampleSizePlan {
  int categories = 2;
  double margin = 0.05;
  double significance = 0.05;
  double power = 0.90;
  std::int64_t required_impressions = 1;
};

// ((z_{1-significance/2} + z_{power}) / margin)^2, the numerator constant of
// the impression bound.
double impressions_constant(double margin = 0.05, double significance = 0.05,
                            double power = 0.90);

/// Impressions needed per source to tell one category's accuracy apart from
/// the 1/c baseline: ceil(constant * (1/c) * (1 - 1/c)).
std::int64_t required_impressions(int categories, double margin = 0.05,
                                  double significance = 0.05, double power = 0.90);

SampleSizePlan plan_sample_size(int categories, double margin = 0.05, double significance = 0.05,
                                double power = 0.90);

// Ad-serving cost of evaluating `sources` sources one by one at default
// test parameters.
double total_evaluation_cost(std::int64_t sources, int categories, double cpi);

/// Largest extra per-impression data cost that still beats untargeted
/// delivery, cpi * (alpha1_data / alpha1_free - 1). Negative means the
/// source never pays for itself.
double max_data_cpi(double cpi, double alpha1_data, double alpha1_free);

// Precision p(target | source category) per source category.
using PrecisionTable = std::map<std::string, double>;

enum class Combiner { Max, Min, Mean, Median };

Combiner parse_combiner(const std::string& name);

/// Expected number of users in the target category. A user with one tag
/// contributes that tag's precision; a user with several contributes the
/// combined precision; an untagged user contributes nothing.
double forecast_category(const std::vector<std::vector<std::string>>& tagged_users,
                         const PrecisionTable& table, Combiner combiner);

}  // namespace dqa
