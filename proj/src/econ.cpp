#include "dqa/econ.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dqa/domain.hpp"
#include "dqa/stats.hpp"

namespace dqa {

double brute_force_precision(std::int64_t n_target_reported, std::int64_t n_reached) {
  if (n_reached <= 0) throw Error(ErrorCode::ZeroReach, "no users were reached");
  if (n_target_reported < 0) throw Error(ErrorCode::NegativeCount, "negative confirmed count");
  if (n_target_reported > n_reached) {
    throw Error(ErrorCode::CountExceedsReach,
                fmt::format("{} confirmed users exceed {} reached", n_target_reported, n_reached));
  }
  return static_cast<double>(n_target_reported) / static_cast<double>(n_reached);
}

namespace {
void check_test_parameters(double margin, double significance, double power) {
  const auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(margin) || !open_unit(significance) || !open_unit(power)) {
    throw Error(ErrorCode::InvalidParameters,
                fmt::format("margin {}, significance {} and power {} must lie in (0, 1)", margin,
                            significance, power));
  }
}
}  // namespace

double impressions_constant(double margin, double significance, double power) {
  check_test_parameters(margin, significance, power);
  const double z = normal_quantile(1.0 - significance / 2.0) + normal_quantile(power);
  return (z / margin) * (z / margin);
}

std::int64_t required_impressions(int categories, double margin, double significance,
                                  double power) {
  if (categories < 2) {
    throw Error(ErrorCode::InvalidParameters,
                fmt::format("need at least 2 categories, got {}", categories));
  }
  const double c = static_cast<double>(categories);
  const double variance = (1.0 / c) * (1.0 - 1.0 / c);
  const double n = impressions_constant(margin, significance, power) * variance;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

SampleSizePlan plan_sample_size(int categories, double margin, double significance, double power) {
  return SampleSizePlan{categories, margin, significance, power,
                        required_impressions(categories, margin, significance, power)};
}

double total_evaluation_cost(std::int64_t sources, int categories, double cpi) {
  if (sources < 1 || !(cpi >= 0.0)) {
    throw Error(ErrorCode::InvalidParameters,
                fmt::format("need sources >= 1 and cpi >= 0 (got {}, {})", sources, cpi));
  }
  return static_cast<double>(sources) * static_cast<double>(required_impressions(categories)) *
         cpi;
}

double max_data_cpi(double cpi, double alpha1_data, double alpha1_free) {
  if (alpha1_free <= 0.0) {
    throw Error(ErrorCode::ZeroFreePrecision, "untargeted precision must be positive");
  }
  if (!(cpi >= 0.0) || alpha1_data < 0.0 || alpha1_data > 1.0 || alpha1_free > 1.0) {
    throw Error(ErrorCode::InvalidParameters, "cpi must be >= 0 and precisions in [0, 1]");
  }
  return cpi * (alpha1_data / alpha1_free - 1.0);
}

Combiner parse_combiner(const std::string& name) {
  if (name == "max") return Combiner::Max;
  if (name == "min") return Combiner::Min;
  if (name == "mean") return Combiner::Mean;
  if (name == "median") return Combiner::Median;
  throw Error(ErrorCode::InvalidParameters, fmt::format("unknown combiner '{}'", name));
}

double forecast_category(const std::vector<std::vector<std::string>>& tagged_users,
                         const PrecisionTable& table, Combiner combiner) {
  double expected = 0.0;
  std::vector<double> ps;
  for (const auto& tags : tagged_users) {
    if (tags.empty()) continue;
    ps.clear();
    for (const auto& tag : tags) {
      const auto it = table.find(tag);
      if (it == table.end()) {
        throw Error(ErrorCode::UnknownTag, fmt::format("no precision for category '{}'", tag));
      }
      ps.push_back(it->second);
    }
    switch (combiner) {
      case Combiner::Max: expected += *std::max_element(ps.begin(), ps.end()); break;
      case Combiner::Min: expected += *std::min_element(ps.begin(), ps.end()); break;
      case Combiner::Mean: expected += mean(ps); break;
      case Combiner::Median: {
        std::sort(ps.begin(), ps.end());
        const std::size_t n = ps.size();
        expected += n % 2 == 1 ? ps[n / 2] : (ps[n / 2 - 1] + ps[n / 2]) / 2.0;
        break;
      }
    }
  }
  return expected;
}

}  // namespace dqa
