#include "dqa/domain.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dqa {

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::Positive: return "Positive";
    case Tag::Negative: return "Negative";
    case Tag::Unknown: return "Unknown";
  }
  return "?";
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::CountsExceedPopulation: return "CountsExceedPopulation";
    case ErrorCode::ZeroPopulation: return "ZeroPopulation";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NoRecognizedUsers: return "NoRecognizedUsers";
    case ErrorCode::ZeroGroundTruthPositives: return "ZeroGroundTruthPositives";
    case ErrorCode::NoUsableCampaigns: return "NoUsableCampaigns";
    case ErrorCode::DegenerateErr: return "DegenerateErr";
    case ErrorCode::TooFewCampaigns: return "TooFewCampaigns";
    case ErrorCode::UnequalPopulations: return "UnequalPopulations";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InsufficientDof: return "InsufficientDof";
    case ErrorCode::ZeroReach: return "ZeroReach";
    case ErrorCode::CountExceedsReach: return "CountExceedsReach";
    case ErrorCode::ZeroFreePrecision: return "ZeroFreePrecision";
  }
  return "?";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeCount:
    case ErrorCode::CountsExceedPopulation:
    case ErrorCode::ZeroPopulation:
    case ErrorCode::InvalidSplit:
    case ErrorCode::InvalidProfile:
    case ErrorCode::EmptySample:
    case ErrorCode::UnknownTag:
    case ErrorCode::InvalidParameters:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), what)), code_(code) {}

void require_valid(const PredictiveValues& values, double tol) {
  if (!values.is_valid(tol)) {
    throw Error(ErrorCode::InvalidProfile,
                "predictive values must lie in [0,1] with every row summing to 1");
  }
}

PredictiveValues high_quality_profile() {
  PredictiveValues::Matrix m;
  m << 0.8, 0.15, 0.05,
       0.2, 0.7, 0.1,
       0.4, 0.5, 0.1;
  return PredictiveValues(m);
}

PredictiveValues low_quality_profile() {
  PredictiveValues::Matrix m;
  m << 0.4, 0.5, 0.1,
       0.3, 0.6, 0.1,
       0.5, 0.4, 0.1;
  return PredictiveValues(m);
}

CampaignAggregate CampaignAggregate::scaled(double factor) const {
  CampaignAggregate out = *this;
  out.source *= factor;
  out.truth *= factor;
  out.population *= factor;
  return out;
}

RawCampaign CampaignAggregate::to_raw() const {
  auto as_int = [](double v) { return static_cast<std::int64_t>(std::llround(v)); };
  return RawCampaign{campaign_id, as_int(population), as_int(source(0)), as_int(source(1)),
                     as_int(truth(0)), as_int(truth(1))};
}

CampaignAggregate validate_aggregate(const RawCampaign& raw) {
  if (raw.population < 0 || raw.d_plus < 0 || raw.d_minus < 0 || raw.g_plus < 0 ||
      raw.g_minus < 0) {
    throw Error(ErrorCode::NegativeCount,
                fmt::format("campaign '{}' has a negative count", raw.campaign_id));
  }
  if (raw.population == 0) {
    throw Error(ErrorCode::ZeroPopulation,
                fmt::format("campaign '{}' has zero population", raw.campaign_id));
  }
  if (raw.d_plus + raw.d_minus > raw.population) {
    throw Error(ErrorCode::CountsExceedPopulation,
                fmt::format("campaign '{}': d+ + d- = {} exceeds population {}", raw.campaign_id,
                            raw.d_plus + raw.d_minus, raw.population));
  }
  if (raw.g_plus + raw.g_minus > raw.population) {
    throw Error(ErrorCode::CountsExceedPopulation,
                fmt::format("campaign '{}': g+ + g- = {} exceeds population {}", raw.campaign_id,
                            raw.g_plus + raw.g_minus, raw.population));
  }

  CampaignAggregate agg;
  agg.campaign_id = raw.campaign_id;
  agg.population = static_cast<double>(raw.population);
  agg.source << static_cast<double>(raw.d_plus), static_cast<double>(raw.d_minus),
      static_cast<double>(raw.population - raw.d_plus - raw.d_minus);
  agg.truth << static_cast<double>(raw.g_plus), static_cast<double>(raw.g_minus),
      static_cast<double>(raw.population - raw.g_plus - raw.g_minus);
  return agg;
}

CampaignAggregate validate_aggregate(const CampaignAggregate& agg) {
  if (!agg.source.allFinite() || !agg.truth.allFinite() || !std::isfinite(agg.population) ||
      (agg.source.array() < 0.0).any() || (agg.truth.array() < 0.0).any() ||
      agg.population < 0.0) {
    throw Error(ErrorCode::NegativeCount,
                fmt::format("campaign '{}' has a negative count", agg.campaign_id));
  }
  if (agg.population == 0.0) {
    throw Error(ErrorCode::ZeroPopulation,
                fmt::format("campaign '{}' has zero population", agg.campaign_id));
  }
  const double tol = 1e-9 * agg.population;
  if (std::abs(agg.source.sum() - agg.population) > tol ||
      std::abs(agg.truth.sum() - agg.population) > tol) {
    throw Error(ErrorCode::CountsExceedPopulation,
                fmt::format("campaign '{}': tag counts do not sum to population {}",
                            agg.campaign_id, agg.population));
  }
  return agg;
}

}  // namespace dqa
