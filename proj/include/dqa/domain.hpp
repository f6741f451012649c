#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace dqa {

// A sound data source assigns exactly one of these to every user it sees.
enum class Tag : std::uint8_t { Positive = 0, Negative = 1, Unknown = 2 };

inline constexpr int kNumTags = 3;

std::string_view to_string(Tag tag);

enum class ErrorCode {
  // input errors
  NegativeCount,
  CountsExceedPopulation,
  ZeroPopulation,
  InvalidSplit,
  InvalidProfile,
  EmptySample,
  UnknownTag,
  InvalidParameters,
  ParseError,
  ValidationError,
  // numeric failures
  NoRecognizedUsers,
  ZeroGroundTruthPositives,
  NoUsableCampaigns,
  DegenerateErr,
  TooFewCampaigns,
  UnequalPopulations,
  NonConvergence,
  Infeasible,
  InsufficientDof,
  ZeroReach,
  CountExceedsReach,
  ZeroFreePrecision,
};

std::string_view to_string(ErrorCode code);

// True for the codes that signal bad input rather than a numeric failure.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// The nine conditional probabilities P(truth | source tag).
///
/// Row r is the source tag (Positive: alpha, Negative: beta, Unknown: gamma),
/// column j is the ground-truth tag. Every row lies on the probability
/// simplex. Column 0 of row 0 is the source's precision.
template <typename Scalar>
struct BasicPredictiveValues {
  using Matrix = Eigen::Matrix<Scalar, 3, 3>;

  Matrix p = Matrix::Constant(Scalar(1) / Scalar(3));

  BasicPredictiveValues() = default;
  explicit BasicPredictiveValues(const Matrix& m) : p(m) {}

  static BasicPredictiveValues identity() { return BasicPredictiveValues(Matrix::Identity()); }
  static BasicPredictiveValues uniform() { return BasicPredictiveValues(); }

  auto alpha() const { return p.row(0); }
  auto beta() const { return p.row(1); }
  auto gamma() const { return p.row(2); }

  Scalar precision() const { return p(0, 0); }
  Scalar negative_predictive_value() const { return p(1, 1); }

  Scalar operator()(Tag source, Tag truth) const {
    return p(static_cast<int>(source), static_cast<int>(truth));
  }

  bool is_valid(Scalar tol = Scalar(1e-9)) const {
    if (!p.allFinite()) return false;
    if ((p.array() < -tol).any() || (p.array() > Scalar(1) + tol).any()) return false;
    return ((p.rowwise().sum().array() - Scalar(1)).abs() <= tol).all();
  }

  // |alpha_1 - beta_2| <= xi
  bool is_unbiased(Scalar xi, Scalar tol = Scalar(1e-9)) const {
    using std::abs;
    return abs(p(0, 0) - p(1, 1)) <= xi + tol;
  }
};

using PredictiveValues = BasicPredictiveValues<double>;

// Throws InvalidProfile unless every row is a probability distribution.
void require_valid(const PredictiveValues& values, double tol = 1e-9);

/// The profiles used by the synthetic campaign study.
PredictiveValues high_quality_profile();
PredictiveValues low_quality_profile();

/// Unvalidated campaign record as it arrives from a file or caller.
/// Unknown counts are never supplied; they are completed from the population.
struct RawCampaign {
  std::string campaign_id;
  std::int64_t population = 0;
  std::int64_t d_plus = 0;
  std::int64_t d_minus = 0;
  std::int64_t g_plus = 0;
  std::int64_t g_minus = 0;
};

/// Per-campaign aggregate counts from a source and from the ground truth.
///
/// `source` is (D+, D-, Dunknown), `truth` is (G+, G-, Gunknown). Both sum to
/// `population`. Counts are integral except for aggregates built by
/// `expected_aggregate`, which hold exact expectations.
struct CampaignAggregate {
  std::string campaign_id;
  Eigen::Vector3d source = Eigen::Vector3d::Zero();
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();
  double population = 0.0;

  double d_plus() const { return source(0); }
  double d_minus() const { return source(1); }
  double d_unknown() const { return source(2); }
  double g_plus() const { return truth(0); }
  double g_minus() const { return truth(1); }
  double g_unknown() const { return truth(2); }

  Eigen::Vector3d source_fractions() const { return source / population; }
  Eigen::Vector3d truth_fractions() const { return truth / population; }

  // Multiplies every count, population included, by `factor`.
  CampaignAggregate scaled(double factor) const;

  RawCampaign to_raw() const;

  bool operator==(const CampaignAggregate&) const = default;
};

CampaignAggregate validate_aggregate(const RawCampaign& raw);

// Re-validates an existing aggregate; the result is identical to the input.
CampaignAggregate validate_aggregate(const CampaignAggregate& agg);

/// Per-source assessment.
struct QualityReport {
  std::string source_id;
  double mean_relative_err = 0.0;
  std::optional<PredictiveValues> inferred;
  // Same layout as the inferred matrix; empty when fewer than 4 campaigns.
  std::optional<Eigen::Matrix3d> ci_half_widths;
  double ci_level = 0.95;
  int n_campaigns = 0;
  int rank = 0;
  int skipped_campaigns = 0;
  bool unique = true;
};

}  // namespace dqa
