#pragma once

#include <map>
#include <string>
#include <vector>

#include "dqa/domain.hpp"
#include "dqa/simplex_qp.hpp"

namespace dqa {

inline constexpr double kDefaultXi = 0.05;

struct QpProblem {
  std::vector<CampaignAggregate> campaigns;
  // Allowed |alpha_1 - beta_2|; values >= 1 disable the unbiasedness band.
  double xi = kDefaultXi;
  // Divide each campaign's counts by its population before fitting.
  bool normalize = true;
};

struct QpSolution {
  PredictiveValues values;
  // Sum of squared residuals at the optimum, in the units the fit used.
  double objective = 0.0;
  // Per campaign: D P - G over (+, -, unknown).
  std::vector<Eigen::Vector3d> residuals;
  int iterations = 0;
  bool converged = false;
  // False when the campaigns do not pin down a unique minimizer.
  bool unique = true;
  double kkt_residual = 0.0;
};

/// Fits the nine predictive values to the campaigns by least squares over
/// row-stochastic matrices with |alpha_1 - beta_2| <= xi.
///
/// Errors: TooFewCampaigns (fewer than 3), UnequalPopulations (normalize off
/// and campaign sizes differ), NonConvergence.
QpSolution infer_predictive_values(const QpProblem& problem,
                                   const SimplexQpOptions& options = {});

// D+ alpha_1 + D- beta_1 + Dunknown gamma_1
double estimate_positives_inferred(const PredictiveValues& values, const Eigen::Vector3d& d_counts);

/// Half-widths s_i * t(1 - delta/2, 2k - 6) for all nine values, laid out
/// like the predictive-value matrix.
///
/// The fit is treated as a regression with six free regressors (the third
/// column of each row is implied by the row sum) and two independent
/// observations per campaign, weighted as in the objective. Bounds and the
/// unbiasedness band are ignored when computing s_i.
/// Throws InsufficientDof for k = 3.
Eigen::Matrix3d confidence_interval(const QpSolution& solution, const QpProblem& problem,
                                    double delta);

/// Mean relative error, inferred values and intervals for one source.
QualityReport assess_source(const std::string& source_id,
                            const std::vector<CampaignAggregate>& campaigns, double xi,
                            double delta, bool normalize = true);

/// assess_source for every source, with ranks assigned by mean relative
/// error. Sources whose inference fails throw.
std::vector<QualityReport> assess_sources(
    const std::map<std::string, std::vector<CampaignAggregate>>& per_source, double xi,
    double delta, bool normalize = true);

}  // namespace dqa
