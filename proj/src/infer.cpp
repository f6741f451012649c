#include "dqa/infer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "dqa/rank.hpp"
#include "dqa/stats.hpp"

namespace dqa {

namespace {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

void check_problem(const QpProblem& problem) {
  const auto k = problem.campaigns.size();
  if (k < 3) {
    throw Error(ErrorCode::TooFewCampaigns,
                fmt::format("at least 3 campaigns are needed, got {}", k));
  }
  if (!(problem.xi >= 0.0)) {
    throw Error(ErrorCode::InvalidParameters, fmt::format("xi must be >= 0, got {}", problem.xi));
  }
  for (const auto& c : problem.campaigns) validate_aggregate(c);
  if (!problem.normalize) {
    const double first = problem.campaigns.front().population;
    for (const auto& c : problem.campaigns) {
      if (c.population != first) {
        throw Error(ErrorCode::UnequalPopulations,
                    fmt::format("campaign '{}' has population {} but '{}' has {}; enable "
                                "normalization for unequal sizes",
                                c.campaign_id, c.population,
                                problem.campaigns.front().campaign_id, first));
      }
    }
  }
}

// Rows of D and G in the units the fit uses.
std::pair<Eigen::MatrixX3d, Eigen::MatrixX3d> design(const QpProblem& problem) {
  const auto k = static_cast<Eigen::Index>(problem.campaigns.size());
  Eigen::MatrixX3d d(k, 3);
  Eigen::MatrixX3d g(k, 3);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& c = problem.campaigns[static_cast<std::size_t>(i)];
    const double scale = problem.normalize ? 1.0 / c.population : 1.0;
    d.row(i) = (c.source * scale).transpose();
    g.row(i) = (c.truth * scale).transpose();
  }
  return {d, g};
}

}  // namespace

QpSolution infer_predictive_values(const QpProblem& problem, const SimplexQpOptions& options) {
  check_problem(problem);
  const auto [d, g] = design(problem);

  SimplexQp qp;
  qp.quad = d.transpose() * d;
  qp.linear = d.transpose() * g;
  qp.constant = g.squaredNorm();
  qp.xi = problem.xi;

  const SimplexQpResult fit = solve_simplex_qp(qp, options);
  if (!fit.converged) {
    throw Error(ErrorCode::NonConvergence,
                fmt::format("solver stopped after {} iterations with KKT residual {}",
                            fit.iterations, fit.kkt_residual));
  }

  QpSolution sol;
  sol.values = PredictiveValues(fit.p);
  sol.iterations = fit.iterations;
  sol.converged = fit.converged;
  sol.kkt_residual = fit.kkt_residual;

  const Eigen::MatrixX3d resid = d * fit.p - g;
  sol.residuals.reserve(static_cast<std::size_t>(resid.rows()));
  for (Eigen::Index i = 0; i < resid.rows(); ++i) sol.residuals.emplace_back(resid.row(i).transpose());
  sol.objective = resid.squaredNorm();

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(qp.quad, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  sol.unique = top > 0.0 && eig.eigenvalues().minCoeff() > 1e-10 * top;
  return sol;
}

double estimate_positives_inferred(const PredictiveValues& values, const Eigen::Vector3d& d_counts) {
  return d_counts.dot(values.p.col(0));
}

Eigen::Matrix3d confidence_interval(const QpSolution& solution, const QpProblem& problem,
                                    double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidParameters, fmt::format("delta {} outside (0, 1)", delta));
  }
  check_problem(problem);
  const int k = static_cast<int>(problem.campaigns.size());
  const int dof = 2 * k - 6;
  if (dof < 1) {
    throw Error(ErrorCode::InsufficientDof,
                fmt::format("{} campaigns leave {} degrees of freedom", k, dof));
  }
  const auto [d, g] = design(problem);

  // Regressors theta = (alpha_1, beta_1, gamma_1, alpha_2, beta_2, gamma_2).
  // Eliminating the third column leaves residual r3 = -(r1 + r2), so the
  // objective is sum_i r_i^T W r_i over (r1, r2) with W = [[2, 1], [1, 2]].
  Eigen::Matrix2d weight;
  weight << 2.0, 1.0, 1.0, 2.0;
  Matrix6d info = Matrix6d::Zero();
  const Eigen::Matrix3d gram = d.transpose() * d;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) info.block<3, 3>(3 * a, 3 * b) = weight(a, b) * gram;

  // Inequality constraints do not shrink the interval: conditioning on the
  // face the optimum landed on understates the spread of the estimate.
  const double sigma2 = solution.objective / static_cast<double>(dof);
  const Matrix6d cov = sigma2 * info.completeOrthogonalDecomposition().pseudoInverse();

  // Map theta to all nine values; the third column is 1 - col0 - col1.
  Eigen::Matrix<double, 9, 6> lift = Eigen::Matrix<double, 9, 6>::Zero();
  for (int r = 0; r < 3; ++r) {
    lift(r * 3 + 0, r) = 1.0;
    lift(r * 3 + 1, 3 + r) = 1.0;
    lift(r * 3 + 2, r) = -1.0;
    lift(r * 3 + 2, 3 + r) = -1.0;
  }
  const Eigen::Matrix<double, 9, 9> cov9 = lift * cov * lift.transpose();
  const double tq = student_t_quantile(1.0 - delta / 2.0, dof);

  Eigen::Matrix3d half;
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 3; ++j) half(r, j) = std::sqrt(std::max(0.0, cov9(r * 3 + j, r * 3 + j))) * tq;
  return half;
}

QualityReport assess_source(const std::string& source_id,
                            const std::vector<CampaignAggregate>& campaigns, double xi,
                            double delta, bool normalize) {
  QualityReport report;
  report.source_id = source_id;
  report.n_campaigns = static_cast<int>(campaigns.size());
  report.ci_level = 1.0 - delta;

  const RankEntry entry = score_source(source_id, campaigns);
  report.mean_relative_err = entry.mean_err;
  report.skipped_campaigns = entry.skipped_campaigns;

  QpProblem problem{campaigns, xi, normalize};
  const QpSolution sol = infer_predictive_values(problem);
  report.inferred = sol.values;
  report.unique = sol.unique;
  if (campaigns.size() >= 4) report.ci_half_widths = confidence_interval(sol, problem, delta);
  return report;
}

std::vector<QualityReport> assess_sources(
    const std::map<std::string, std::vector<CampaignAggregate>>& per_source, double xi,
    double delta, bool normalize) {
  std::vector<QualityReport> reports;
  for (const auto& [id, campaigns] : per_source) {
    reports.push_back(assess_source(id, campaigns, xi, delta, normalize));
  }
  std::sort(reports.begin(), reports.end(), [](const QualityReport& a, const QualityReport& b) {
    if (a.mean_relative_err != b.mean_relative_err) return a.mean_relative_err < b.mean_relative_err;
    return a.source_id < b.source_id;
  });
  for (std::size_t i = 0; i < reports.size(); ++i) reports[i].rank = static_cast<int>(i) + 1;
  return reports;
}

}  // namespace dqa
