#include "dqa/simplex_qp.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace dqa {

namespace {

using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Vector9d = Eigen::Matrix<double, 9, 1>;

// Row-major flattening: index r * 3 + j holds p(r, j).
Vector9d flatten(const Eigen::Matrix3d& p) {
  Vector9d x;
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 3; ++j) x(r * 3 + j) = p(r, j);
  return x;
}

Eigen::Matrix3d unflatten(const Vector9d& x) {
  Eigen::Matrix3d p;
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 3; ++j) p(r, j) = x(r * 3 + j);
  return p;
}

bool is_feasible(const Eigen::Matrix3d& p, double xi, double tol) {
  if (!p.allFinite() || (p.array() < -tol).any()) return false;
  if (((p.rowwise().sum().array() - 1.0).abs() > tol).any()) return false;
  return std::abs(p(0, 0) - p(1, 1)) <= xi + tol;
}

// Minimizes the quadratic with the guessed active constraints held as
// equalities. Singular systems (degenerate designs) get the minimum-norm
// solution of the KKT system.
Eigen::Matrix3d solve_equality_qp(const SimplexQp& qp, const std::array<bool, 9>& at_zero,
                                  int band_sign) {
  std::vector<std::pair<Vector9d, double>> rows;
  for (int r = 0; r < 3; ++r) {
    Vector9d e = Vector9d::Zero();
    e.segment<3>(r * 3).setOnes();
    rows.emplace_back(e, 1.0);
  }
  for (int i = 0; i < 9; ++i) {
    if (!at_zero[i]) continue;
    Vector9d e = Vector9d::Zero();
    e(i) = 1.0;
    rows.emplace_back(e, 0.0);
  }
  if (band_sign != 0) {
    Vector9d e = Vector9d::Zero();
    e(0) = 1.0;
    e(4) = -1.0;
    rows.emplace_back(e, band_sign * qp.xi);
  }

  Matrix9d hessian = Matrix9d::Zero();
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s)
      for (int j = 0; j < 3; ++j) hessian(r * 3 + j, s * 3 + j) = 2.0 * qp.quad(r, s);

  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(9 + m, 9 + m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(9 + m);
  kkt.topLeftCorner<9, 9>() = hessian;
  rhs.head<9>() = 2.0 * flatten(qp.linear);
  for (Eigen::Index k = 0; k < m; ++k) {
    kkt.block<1, 9>(9 + k, 0) = rows[k].first.transpose();
    kkt.block<9, 1>(0, 9 + k) = rows[k].first;
    rhs(9 + k) = rows[k].second;
  }
  const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  return unflatten(sol.head<9>());
}

}  // namespace

double kkt_residual(const SimplexQp& qp, const Eigen::Matrix3d& p, double lipschitz) {
  if (lipschitz <= 0.0) return 0.0;
  const Eigen::Matrix3d step = project_to_feasible<double>(p - qp.gradient(p) / lipschitz, qp.xi);
  return (p - step).cwiseAbs().maxCoeff();
}

SimplexQpResult solve_simplex_qp(const SimplexQp& qp, const SimplexQpOptions& options) {
  SimplexQpResult result;
  const double xi = qp.xi;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(qp.quad, Eigen::EigenvaluesOnly);
  const double lipschitz = 2.0 * eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lipschitz > 0.0)) {
    // Constant objective: every feasible point is optimal.
    result.objective = qp.objective(result.p);
    result.converged = true;
    return result;
  }

  const Eigen::Matrix3d start = result.p;
  Eigen::Matrix3d x = start;
  Eigen::Matrix3d y = start;
  double momentum = 1.0;

  const auto try_polish = [&](const Eigen::Matrix3d& current) -> bool {
    static constexpr std::array<double, 4> kThresholds = {1e-10, 1e-7, 1e-5, 1e-3};
    const double current_obj = qp.objective(current);
    for (double thr : kThresholds) {
      std::array<bool, 9> at_zero{};
      for (int r = 0; r < 3; ++r)
        for (int j = 0; j < 3; ++j) at_zero[r * 3 + j] = current(r, j) <= thr;
      const double gap = current(0, 0) - current(1, 1);
      const int band_sign = std::abs(gap) >= xi - thr ? (gap >= 0.0 ? 1 : -1) : 0;

      Eigen::Matrix3d candidate = solve_equality_qp(qp, at_zero, band_sign);
      if (!is_feasible(candidate, xi, 1e-10)) continue;
      candidate = project_to_feasible<double>(candidate.cwiseMax(0.0), xi);
      const double res = kkt_residual(qp, candidate, lipschitz);
      if (res < options.tolerance && qp.objective(candidate) <= current_obj + 1e-12 * (1.0 + std::abs(current_obj))) {
        result.p = candidate;
        result.kkt_residual = res;
        return true;
      }
    }
    return false;
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::Matrix3d next = project_to_feasible<double>(y - qp.gradient(y) / lipschitz, xi);
    const double next_momentum = (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0;
    // Gradient-based adaptive restart.
    if ((y - next).cwiseProduct(next - x).sum() > 0.0) {
      momentum = 1.0;
      y = next;
    } else {
      y = next + ((momentum - 1.0) / next_momentum) * (next - x);
      momentum = next_momentum;
    }
    x = next;
    result.iterations = it;

    if (it % options.polish_interval == 0 || it == 1) {
      const double res = kkt_residual(qp, x, lipschitz);
      if (try_polish(x)) {
        result.converged = true;
        break;
      }
      if (res < options.tolerance) {
        result.p = x;
        result.kkt_residual = res;
        result.converged = true;
        break;
      }
    }
  }

  if (!result.converged) {
    result.p = x;
    result.kkt_residual = kkt_residual(qp, x, lipschitz);
  }
  result.objective = qp.objective(result.p);
  return result;
}

}  // namespace dqa
