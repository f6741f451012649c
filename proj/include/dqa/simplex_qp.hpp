#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace dqa {

/// Euclidean projection of `v` onto the probability simplex {x >= 0, sum x = 1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> project_to_simplex(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Derived::RowsAtCompileTime, 1>;

  Vector sorted = v;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<Scalar>());
  Scalar cumulative(0);
  Scalar threshold(0);
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    cumulative += sorted(i);
    const Scalar t = (cumulative - Scalar(1)) / Scalar(i + 1);
    if (sorted(i) - t > Scalar(0)) threshold = t;
  }
  return (v.array() - threshold).max(Scalar(0)).matrix();
}

/// Projection onto the feasible set of the predictive-value program: each
/// row of `p` on the simplex and |p(0,0) - p(1,1)| <= xi.
///
/// When the band is violated after the row-wise projection, the band
/// constraint is active and its multiplier is found by bisection: the rows
/// become proj(a - lambda e0) and proj(b + lambda e1).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> project_to_feasible(const Eigen::Matrix<Scalar, 3, 3>& p, Scalar xi) {
  using Row = Eigen::Matrix<Scalar, 3, 1>;
  Eigen::Matrix<Scalar, 3, 3> out;
  const Row a = p.row(0).transpose();
  const Row b = p.row(1).transpose();
  out.row(2) = project_to_simplex(Row(p.row(2).transpose())).transpose();

  Row pa = project_to_simplex(a);
  Row pb = project_to_simplex(b);
  const Scalar gap = pa(0) - pb(1);
  if (std::abs(gap) > xi) {
    const Scalar sign = gap > Scalar(0) ? Scalar(1) : Scalar(-1);
    const auto rows_at = [&](Scalar lambda, Row& ra, Row& rb) {
      Row sa = a;
      Row sb = b;
      sa(0) -= sign * lambda;
      sb(1) += sign * lambda;
      ra = project_to_simplex(sa);
      rb = project_to_simplex(sb);
    };
    // sign * (ra(0) - rb(1)) is nonincreasing in lambda and reaches -1 once
    // lambda exceeds the spread of both rows plus one.
    Scalar lo(0);
    Scalar hi = a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff() + Scalar(2);
    for (int it = 0; it < 200 && hi - lo > Scalar(0); ++it) {
      const Scalar mid = lo + (hi - lo) / Scalar(2);
      if (mid <= lo || mid >= hi) break;
      rows_at(mid, pa, pb);
      if (sign * (pa(0) - pb(1)) > xi) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    rows_at(hi, pa, pb);
  }
  out.row(0) = pa.transpose();
  out.row(1) = pb.transpose();
  return out;
}

/// Convex quadratic over 3x3 row-stochastic matrices P:
///   f(P) = tr(P^T A P) - 2 tr(P^T B) + c
/// with A symmetric positive semi-definite. For residual form ||D P - G||_F^2
/// this is A = D^T D, B = D^T G, c = ||G||_F^2.
struct SimplexQp {
  Eigen::Matrix3d quad = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d linear = Eigen::Matrix3d::Zero();
  double constant = 0.0;
  // Half-width of the band on p(0,0) - p(1,1).
  double xi = 1.0;

  double objective(const Eigen::Matrix3d& p) const {
    return (p.transpose() * quad * p).trace() - 2.0 * (p.cwiseProduct(linear)).sum() + constant;
  }
  Eigen::Matrix3d gradient(const Eigen::Matrix3d& p) const { return 2.0 * (quad * p - linear); }
};

struct SimplexQpOptions {
  double tolerance = 1e-9;
  int max_iterations = 100000;
  // Active-set polish is attempted every this many gradient steps.
  int polish_interval = 20;
};

struct SimplexQpResult {
  Eigen::Matrix3d p = Eigen::Matrix3d::Constant(1.0 / 3.0);
  double objective = 0.0;
  // ||P - proj(P - grad / L)||_max, zero exactly at a KKT point.
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected-gradient residual of `p` with step 1/lipschitz.
double kkt_residual(const SimplexQp& qp, const Eigen::Matrix3d& p, double lipschitz);

/// Accelerated projected gradient with periodic active-set polishing.
///
/// Starts from the uniform matrix, which is feasible for every xi >= 0, so
/// the result is independent of caller state.
SimplexQpResult solve_simplex_qp(const SimplexQp& qp, const SimplexQpOptions& options = {});

}  // namespace dqa
