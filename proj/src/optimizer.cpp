#include "cineplan/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cineplan {

SmoothnessMetric::SmoothnessMetric(const SmoothnessOperator& op, double lambda_shot) {
  const int n = op.n;
  if (n < 3) throw std::invalid_argument("metric needs at least 3 waypoints");
  if (lambda_shot < 0.0) throw std::invalid_argument("lambda_shot must be >= 0");
  m_ = Eigen::MatrixXd::Zero(n, n);
  m_(0, 0) = 1.0;
  // Hessian of (smoothness + lambda_shot * viewpoint) on the free waypoints;
  // both costs carry the same 1/(n-1) time average, which keeps the eta = 1
  // update an exact Newton step on the quadratic part.
  m_.bottomRightCorner(n - 1, n - 1) =
      (op.a.bottomRightCorner(n - 1, n - 1) +
       lambda_shot * Eigen::MatrixXd::Identity(n - 1, n - 1)) /
      (n - 1);
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("smoothness metric is not positive definite");
}

WaypointMatrix SmoothnessMetric::solve(const WaypointMatrix& g) const {
  if (g.rows() != m_.rows())
    throw std::invalid_argument("gradient size does not match the metric");
  WaypointMatrix rhs = g;
  rhs.row(0).setZero();
  return llt_.solve(rhs);
}

OptResult optimize(const Trajectory& xi_init, const CostContext& ctx,
                   const SmoothnessOperator& smooth_op, const Trajectory& xi_shot,
                   const SmoothnessMetric& metric, const OptParams& params) {
  if (params.eta <= 0.0) throw std::invalid_argument("eta must be positive");
  if (params.i_max < 1) throw std::invalid_argument("i_max must be >= 1");
  if (params.eps0 < 0.0 || params.eps1 < 0.0)
    throw std::invalid_argument("tolerances must be >= 0");
  if (xi_init.n() != smooth_op.n)
    throw std::invalid_argument("initial trajectory does not match the operator");
  if (!xi_init.point(0).isApprox(smooth_op.bc.start_position, 1e-9))
    throw std::invalid_argument("initial trajectory violates the start constraint");

  OptResult res;
  res.trajectory = xi_init;
  Trajectory xi = xi_init;
  double best = std::numeric_limits<double>::infinity();

  for (int i = 0;; ++i) {
    const TotalCost tc = total_cost(xi, ctx, smooth_op, xi_shot);
    if (!std::isfinite(tc.total) || !tc.gradient.allFinite()) {
      res.numerical_error = true;
      break;
    }
    res.cost_history.push_back(tc.total);
    res.breakdown_history.push_back(tc);
    res.breakdown_history.back().gradient.resize(0, 3);  // keep only the scalars
    if (tc.total < best) {
      best = tc.total;
      res.trajectory = xi;
      res.breakdown = tc;
    }
    if (i > 0 && std::abs(res.cost_history[i - 1] - res.cost_history[i]) < params.eps1) {
      res.termination = Termination::decrease_tol;
      break;
    }
    const WaypointMatrix step = metric.solve(tc.gradient);
    const double metric_norm = tc.gradient.cwiseProduct(step).sum();
    if (0.5 * metric_norm * metric_norm < params.eps0) {
      res.termination = Termination::gradient_tol;
      break;
    }
    if (i == params.i_max) {
      res.termination = Termination::iteration_cap;
      break;
    }
    xi.waypoints -= step / params.eta;
  }

  res.iterations = std::max<int>(0, static_cast<int>(res.cost_history.size()) - 1);
  res.final_cost = std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN();
  return res;
}

Trajectory warm_start(const Trajectory& prev, double elapsed_s,
                      const Vec3& tail_velocity, const BoundaryCondition& bc) {
  Trajectory shifted = time_shift(prev, elapsed_s, tail_velocity);
  shifted.set_point(0, bc.start_position);
  return shifted;
}

}  // namespace cineplan
