#include "cineplan/costs.hpp"

#include <cmath>
#include <stdexcept>

#include "cineplan/shot.hpp"

namespace cineplan {

namespace {

// Finite-difference rows for one derivative order over the extended waypoint
// vector [xi_-1, xi_0, ..., xi_{n-1}] (column 0 is the virtual pre-start
// point that encodes the boundary velocity).
Eigen::MatrixXd extended_stencil(int order, int n, double dt) {
  const double scale = 1.0 / std::pow(dt, order);
  Eigen::MatrixXd k;
  switch (order) {
    case 1:
      k = Eigen::MatrixXd::Zero(n, n + 1);
      for (int r = 0; r < n; ++r) {
        k(r, r) = -scale;
        k(r, r + 1) = scale;
      }
      break;
    case 2:
      k = Eigen::MatrixXd::Zero(n - 1, n + 1);
      for (int r = 0; r < n - 1; ++r) {
        k(r, r) = scale;
        k(r, r + 1) = -2.0 * scale;
        k(r, r + 2) = scale;
      }
      break;
    case 3:
      k = Eigen::MatrixXd::Zero(n - 2, n + 1);
      for (int r = 0; r < n - 2; ++r) {
        k(r, r) = -scale;
        k(r, r + 1) = 3.0 * scale;
        k(r, r + 2) = -3.0 * scale;
        k(r, r + 3) = scale;
      }
      break;
    default:
      throw std::invalid_argument("unsupported smoothness derivative order");
  }
  return k;
}

void check_planning_pair(const Trajectory& xi, const Trajectory& actor) {
  if (xi.n() != actor.n() || std::abs(xi.dt() - actor.dt()) > 1e-9) {
    throw std::invalid_argument("drone and actor trajectories must share a grid");
  }
}

}  // namespace

SmoothnessOperator build_smoothness_operator(int n, double dt,
                                             const BoundaryCondition& bc,
                                             const SmoothnessWeights& weights) {
  if (n < 3) throw std::invalid_argument("smoothness operator needs n >= 3");
  if (!(dt > 0.0)) throw std::invalid_argument("smoothness operator needs dt > 0");
  if (weights.w1 < 0 || weights.w2 < 0 || weights.w3 < 0 ||
      weights.w1 + weights.w2 + weights.w3 <= 0.0) {
    throw std::invalid_argument("smoothness weights must be nonnegative with a positive sum");
  }

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n + 1, n + 1);
  const double w[3] = {weights.w1, weights.w2, weights.w3};
  for (int order = 1; order <= 3; ++order) {
    if (w[order - 1] == 0.0) continue;
    const Eigen::MatrixXd k = extended_stencil(order, n, dt);
    q += w[order - 1] * (k.transpose() * k);
  }

  // Extended columns 0 and 1 are fixed: the virtual point and the start.
  const Eigen::Matrix<double, 3, 2> fixed =
      (Eigen::Matrix<double, 3, 2>() << bc.start_position - dt * bc.start_velocity,
       bc.start_position)
          .finished();

  SmoothnessOperator op;
  op.n = n;
  op.dt = dt;
  op.weights = weights;
  op.bc = bc;
  op.a = Eigen::MatrixXd::Zero(n, n);
  op.a.bottomRightCorner(n - 1, n - 1) = q.bottomRightCorner(n - 1, n - 1);
  op.b = WaypointMatrix::Zero(n, 3);
  // b_free = Q(free, fixed) * fixed values; the fixed columns are the first
  // two of the extended form.
  op.b.bottomRows(n - 1) = q.block(2, 0, n - 1, 2) * fixed.transpose();
  const Eigen::Matrix2d qff = q.topLeftCorner<2, 2>();
  op.c = (fixed * qff * fixed.transpose()).trace();
  return op;
}

CostResult smoothness_cost(const Trajectory& xi, const SmoothnessOperator& op) {
  if (xi.n() != op.n) throw std::invalid_argument("smoothness operator built for a different n");
  const int n = op.n;
  CostResult out;
  const Eigen::MatrixXd ax = op.a * xi.waypoints;
  out.cost = ((xi.waypoints.transpose() * ax).trace() +
              2.0 * (xi.waypoints.transpose() * op.b).trace() + op.c) /
             (2.0 * (n - 1));
  out.gradient = (ax + op.b) / (n - 1);
  out.gradient.row(0).setZero();
  return out;
}

double smoothness_cost_direct(const Trajectory& xi, const BoundaryCondition& bc,
                              const SmoothnessWeights& weights) {
  const int n = xi.n();
  const double dt = xi.dt();
  Eigen::MatrixXd ext(n + 1, 3);
  ext.row(0) = (bc.start_position - dt * bc.start_velocity).transpose();
  ext.bottomRows(n) = xi.waypoints;

  double sum = 0.0;
  const double w[3] = {weights.w1, weights.w2, weights.w3};
  for (int order = 1; order <= 3; ++order) {
    if (w[order - 1] == 0.0) continue;
    const Eigen::MatrixXd rows = extended_stencil(order, n, dt) * ext;
    sum += w[order - 1] * rows.squaredNorm();
  }
  return sum / (2.0 * (n - 1));
}

double hinge_penalty(double d, double eps) {
  if (d < 0.0) return -d + 0.5 * eps;
  if (d <= eps) {
    const double r = d - eps;
    return r * r / (2.0 * eps);
  }
  return 0.0;
}

double hinge_penalty_slope(double d, double eps) {
  if (d < 0.0) return -1.0;
  if (d <= eps) return (d - eps) / eps;
  return 0.0;
}

CostResult obstacle_cost(const Trajectory& xi, const CostContext& ctx) {
  if (ctx.grid == nullptr) throw std::invalid_argument("obstacle_cost needs a tsdf grid");
  check_planning_pair(xi, ctx.actor);
  const int n = xi.n();
  const double dt = xi.dt();
  const WaypointMatrix vel = finite_diff_velocity(xi);

  CostResult out;
  out.gradient = WaypointMatrix::Zero(n, 3);
  WaypointMatrix transported(n, 3);  // rows c_k * unit tangent
  for (int k = 0; k < n; ++k) {
    const Vec3 p = xi.point(k);
    const Vec3 to_actor = p - ctx.actor.point(k);
    const double actor_dist = to_actor.norm() - ctx.actor_clearance_radius;

    const double c = hinge_penalty(ctx.grid->distance(p), ctx.eps_obs) +
                     hinge_penalty(actor_dist, ctx.eps_obs);
    const double speed = vel.row(k).norm();
    out.cost += c * speed * dt;

    Vec3 grad_c = hinge_penalty_slope(ctx.grid->distance(p), ctx.eps_obs) *
                  ctx.grid->distance_gradient(p);
    if (to_actor.norm() > 1e-9) {
      grad_c += hinge_penalty_slope(actor_dist, ctx.eps_obs) * to_actor.normalized();
    }
    out.gradient.row(k) = dt * speed * grad_c.transpose();
    transported.row(k) = c * vel.row(k) / std::max(speed, kMinSpeed);
  }
  out.gradient += dt * velocity_operator_transpose(transported, dt);
  out.gradient.row(0).setZero();
  return out;
}

double occlusion_cost(const Trajectory& xi, const CostContext& ctx) {
  if (ctx.grid == nullptr) throw std::invalid_argument("occlusion_cost needs a tsdf grid");
  check_planning_pair(xi, ctx.actor);
  const int n = xi.n();
  const double dt = xi.dt();
  const int m = ctx.tau_samples;
  if (m < 1) throw std::invalid_argument("tau_samples must be positive");
  const double dtau = 1.0 / m;
  const WaypointMatrix vel = finite_diff_velocity(xi);

  double cost = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec3 p = xi.point(k);
    const Vec3 a = ctx.actor.point(k);
    const double len = (a - p).norm();
    if (len < 1e-9) continue;
    double inner = 0.0;
    for (int j = 0; j < m; ++j) {
      const double tau = (j + 0.5) * dtau;
      inner += hinge_penalty(ctx.grid->distance((1.0 - tau) * p + tau * a), ctx.eps_obs);
    }
    cost += inner * dtau * len * vel.row(k).norm() * dt;
  }
  return cost;
}

WaypointMatrix occlusion_gradient(const Trajectory& xi, const CostContext& ctx) {
  if (ctx.grid == nullptr) throw std::invalid_argument("occlusion_gradient needs a tsdf grid");
  check_planning_pair(xi, ctx.actor);
  const int n = xi.n();
  const double dt = xi.dt();
  const int m = ctx.tau_samples;
  if (m < 1) throw std::invalid_argument("tau_samples must be positive");
  const double dtau = 1.0 / m;
  const WaypointMatrix vel = finite_diff_velocity(xi);

  // Exact adjoint of the quadrature sum, mirroring the obstacle gradient.
  // The sightline integral differentiates pointwise through the sample
  // positions (picking up a 1-tau weight) and through the sightline length;
  // the speed factor couples neighbouring waypoints through the differencing
  // stencil, so its contribution goes back through the stencil transpose.
  // A curvature expansion of that last piece would miss the one-sided end
  // rows entirely.
  WaypointMatrix grad = WaypointMatrix::Zero(n, 3);
  WaypointMatrix transported = WaypointMatrix::Zero(n, 3);
  for (int k = 0; k < n; ++k) {
    const Vec3 p = xi.point(k);
    const Vec3 a = ctx.actor.point(k);
    const Vec3 sight = a - p;
    const double len = sight.norm();
    if (len < 1e-9) continue;
    const Vec3 sight_hat = sight / len;
    const Vec3 qd = vel.row(k).transpose();
    const double speed = qd.norm();

    Vec3 direct = Vec3::Zero();  // d/dq of the sightline integral
    double penalty_int = 0.0;
    for (int j = 0; j < m; ++j) {
      const double tau = (j + 0.5) * dtau;
      const Vec3 pt = (1.0 - tau) * p + tau * a;
      const double d = ctx.grid->distance(pt);
      penalty_int += dtau * hinge_penalty(d, ctx.eps_obs);
      direct += dtau * (1.0 - tau) * hinge_penalty_slope(d, ctx.eps_obs) *
                ctx.grid->distance_gradient(pt);
    }
    grad.row(k) =
        dt * speed * (len * direct - penalty_int * sight_hat).transpose();
    transported.row(k) =
        len * penalty_int * qd.transpose() / std::max(speed, kMinSpeed);
  }
  grad += dt * velocity_operator_transpose(transported, dt);
  grad.row(0).setZero();
  return grad;
}

TotalCost total_cost(const Trajectory& xi, const CostContext& ctx,
                     const SmoothnessOperator& smooth_op, const Trajectory& xi_shot) {
  TotalCost out;
  const CostResult smooth = smoothness_cost(xi, smooth_op);
  out.smooth = smooth.cost;
  out.gradient = smooth.gradient;

  if (ctx.lambda_obs != 0.0) {
    const CostResult obs = obstacle_cost(xi, ctx);
    out.obs = obs.cost;
    out.gradient += ctx.lambda_obs * obs.gradient;
  }
  if (ctx.lambda_occ != 0.0) {
    out.occ = occlusion_cost(xi, ctx);
    out.gradient += ctx.lambda_occ * occlusion_gradient(xi, ctx);
  }
  if (ctx.lambda_shot != 0.0) {
    const ShotCostResult shot = shot_cost(xi, xi_shot);
    out.shot = shot.cost;
    out.gradient += ctx.lambda_shot * shot.gradient;
  }
  out.total = out.smooth + ctx.lambda_obs * out.obs + ctx.lambda_occ * out.occ +
              ctx.lambda_shot * out.shot;
  out.gradient.row(0).setZero();
  return out;
}

}  // namespace cineplan
