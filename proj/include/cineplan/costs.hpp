#ifndef CINEPLAN_COSTS_HPP_
#define CINEPLAN_COSTS_HPP_

#include "cineplan/geometry.hpp"
#include "cineplan/tsdf.hpp"

namespace cineplan {

// Speeds below this floor leave the unit tangent (and curvature) undefined;
// the gradient code substitutes this value in denominators.
inline constexpr double kMinSpeed = 1e-3;

struct SmoothnessWeights {
  double w1 = 1.0;  // squared velocity
  double w2 = 0.0;  // squared acceleration
  double w3 = 0.0;  // squared jerk
};

// Quadratic form for the time-averaged squared-derivative cost:
//   J = (1/(2(n-1))) * (xi' A xi + 2 xi' b + c)   per coordinate, summed.
// The fixed start position and start velocity (imposed through a virtual
// waypoint one step before the start) are folded into b and c, so A has
// support only on the free rows/cols 1..n-1 and is positive definite there.
struct SmoothnessOperator {
  Eigen::MatrixXd a;  // n x n
  WaypointMatrix b;   // n x 3
  double c = 0.0;
  int n = 0;
  double dt = 0.0;
  SmoothnessWeights weights;
  BoundaryCondition bc;
};

SmoothnessOperator build_smoothness_operator(int n, double dt,
                                             const BoundaryCondition& bc,
                                             const SmoothnessWeights& weights = {});

struct CostResult {
  double cost = 0.0;
  WaypointMatrix gradient;  // n x 3, zero row 0 (the start is pinned)
};

CostResult smoothness_cost(const Trajectory& xi, const SmoothnessOperator& op);

// Direct stencil-sum evaluation of the same functional; the quadratic-form
// path must agree with this to machine precision (tested, not used by the
// optimizer loop).
double smoothness_cost_direct(const Trajectory& xi, const BoundaryCondition& bc,
                              const SmoothnessWeights& weights);

// Obstacle penalty as a function of signed distance d: linear inside the
// surface, quadratic ramp within eps of it, zero beyond. C1 everywhere.
double hinge_penalty(double d, double eps);
double hinge_penalty_slope(double d, double eps);

struct CostContext {
  const TsdfGrid* grid = nullptr;
  Trajectory actor;                    // forecast sharing the planning grid
  double lambda_obs = 10.0;            // weight on the obstacle term
  double lambda_occ = 5.0;             // weight on the occlusion term
  double lambda_shot = 1.0;            // weight on the viewpoint term
  double eps_obs = 2.0;                // hinge width, m
  double actor_clearance_radius = 1.0; // keep-out sphere around the actor, m
  int tau_samples = 16;                // sightline quadrature nodes
};

// Arc-length-weighted obstacle penalty along the trajectory: the hinged TSDF
// distance plus a hinged keep-out sphere around the concurrent actor
// position, each multiplied by local speed and dt. The gradient is the exact
// adjoint of this discrete sum (the direct term plus the transport term from
// each waypoint's role in its neighbors' speed estimates), which is the
// functional obstacle gradient discretized consistently.
CostResult obstacle_cost(const Trajectory& xi, const CostContext& ctx);

// Occlusion of the drone-to-actor sightline: for each waypoint, the obstacle
// penalty integrated along the segment from the drone to the actor (midpoint
// rule over tau_samples nodes, weighted by segment length), then multiplied
// by drone speed and dt. The actor itself is not an occluder: only the
// environment TSDF enters.
double occlusion_cost(const Trajectory& xi, const CostContext& ctx);

// Exact adjoint of the occlusion sum, using the same tau quadrature as the
// cost: the sightline integral differentiates through the sample positions
// (with a 1-tau weight) and the sightline length, and the speed factor flows
// back through the velocity stencil transpose as in obstacle_cost.
WaypointMatrix occlusion_gradient(const Trajectory& xi, const CostContext& ctx);

struct TotalCost {
  double total = 0.0;   // smooth + lambda_obs*obs + lambda_occ*occ + lambda_shot*shot
  double smooth = 0.0;  // unweighted components
  double obs = 0.0;
  double occ = 0.0;
  double shot = 0.0;
  WaypointMatrix gradient;
};

// Weighted sum of all four terms. Terms with a zero weight are skipped (their
// component reports 0 and contributes no gradient).
TotalCost total_cost(const Trajectory& xi, const CostContext& ctx,
                     const SmoothnessOperator& smooth_op, const Trajectory& xi_shot);

}  // namespace cineplan

#endif  // CINEPLAN_COSTS_HPP_
