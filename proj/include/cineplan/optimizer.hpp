#ifndef CINEPLAN_OPTIMIZER_HPP_
#define CINEPLAN_OPTIMIZER_HPP_

#include <Eigen/Cholesky>
#include <vector>

#include "cineplan/costs.hpp"
#include "cineplan/geometry.hpp"

namespace cineplan {

struct OptParams {
  double eta = 20.0;    // step scale, update is -(1/eta) M^{-1} grad
  double eps0 = 1e-6;   // threshold on (g' M^{-1} g)^2 / 2
  double eps1 = 1e-3;   // plateau threshold on |cost change| per iteration
  int i_max = 50;       // iteration cap (number of updates)
};

enum class Termination { gradient_tol, decrease_tol, iteration_cap };

// Quadratic metric for covariant descent: the Hessian of the smoothness plus
// viewpoint-tracking terms, factorized once and reused for every solve. The
// pinned start row is replaced by an identity row so the full n x n system
// stays positive definite; solve() zeroes that row of the input, so steps
// never move the start. One factorization serves all three coordinates.
class SmoothnessMetric {
 public:
  SmoothnessMetric(const SmoothnessOperator& op, double lambda_shot);

  // Returns M^{-1} g with the pinned row forced to zero.
  WaypointMatrix solve(const WaypointMatrix& g) const;
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct OptResult {
  Trajectory trajectory;             // best iterate found
  int iterations = 0;                // updates applied
  double final_cost = 0.0;           // total cost of the returned trajectory
  std::vector<double> cost_history;  // one entry per iterate, initial included
  std::vector<TotalCost> breakdown_history;  // same indexing, gradients dropped
  Termination termination = Termination::iteration_cap;
  bool numerical_error = false;      // non-finite cost or gradient encountered
  TotalCost breakdown;               // component costs of the returned trajectory
};

// Covariant gradient descent xi <- xi - (1/eta) M^{-1} grad J. Stops when the
// squared metric norm of the gradient, (g' M^{-1} g)^2 / 2, drops below eps0,
// when the cost change over an iteration falls below eps1 in magnitude, or at
// the iteration cap. The interpolated distance field makes the obstacle and
// occlusion terms piecewise smooth, so descent can bounce slightly at kinks;
// a plateau test on |change| rides those out where a signed minimum-decrease
// test would quit on the first bounce. Returns the best iterate seen, which
// for the non-quadratic terms need not be the last. On a non-finite cost or
// gradient the loop aborts, numerical_error is set, and the best finite
// iterate is returned (termination is not meaningful in that case).
OptResult optimize(const Trajectory& xi_init, const CostContext& ctx,
                   const SmoothnessOperator& smooth_op, const Trajectory& xi_shot,
                   const SmoothnessMetric& metric, const OptParams& params = {});

// Initialization for the next receding-horizon solve: the previous solution
// shifted forward by elapsed_s (extended at constant tail_velocity past its
// end) and re-anchored to the new start position.
Trajectory warm_start(const Trajectory& prev, double elapsed_s,
                      const Vec3& tail_velocity, const BoundaryCondition& bc);

}  // namespace cineplan

#endif  // CINEPLAN_OPTIMIZER_HPP_
