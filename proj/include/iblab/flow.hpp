#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "iblab/dataset.hpp"
#include "iblab/norm.hpp"
#include "iblab/potential.hpp"

namespace iblab {

struct FlowOptions {
  double local_tol = 1e-10;   // per-step local error target
  double loss_stop = 1e-14;   // stop once the objective falls below this
  double t_max = 1e7;         // give up beyond this flow time
  double h_init = 1e-3;
  std::vector<double> sample_times;  // optional fixed sample grid
};

struct FlowResult {
  Eigen::VectorXd end;
  double t_end = 0.0;
  bool converged = false;        // loss_stop reached
  long steps_accepted = 0;
  long steps_rejected = 0;
  std::vector<std::pair<double, Eigen::VectorXd>> samples;
};

// Integrates dw/dt = rhs(w) with classic fourth-order Runge-Kutta and
// step-doubling error control. Aborts with DomainError (carrying the flow
// time) if the trajectory leaves `in_domain`.
FlowResult integrate_flow(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                          const std::function<bool(const Eigen::VectorXd&)>& in_domain,
                          const std::function<double(const Eigen::VectorXd&)>& loss_of,
                          const Eigen::VectorXd& start, const FlowOptions& opts);

// Mirror-descent / natural-gradient flow: dw/dt = -hess(psi)(w)^{-1} grad L(w).
FlowResult integrate_mirror_flow(const Potential& psi, const Dataset& data, LossKind loss,
                                 const Eigen::VectorXd& start, const FlowOptions& opts);

// Steepest-descent flow: dw/dt = duality_map(grad L(w)).
FlowResult integrate_steepest_flow(const NormGeometry& norm, const Dataset& data,
                                   LossKind loss, const Eigen::VectorXd& start,
                                   const FlowOptions& opts);

}  // namespace iblab
