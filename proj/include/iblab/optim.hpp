#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iblab/dataset.hpp"
#include "iblab/loss.hpp"
#include "iblab/norm.hpp"
#include "iblab/potential.hpp"

namespace iblab {

enum class Algorithm {
  Gd,
  Momentum,
  MirrorDescent,
  MirrorConstrained,
  MirrorDualMomentum,
  MirrorPrimalMomentum,
  NaturalGd,
  SteepestDescent,
  CoordinateDescent,
  AdaGrad,
  FactoredGd,
};

std::string to_string(Algorithm a);

// Step-size policies. Constant applies eta as-is. Guarded starts each step
// at eta and halves until the step stays in-domain and decreases the loss.
// LossAdaptive uses eta_t = c / (B^2 L(w_t)) capped at eta_cap.
enum class StepPolicyKind { Constant, Guarded, LossAdaptive };

struct StepPolicy {
  StepPolicyKind kind = StepPolicyKind::Constant;
  double eta = 0.01;
  double c = 1.0;
  double eta_cap = 1e12;

  static StepPolicy constant(double eta);
  static StepPolicy guarded(double eta);
  static StepPolicy loss_adaptive(double c, double eta_cap = 1e12);
  void validate() const;
};

// eta = c / (B^2 * loss), capped. Requires c in (0, sqrt(2)], B > 0, loss > 0.
double step_size_loss_adaptive(double c, double B, double current_loss,
                               double eta_cap = 1e12);

// Momentum coefficient schedule: a constant or an explicit per-step list
// (zero beyond the end of the list).
struct Schedule {
  double constant = 0.0;
  std::vector<double> per_step;
  bool use_list = false;

  static Schedule zero() { return {}; }
  static Schedule of(double value);
  static Schedule list(std::vector<double> values);
  double at(long t) const;
};

struct BatchSchedule {
  enum class Kind { Full, SeededMinibatch, FixedSubsets };
  Kind kind = Kind::Full;
  int batch_size = 1;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> subsets;  // FixedSubsets cycles these
};

struct StopRule {
  double loss_tol = 1e-12;        // unique-finite-root losses
  double margin_gap_tol = 1e-2;   // strict monotone losses (needs oracle gamma)
  long budget = 100000;
};

// AdaGrad accumulator configuration. The default has no epsilon floor; a
// zero diagonal entry aborts unless eps_floor > 0 is set explicitly.
struct AdaGradConfig {
  Eigen::VectorXd g0;  // initial diagonal; empty means zeros
  double eps_floor = 0.0;
};

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::Gd;
  StepPolicy step;
  Schedule beta;   // momentum on the iterate / dual iterate
  Schedule gamma;  // lookahead shift for the gradient evaluation
  BatchSchedule batch;
  StopRule stop;
  AdaGradConfig adagrad;
  long max_iterations = 100000;

  void validate() const;
};

// Mutable optimizer state. Mirror-type algorithms keep `dual` consistent
// with grad psi(w); momentum buffers start at zero.
struct OptimizerState {
  Eigen::VectorXd w;
  Eigen::VectorXd dual;
  Eigen::VectorXd dw_prev;
  Eigen::VectorXd dz_prev;
  Eigen::VectorXd g_accum;  // AdaGrad diagonal
  Eigen::MatrixXd U;        // factorized parameterization
  long t = 0;

  static OptimizerState vector_start(const Eigen::VectorXd& w0);
  static OptimizerState mirror_start(const Potential& psi, const Eigen::VectorXd& w0);
  static OptimizerState factored_start(const Eigen::MatrixXd& U0);
};

// Affine equality constraint {w : G w = h}.
struct AffineConstraint {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  bool empty() const { return G.rows() == 0; }
};

// ---- single update rules ----
// Each performs exactly one step with the given step size and updates the
// state buffers. Throws DomainError when an iterate leaves the potential
// domain and std::runtime_error on non-finite gradients.

void gd_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
             const std::vector<int>* subset = nullptr);

void momentum_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
                   double beta, double gamma, const std::vector<int>* subset = nullptr);

void md_step(OptimizerState& s, const Dataset& data, LossKind loss, const Potential& psi,
             double eta, const std::vector<int>* subset = nullptr);

void md_constrained_step(OptimizerState& s, const Dataset& data, LossKind loss,
                         const Potential& psi, const AffineConstraint& constraint,
                         double eta, const std::vector<int>* subset = nullptr);

void md_dual_momentum_step(OptimizerState& s, const Dataset& data, LossKind loss,
                           const Potential& psi, double eta, double beta, double gamma,
                           const std::vector<int>* subset = nullptr);

void md_primal_momentum_step(OptimizerState& s, const Dataset& data, LossKind loss,
                             const Potential& psi, double eta, double beta, double gamma,
                             const std::vector<int>* subset = nullptr);

void ngd_step(OptimizerState& s, const Dataset& data, LossKind loss, const Potential& psi,
              double eta, const std::vector<int>* subset = nullptr);

void sd_step(OptimizerState& s, const Dataset& data, LossKind loss, const NormGeometry& norm,
             double eta, const std::vector<int>* subset = nullptr);

void coordinate_step(OptimizerState& s, const Dataset& data, LossKind loss, TieRule rule,
                     double eta, const std::vector<int>* subset = nullptr);

void adagrad_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
                  const AdaGradConfig& cfg, const std::vector<int>* subset = nullptr);

void factored_gd_step(OptimizerState& s, const MatrixDataset& data, LossKind loss,
                      double eta);

// Bregman projection onto {w : Gw = h}: argmin_{Gw=h} D_psi(w, grad_inverse(z)).
// Newton iteration on the constraint multipliers; throws on non-convergence.
Eigen::VectorXd bregman_project_affine(const Potential& psi, const Eigen::VectorXd& z,
                                       const AffineConstraint& constraint);

}  // namespace iblab
