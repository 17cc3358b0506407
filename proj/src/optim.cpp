#include "iblab/optim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace iblab {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Gd: return "gd";
    case Algorithm::Momentum: return "momentum";
    case Algorithm::MirrorDescent: return "md";
    case Algorithm::MirrorConstrained: return "md-constrained";
    case Algorithm::MirrorDualMomentum: return "md-dual-momentum";
    case Algorithm::MirrorPrimalMomentum: return "md-primal-momentum";
    case Algorithm::NaturalGd: return "ngd";
    case Algorithm::SteepestDescent: return "sd";
    case Algorithm::CoordinateDescent: return "cd";
    case Algorithm::AdaGrad: return "adagrad";
    case Algorithm::FactoredGd: return "factored-gd";
  }
  return "?";
}

StepPolicy StepPolicy::constant(double eta) {
  StepPolicy p;
  p.kind = StepPolicyKind::Constant;
  p.eta = eta;
  p.validate();
  return p;
}

StepPolicy StepPolicy::guarded(double eta) {
  StepPolicy p;
  p.kind = StepPolicyKind::Guarded;
  p.eta = eta;
  p.validate();
  return p;
}

StepPolicy StepPolicy::loss_adaptive(double c, double eta_cap) {
  StepPolicy p;
  p.kind = StepPolicyKind::LossAdaptive;
  p.c = c;
  p.eta_cap = eta_cap;
  p.validate();
  return p;
}

void StepPolicy::validate() const {
  if (kind == StepPolicyKind::LossAdaptive) {
    if (!(c > 0.0 && c <= std::sqrt(2.0))) {
      throw std::invalid_argument("loss-adaptive step: c must lie in (0, sqrt(2)]");
    }
    if (!(eta_cap > 0.0)) throw std::invalid_argument("step policy: eta_cap must be > 0");
  } else if (!(eta > 0.0)) {
    throw std::invalid_argument("step policy: eta must be > 0");
  }
}

double step_size_loss_adaptive(double c, double B, double current_loss, double eta_cap) {
  if (!(c > 0.0 && c <= std::sqrt(2.0))) {
    throw std::invalid_argument("step_size_loss_adaptive: c must lie in (0, sqrt(2)]");
  }
  if (!(B > 0.0)) throw std::invalid_argument("step_size_loss_adaptive: B must be > 0");
  if (!(current_loss > 0.0)) {
    throw std::invalid_argument("step_size_loss_adaptive: loss must be > 0");
  }
  return std::min(c / (B * B * current_loss), eta_cap);
}

Schedule Schedule::of(double value) {
  Schedule s;
  s.constant = value;
  return s;
}

Schedule Schedule::list(std::vector<double> values) {
  Schedule s;
  s.per_step = std::move(values);
  s.use_list = true;
  return s;
}

double Schedule::at(long t) const {
  if (!use_list) return constant;
  if (t < 0 || t >= static_cast<long>(per_step.size())) return 0.0;
  return per_step[static_cast<std::size_t>(t)];
}

void OptimizerConfig::validate() const {
  step.validate();
  if (max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
  if (beta.use_list) {
    for (double b : beta.per_step)
      if (b < 0) throw std::invalid_argument("config: beta must be >= 0");
  } else if (beta.constant < 0) {
    throw std::invalid_argument("config: beta must be >= 0");
  }
}

OptimizerState OptimizerState::vector_start(const Eigen::VectorXd& w0) {
  OptimizerState s;
  s.w = w0;
  s.dw_prev = Eigen::VectorXd::Zero(w0.size());
  s.dz_prev = Eigen::VectorXd::Zero(w0.size());
  return s;
}

OptimizerState OptimizerState::mirror_start(const Potential& psi, const Eigen::VectorXd& w0) {
  OptimizerState s = vector_start(w0);
  s.dual = psi.grad(w0);
  return s;
}

OptimizerState OptimizerState::factored_start(const Eigen::MatrixXd& U0) {
  OptimizerState s;
  s.U = U0;
  return s;
}

namespace {

Eigen::VectorXd checked_gradient(const Dataset& data, LossKind loss,
                                 const Eigen::VectorXd& w, const std::vector<int>* subset) {
  Eigen::VectorXd g = gradient(data, loss, w, subset);
  if (!g.allFinite()) throw std::runtime_error("optimizer: non-finite gradient");
  return g;
}

}  // namespace

void gd_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
             const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd w_next = s.w - eta * g;
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void momentum_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
                   double beta, double gamma, const std::vector<int>* subset) {
  const Eigen::VectorXd lookahead = s.w + gamma * s.dw_prev;
  const Eigen::VectorXd g = checked_gradient(data, loss, lookahead, subset);
  const Eigen::VectorXd w_next = s.w + beta * s.dw_prev - eta * g;
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void md_step(OptimizerState& s, const Dataset& data, LossKind loss, const Potential& psi,
             double eta, const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd z_next = s.dual - eta * g;
  const Eigen::VectorXd w_next = psi.grad_inverse(z_next);
  psi.require_domain(w_next);
  s.dw_prev = w_next - s.w;
  s.dz_prev = z_next - s.dual;
  s.dual = z_next;
  s.w = w_next;
  ++s.t;
}

void md_constrained_step(OptimizerState& s, const Dataset& data, LossKind loss,
                         const Potential& psi, const AffineConstraint& constraint,
                         double eta, const std::vector<int>* subset) {
  if (constraint.empty()) {
    md_step(s, data, loss, psi, eta, subset);
    return;
  }
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd z_free = s.dual - eta * g;
  const Eigen::VectorXd w_next = bregman_project_affine(psi, z_free, constraint);
  const Eigen::VectorXd z_next = psi.grad(w_next);
  s.dw_prev = w_next - s.w;
  s.dz_prev = z_next - s.dual;
  s.dual = z_next;
  s.w = w_next;
  ++s.t;
}

void md_dual_momentum_step(OptimizerState& s, const Dataset& data, LossKind loss,
                           const Potential& psi, double eta, double beta, double gamma,
                           const std::vector<int>* subset) {
  const Eigen::VectorXd lookahead = s.w + gamma * s.dw_prev;
  psi.require_domain(lookahead);
  const Eigen::VectorXd g = checked_gradient(data, loss, lookahead, subset);
  const Eigen::VectorXd z_next = s.dual + beta * s.dz_prev - eta * g;
  const Eigen::VectorXd w_next = psi.grad_inverse(z_next);
  psi.require_domain(w_next);
  s.dw_prev = w_next - s.w;
  s.dz_prev = z_next - s.dual;
  s.dual = z_next;
  s.w = w_next;
  ++s.t;
}

void md_primal_momentum_step(OptimizerState& s, const Dataset& data, LossKind loss,
                             const Potential& psi, double eta, double beta, double gamma,
                             const std::vector<int>* subset) {
  const Eigen::VectorXd shifted = s.w + beta * s.dw_prev;
  if (!psi.in_domain(shifted)) {
    throw DomainError(
        "primal momentum: shifted iterate left the potential domain (reduce eta)");
  }
  const Eigen::VectorXd lookahead = s.w + gamma * s.dw_prev;
  if (!psi.in_domain(lookahead)) {
    throw DomainError(
        "primal momentum: gradient lookahead left the potential domain (reduce eta)");
  }
  const Eigen::VectorXd g = checked_gradient(data, loss, lookahead, subset);
  const Eigen::VectorXd z_next = psi.grad(shifted) - eta * g;
  const Eigen::VectorXd w_next = psi.grad_inverse(z_next);
  psi.require_domain(w_next);
  s.dw_prev = w_next - s.w;
  s.dz_prev = z_next - s.dual;
  s.dual = z_next;
  s.w = w_next;
  ++s.t;
}

void ngd_step(OptimizerState& s, const Dataset& data, LossKind loss, const Potential& psi,
              double eta, const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd w_next = s.w - eta * psi.hessian_inverse_apply(s.w, g);
  if (!psi.in_domain(w_next)) {
    throw DomainError("ngd: iterate left the potential domain (reduce eta)");
  }
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void sd_step(OptimizerState& s, const Dataset& data, LossKind loss, const NormGeometry& norm,
             double eta, const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd w_next = s.w + eta * norm.duality_map(g);
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void coordinate_step(OptimizerState& s, const Dataset& data, LossKind loss, TieRule rule,
                     double eta, const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  const Eigen::VectorXd w_next = s.w + eta * coordinate_direction(g, rule);
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void adagrad_step(OptimizerState& s, const Dataset& data, LossKind loss, double eta,
                  const AdaGradConfig& cfg, const std::vector<int>* subset) {
  const Eigen::VectorXd g = checked_gradient(data, loss, s.w, subset);
  if (s.g_accum.size() == 0) {
    s.g_accum = cfg.g0.size() > 0 ? cfg.g0 : Eigen::VectorXd::Zero(s.w.size());
  }
  s.g_accum += g.cwiseProduct(g);
  Eigen::VectorXd scaled(s.w.size());
  for (int i = 0; i < s.w.size(); ++i) {
    double gii = s.g_accum[i];
    if (gii <= 0.0) {
      if (cfg.eps_floor > 0.0) {
        gii = cfg.eps_floor;
      } else {
        throw std::runtime_error(
            "adagrad: zero accumulator entry and no epsilon floor configured");
      }
    }
    scaled[i] = g[i] / std::sqrt(gii);
  }
  const Eigen::VectorXd w_next = s.w - eta * scaled;
  s.dw_prev = w_next - s.w;
  s.w = w_next;
  ++s.t;
}

void factored_gd_step(OptimizerState& s, const MatrixDataset& data, LossKind loss,
                      double eta) {
  const Eigen::MatrixXd W = s.U * s.U.transpose();
  const Eigen::MatrixXd G = matrix_gradient(data, loss, W);
  if (!G.allFinite()) throw std::runtime_error("factored gd: non-finite gradient");
  s.U -= eta * (G + G.transpose()) * s.U;
  ++s.t;
}

Eigen::VectorXd bregman_project_affine(const Potential& psi, const Eigen::VectorXd& z,
                                       const AffineConstraint& constraint) {
  const Eigen::MatrixXd& G = constraint.G;
  const Eigen::VectorXd& h = constraint.h;
  const int m = static_cast<int>(G.rows());
  // Minimize phi(mu) = psi*(z + G^T mu) - <mu, h>; its gradient is the
  // constraint residual and its Hessian G Hinv G^T is positive definite.
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
  double phi = psi.conjugate_value(z) /* mu = 0 */;
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd zc = z + G.transpose() * mu;
    const Eigen::VectorXd w = psi.grad_inverse(zc);
    const Eigen::VectorXd resid = G * w - h;
    if (resid.cwiseAbs().maxCoeff() < 1e-13) return w;
    Eigen::MatrixXd J(m, m);
    for (int k = 0; k < m; ++k) {
      J.col(k) = G * psi.hessian_inverse_apply(w, G.row(k).transpose());
    }
    J = 0.5 * (J + J.transpose()).eval();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(J);
    Eigen::VectorXd dir = -ldlt.solve(resid);
    if (!dir.allFinite()) dir = -resid;
    // Backtracking on the dual objective keeps the iteration globally stable.
    double step = 1.0;
    const double slope = resid.dot(dir);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd mu_try = mu + step * dir;
      const double phi_try =
          psi.conjugate_value(z + G.transpose() * mu_try) - mu_try.dot(h);
      if (phi_try <= phi + 1e-4 * step * slope) {
        mu = mu_try;
        phi = phi_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  const Eigen::VectorXd w = psi.grad_inverse(z + G.transpose() * mu);
  if ((G * w - h).cwiseAbs().maxCoeff() < 1e-9) return w;
  throw std::runtime_error("bregman projection: constraint solver did not converge");
}

}  // namespace iblab
