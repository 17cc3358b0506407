#include "iblab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iblab {

namespace {

using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Eigen::VectorXd rk4_step(const Rhs& rhs, const Eigen::VectorXd& w, double h) {
  const Eigen::VectorXd k1 = rhs(w);
  const Eigen::VectorXd k2 = rhs(w + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(w + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(w + h * k3);
  return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FlowResult integrate_flow(const Rhs& rhs,
                          const std::function<bool(const Eigen::VectorXd&)>& in_domain,
                          const std::function<double(const Eigen::VectorXd&)>& loss_of,
                          const Eigen::VectorXd& start, const FlowOptions& opts) {
  FlowResult out;
  Eigen::VectorXd w = start;
  double t = 0.0;
  double h = opts.h_init;
  std::size_t next_sample = 0;

  if (!in_domain(w)) throw DomainError("flow: start outside domain");

  auto maybe_sample = [&](double t_now, const Eigen::VectorXd& w_now) {
    while (next_sample < opts.sample_times.size() &&
           opts.sample_times[next_sample] <= t_now) {
      out.samples.emplace_back(opts.sample_times[next_sample], w_now);
      ++next_sample;
    }
  };
  maybe_sample(0.0, w);

  const long max_steps = 50'000'000;
  for (long step = 0; step < max_steps; ++step) {
    if (loss_of(w) <= opts.loss_stop) {
      out.converged = true;
      break;
    }
    if (t >= opts.t_max) break;

    // One full step vs two half steps; the difference estimates the local
    // error of the fourth-order scheme (denominator 15 from Richardson).
    bool ok = true;
    Eigen::VectorXd w_full, w_half;
    try {
      w_full = rk4_step(rhs, w, h);
      w_half = rk4_step(rhs, rk4_step(rhs, w, 0.5 * h), 0.5 * h);
      ok = w_full.allFinite() && w_half.allFinite() && in_domain(w_half);
    } catch (const DomainError&) {
      ok = false;
    }
    double err = ok ? (w_full - w_half).cwiseAbs().maxCoeff() / 15.0
                    : std::numeric_limits<double>::infinity();
    const double scale = 1.0 + w.cwiseAbs().maxCoeff();
    if (ok && err <= opts.local_tol * scale) {
      // Fifth-order local extrapolation of the two estimates.
      w = w_half + (w_half - w_full) / 15.0;
      if (!in_domain(w)) {
        throw DomainError("flow: trajectory left the domain at t=" + std::to_string(t));
      }
      t += h;
      ++out.steps_accepted;
      maybe_sample(t, w);
      const double grow = std::pow(opts.local_tol * scale / std::max(err, 1e-300), 0.2);
      h *= std::clamp(0.9 * grow, 1.0, 4.0);
    } else {
      ++out.steps_rejected;
      if (!ok) {
        h *= 0.25;
      } else {
        const double shrink = std::pow(opts.local_tol * scale / err, 0.25);
        h *= std::clamp(0.9 * shrink, 0.1, 0.9);
      }
      if (h < 1e-16) {
        throw DomainError("flow: step size underflow at t=" + std::to_string(t));
      }
    }
  }
  out.end = w;
  out.t_end = t;
  return out;
}

FlowResult integrate_mirror_flow(const Potential& psi, const Dataset& data, LossKind loss,
                                 const Eigen::VectorXd& start, const FlowOptions& opts) {
  auto rhs = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return -psi.hessian_inverse_apply(w, gradient(data, loss, w));
  };
  auto domain = [&](const Eigen::VectorXd& w) { return psi.in_domain(w); };
  auto loss_of = [&](const Eigen::VectorXd& w) { return objective(data, loss, w); };
  return integrate_flow(rhs, domain, loss_of, start, opts);
}

FlowResult integrate_steepest_flow(const NormGeometry& norm, const Dataset& data,
                                   LossKind loss, const Eigen::VectorXd& start,
                                   const FlowOptions& opts) {
  auto rhs = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return norm.duality_map(gradient(data, loss, w));
  };
  auto domain = [&](const Eigen::VectorXd&) { return true; };
  auto loss_of = [&](const Eigen::VectorXd& w) { return objective(data, loss, w); };
  return integrate_flow(rhs, domain, loss_of, start, opts);
}

}  // namespace iblab
