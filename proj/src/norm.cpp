#include "iblab/norm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace iblab {

namespace {

double lp_norm(const Eigen::VectorXd& v, double r) {
  if (std::isinf(r)) return v.cwiseAbs().maxCoeff();
  if (r == 1.0) return v.cwiseAbs().sum();
  if (r == 2.0) return v.norm();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / scale, r);
  return scale * std::pow(acc, 1.0 / r);
}

}  // namespace

Eigen::VectorXd coordinate_direction(const Eigen::VectorXd& g, TieRule rule) {
  const int d = static_cast<int>(g.size());
  Eigen::VectorXd dw = Eigen::VectorXd::Zero(d);
  const double gmax = g.cwiseAbs().maxCoeff();
  if (gmax == 0.0) return dw;
  if (rule == TieRule::FirstIndex) {
    for (int j = 0; j < d; ++j) {
      if (std::abs(g[j]) >= gmax - 1e-12) {
        dw[j] = -g[j];
        return dw;
      }
    }
  }
  int ties = 0;
  for (int j = 0; j < d; ++j) {
    if (std::abs(g[j]) >= gmax - 1e-12) ++ties;
  }
  for (int j = 0; j < d; ++j) {
    if (std::abs(g[j]) >= gmax - 1e-12) dw[j] = -g[j] / ties;
  }
  return dw;
}

NormGeometry NormGeometry::lp(double p, int dim) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm: p must be >= 1");
  NormGeometry n(Kind::Lp, dim);
  n.p_ = p;
  if (p == 1.0) {
    n.q_ = kInf;
  } else if (std::isinf(p)) {
    n.q_ = 1.0;
  } else {
    n.q_ = p / (p - 1.0);
  }
  return n;
}

NormGeometry NormGeometry::lp_rational(long num, long den, int dim) {
  if (den <= 0 || num <= 0) throw std::invalid_argument("lp norm: bad rational exponent");
  NormGeometry n = lp(static_cast<double>(num) / static_cast<double>(den), dim);
  n.rational_ = std::make_pair(num, den);
  return n;
}

NormGeometry NormGeometry::quadratic(Eigen::MatrixXd D) {
  if (D.rows() != D.cols()) throw std::invalid_argument("quadratic norm: D must be square");
  if (!D.isApprox(D.transpose(), 1e-12)) {
    throw std::invalid_argument("quadratic norm: D must be symmetric");
  }
  NormGeometry n(Kind::Quadratic, static_cast<int>(D.rows()));
  n.llt_.compute(D);
  if (n.llt_.info() != Eigen::Success) {
    throw std::invalid_argument("quadratic norm: D must be positive definite");
  }
  n.D_ = std::move(D);
  return n;
}

double NormGeometry::value(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("norm: dimension mismatch");
  if (kind_ == Kind::Quadratic) return std::sqrt(v.dot(D_ * v));
  return lp_norm(v, p_);
}

double NormGeometry::dual_value(const Eigen::VectorXd& g) const {
  if (g.size() != dim_) throw std::invalid_argument("norm: dimension mismatch");
  if (kind_ == Kind::Quadratic) return std::sqrt(g.dot(llt_.solve(g)));
  return lp_norm(g, q_);
}

Eigen::VectorXd NormGeometry::duality_map(const Eigen::VectorXd& g) const {
  if (g.size() != dim_) throw std::invalid_argument("norm: dimension mismatch");
  if (!g.allFinite()) throw std::invalid_argument("duality map: non-finite gradient");
  const int d = dim_;
  if (kind_ == Kind::Quadratic) {
    return -llt_.solve(g);
  }
  if (p_ == 1.0) {
    // Scale the coordinate direction so that ||dw||_1 = ||g||_inf.
    Eigen::VectorXd dir = coordinate_direction(g, tie_rule);
    const double l1 = dir.cwiseAbs().sum();
    const double ginf = g.cwiseAbs().maxCoeff();
    if (l1 == 0.0) return dir;
    return dir * (ginf / l1);
  }
  if (std::isinf(p_)) {
    // Sign-vector map: dw = -||g||_1 sign(g).
    const double g1 = g.cwiseAbs().sum();
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
      if (g[i] > 0) dw[i] = -g1;
      else if (g[i] < 0) dw[i] = g1;
    }
    return dw;
  }
  if (p_ == 2.0) return -g;
  // dw_i = -sign(g_i) |g_i|^{q-1} ||g||_q^{2-q}
  const double gq = lp_norm(g, q_);
  Eigen::VectorXd dw = Eigen::VectorXd::Zero(d);
  if (gq == 0.0) return dw;
  const double tail = std::pow(gq, 2.0 - q_);
  for (int i = 0; i < d; ++i) {
    if (g[i] == 0.0) continue;
    const double mag = std::pow(std::abs(g[i]), q_ - 1.0) * tail;
    dw[i] = (g[i] > 0 ? -mag : mag);
  }
  return dw;
}

std::string NormGeometry::describe() const {
  if (kind_ == Kind::Quadratic) return "quadratic";
  if (rational_) {
    return "l" + std::to_string(rational_->first) + "/" + std::to_string(rational_->second);
  }
  if (std::isinf(p_)) return "linf";
  if (p_ == 1.0) return "l1";
  if (p_ == 2.0) return "l2";
  return "lp(p=" + std::to_string(p_) + ")";
}

}  // namespace iblab
