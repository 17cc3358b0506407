#include "iblab/potential.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace iblab {

namespace {

// Gradient of 1/2 ||v||_r^2: sign(v_i) |v_i|^{r-1} ||v||_r^{2-r}.
Eigen::VectorXd lp_grad_map(const Eigen::VectorXd& v, double r) {
  const int d = static_cast<int>(v.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += std::pow(std::abs(v[i]) / scale, r);
  const double norm = scale * std::pow(acc, 1.0 / r);
  for (int i = 0; i < d; ++i) {
    if (v[i] == 0.0) continue;
    const double mag = std::pow(std::abs(v[i]), r - 1.0) * std::pow(norm, 2.0 - r);
    out[i] = (v[i] > 0 ? mag : -mag);
  }
  return out;
}

double lp_norm(const Eigen::VectorXd& v, double r) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / scale, r);
  return scale * std::pow(acc, 1.0 / r);
}

}  // namespace

Potential Potential::squared_euclidean(int dim) {
  return Potential(Kind::SquaredEuclidean, dim);
}

Potential Potential::entropy(int dim) { return Potential(Kind::Entropy, dim); }

Potential Potential::quadratic(Eigen::MatrixXd D) {
  if (D.rows() != D.cols()) throw std::invalid_argument("quadratic potential: D must be square");
  if (!D.isApprox(D.transpose(), 1e-12)) {
    throw std::invalid_argument("quadratic potential: D must be symmetric");
  }
  Potential p(Kind::Quadratic, static_cast<int>(D.rows()));
  p.llt_.compute(D);
  if (p.llt_.info() != Eigen::Success) {
    throw std::invalid_argument("quadratic potential: D must be positive definite");
  }
  p.D_ = std::move(D);
  return p;
}

Potential Potential::squared_lp(double p, int dim) {
  if (!(p > 1.0 && p <= 2.0)) {
    throw std::invalid_argument("squared-lp potential: p must lie in (1, 2]");
  }
  Potential out(Kind::SquaredLp, dim);
  out.p_ = p;
  out.q_ = p / (p - 1.0);
  return out;
}

bool Potential::in_domain(const Eigen::VectorXd& w) const {
  if (w.size() != dim_) return false;
  if (kind_ == Kind::Entropy) return (w.array() > 0.0).all();
  return true;
}

void Potential::require_domain(const Eigen::VectorXd& w) const {
  if (w.size() != dim_) throw std::invalid_argument("potential: dimension mismatch");
  if (!in_domain(w)) {
    throw DomainError("entropy potential: point has non-positive coordinate");
  }
}

double Potential::value(const Eigen::VectorXd& w) const {
  require_domain(w);
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return 0.5 * w.squaredNorm();
    case Kind::Entropy: {
      double acc = 0.0;
      for (int i = 0; i < w.size(); ++i) acc += w[i] * std::log(w[i]) - w[i];
      return acc;
    }
    case Kind::Quadratic:
      return 0.5 * w.dot(D_ * w);
    case Kind::SquaredLp: {
      const double n = lp_norm(w, p_);
      return 0.5 * n * n;
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd Potential::grad(const Eigen::VectorXd& w) const {
  require_domain(w);
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return w;
    case Kind::Entropy:
      return w.array().log().matrix();
    case Kind::Quadratic:
      return D_ * w;
    case Kind::SquaredLp:
      return lp_grad_map(w, p_);
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd Potential::grad_inverse(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw std::invalid_argument("potential: dimension mismatch");
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return z;
    case Kind::Entropy:
      return z.array().exp().matrix();
    case Kind::Quadratic:
      return llt_.solve(z);
    case Kind::SquaredLp:
      return lp_grad_map(z, q_);
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd Potential::hessian_inverse_apply(const Eigen::VectorXd& w,
                                                 const Eigen::VectorXd& g) const {
  require_domain(w);
  if (g.size() != dim_) throw std::invalid_argument("potential: dimension mismatch");
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return g;
    case Kind::Entropy:
      // Hessian is diag(1/w_i).
      return w.cwiseProduct(g);
    case Kind::Quadratic:
      return llt_.solve(g);
    case Kind::SquaredLp: {
      // Hessian = (p-1) s^{2-p} diag(|w|^{p-2}) + (2-p) s^{2-2p} m m^T
      // with s = ||w||_p and m_i = sign(w_i)|w_i|^{p-1}. Inverted via
      // Sherman-Morrison on the diagonal part; coordinates at zero get a
      // zero inverse-diagonal entry, which is the correct limit for p < 2.
      const double s = lp_norm(w, p_);
      if (s == 0.0) {
        throw DomainError("squared-lp hessian is degenerate at the origin");
      }
      const int d = dim_;
      Eigen::VectorXd b(d), m(d);
      for (int i = 0; i < d; ++i) {
        const double a = std::abs(w[i]);
        b[i] = std::pow(a, 2.0 - p_) * std::pow(s, p_ - 2.0) / (p_ - 1.0);
        m[i] = (w[i] == 0.0) ? 0.0 : ((w[i] > 0 ? 1.0 : -1.0) * std::pow(a, p_ - 1.0));
      }
      const double c = (2.0 - p_) * std::pow(s, 2.0 - 2.0 * p_);
      const Eigen::VectorXd bg = b.cwiseProduct(g);
      if (c == 0.0) return bg;  // p == 2
      const Eigen::VectorXd bm = b.cwiseProduct(m);
      const double denom = 1.0 + c * m.dot(bm);
      return bg - (c * m.dot(bg) / denom) * bm;
    }
  }
  throw std::logic_error("unreachable");
}

double Potential::bregman(const Eigen::VectorXd& w, const Eigen::VectorXd& w_ref) const {
  require_domain(w);
  require_domain(w_ref);
  return value(w) - value(w_ref) - grad(w_ref).dot(w - w_ref);
}

double Potential::conjugate_value(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw std::invalid_argument("potential: dimension mismatch");
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return 0.5 * z.squaredNorm();
    case Kind::Entropy:
      return z.array().exp().sum();
    case Kind::Quadratic:
      return 0.5 * z.dot(llt_.solve(z));
    case Kind::SquaredLp: {
      const double n = lp_norm(z, q_);
      return 0.5 * n * n;
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd Potential::domain_argmin() const {
  if (kind_ == Kind::Entropy) return Eigen::VectorXd::Ones(dim_);
  return Eigen::VectorXd::Zero(dim_);
}

std::string Potential::describe() const {
  switch (kind_) {
    case Kind::SquaredEuclidean:
      return "squared-euclidean";
    case Kind::Entropy:
      return "entropy";
    case Kind::Quadratic:
      return "quadratic";
    case Kind::SquaredLp:
      return "squared-lp(p=" + std::to_string(p_) + ")";
  }
  return "?";
}

}  // namespace iblab
