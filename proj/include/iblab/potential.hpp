#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <stdexcept>
#include <string>

namespace iblab {

// Thrown when a point falls outside a potential's domain (e.g. a
// non-positive coordinate under the entropy potential). Domain violations
// are rejected, never clipped.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strongly convex potential psi with link map (gradient), inverse link,
// Hessian-inverse action, Bregman divergence and convex conjugate.
class Potential {
 public:
  enum class Kind { SquaredEuclidean, Entropy, Quadratic, SquaredLp };

  static Potential squared_euclidean(int dim);
  static Potential entropy(int dim);
  // D must be symmetric positive definite.
  static Potential quadratic(Eigen::MatrixXd D);
  // psi(w) = 1/2 ||w||_p^2 with p restricted to (1, 2].
  static Potential squared_lp(double p, int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  const Eigen::MatrixXd& quadratic_matrix() const { return D_; }

  bool in_domain(const Eigen::VectorXd& w) const;
  void require_domain(const Eigen::VectorXd& w) const;  // throws DomainError

  double value(const Eigen::VectorXd& w) const;
  // Link map grad psi; invertible by strong convexity.
  Eigen::VectorXd grad(const Eigen::VectorXd& w) const;
  Eigen::VectorXd grad_inverse(const Eigen::VectorXd& z) const;
  // Solves (hessian of psi at w) v = g.
  Eigen::VectorXd hessian_inverse_apply(const Eigen::VectorXd& w,
                                        const Eigen::VectorXd& g) const;
  double bregman(const Eigen::VectorXd& w, const Eigen::VectorXd& w_ref) const;
  // Convex conjugate psi*(z); used as the merit function in dual solvers.
  double conjugate_value(const Eigen::VectorXd& z) const;

  // Minimizer of psi over its domain (where the link map vanishes).
  Eigen::VectorXd domain_argmin() const;

  std::string describe() const;

 private:
  Potential(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  double p_ = 2.0;  // squared-lp only
  double q_ = 2.0;  // conjugate exponent
  Eigen::MatrixXd D_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace iblab
