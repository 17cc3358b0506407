#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace iblab {

// Tie handling for the l1 steepest-descent direction when several partial
// derivatives attain the maximum magnitude.
enum class TieRule { Average, FirstIndex };

// Convex combination of -g[j] e_j over the coordinates maximizing |g[j]|.
// Coordinates within 1e-12 of the max count as tied.
Eigen::VectorXd coordinate_direction(const Eigen::VectorXd& g, TieRule rule);

// A norm together with its dual norm and the steepest-descent duality map:
// the returned step dw satisfies <dw, -g> = ||dw||^2 = ||g||_*^2.
class NormGeometry {
 public:
  enum class Kind { Lp, Quadratic };

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // p in [1, inf]; pass kInf for the max norm.
  static NormGeometry lp(double p, int dim);
  // Exact-rational construction so "4/3" round-trips through configs.
  static NormGeometry lp_rational(long num, long den, int dim);
  static NormGeometry quadratic(Eigen::MatrixXd D);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  double dual_p() const { return q_; }
  const std::optional<std::pair<long, long>>& rational_p() const { return rational_; }
  const Eigen::MatrixXd& quadratic_matrix() const { return D_; }

  double value(const Eigen::VectorXd& v) const;
  double dual_value(const Eigen::VectorXd& g) const;
  Eigen::VectorXd duality_map(const Eigen::VectorXd& g) const;

  TieRule tie_rule = TieRule::Average;  // l1 only

  std::string describe() const;

 private:
  NormGeometry(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  double p_ = 2.0;
  double q_ = 2.0;
  std::optional<std::pair<long, long>> rational_;
  Eigen::MatrixXd D_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace iblab
