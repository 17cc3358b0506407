#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "iblab/dataset.hpp"
#include "iblab/norm.hpp"
#include "iblab/potential.hpp"

namespace iblab {

// Thrown by oracle solvers on non-convergence; carries the best residuals
// reached so the caller can report them.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double stationarity, double feasibility)
      : std::runtime_error(what),
        stationarity_residual(stationarity),
        feasibility_residual(feasibility) {}
  double stationarity_residual;
  double feasibility_residual;
};

// Orthonormal basis of span{x_n} and the projector onto its complement.
class SpanBasis {
 public:
  explicit SpanBasis(const Eigen::MatrixXd& rows, double rank_tol = 1e-10);
  // Component of v orthogonal to the span.
  Eigen::VectorXd off_span(const Eigen::VectorXd& v) const;
  double off_span_norm(const Eigen::VectorXd& v) const { return off_span(v).norm(); }
  int rank() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  Eigen::MatrixXd basis_;  // d x rank, orthonormal columns
};

struct BregmanProjectionResult {
  Eigen::VectorXd w_star;
  Eigen::VectorXd dual_coefficients;  // nu, one per constraint row
  double stationarity_residual = 0.0;
  double feasibility_residual = 0.0;
  int iterations = 0;
};

// argmin_w D_psi(w, w0) subject to A w = b, solved by damped Newton on the
// dual coefficients (the dual Hessian A Hinv A^T is positive definite).
BregmanProjectionResult bregman_projection_affine(const Potential& psi,
                                                  const Eigen::MatrixXd& A,
                                                  const Eigen::VectorXd& b,
                                                  const Eigen::VectorXd& w0);

// Dataset version: constraints <w, x_n> = y_n.
BregmanProjectionResult bregman_projection(const Potential& psi, const Dataset& data,
                                           const Eigen::VectorXd& w0);

// Stationarity (off-span component of grad psi(w) - grad psi(w0)) and
// feasibility (max constraint violation) of a candidate limit point.
std::pair<double, double> kkt_residual(const Potential& psi, const Dataset& data,
                                       const Eigen::VectorXd& w0, const Eigen::VectorXd& w);

// ---- nonnegative least squares ----
struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

// Lawson-Hanson active set; exact at small scale.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// ---- max margin ----
struct MarginCertificate {
  bool separable = false;
  double gamma = 0.0;
  Eigen::VectorXd direction;  // unit norm in the certificate's geometry
  std::vector<int> support;
  Eigen::VectorXd alpha;  // simplex-normalized duals, zero off the support
  bool degenerate = false;
  std::map<std::string, double> residuals;

  std::string to_json_text() const;
};

// Maximum-margin separator w.r.t. an arbitrary norm. Solved as the norm
// minimization over the margin polytope by an interior-point method, with
// an independent quadratic-programming route kept as a cross-check for the
// Euclidean case. Non-separable data yields gamma <= 0 and no certificate.
MarginCertificate max_margin(const NormGeometry& norm, const Dataset& data);

// Dense direction grid + local polish; ground truth at dim <= 3.
struct GridMarginResult {
  double gamma = 0.0;
  Eigen::VectorXd direction;
  bool degenerate = false;  // a second, distant direction comes within 1e-3 of gamma
};
GridMarginResult margin_grid_search(const NormGeometry& norm, const Dataset& data,
                                    double resolution = 1e-3);

// Indices attaining the minimum margin of `direction` within relative
// tolerance 1e-6.
std::vector<int> support_vectors(const Dataset& data, const Eigen::VectorXd& direction,
                                 double rel_tol = 1e-6);

// min over alpha >= 0 of || z - sum_{n in S} alpha_n y_n x_n ||_2.
double nonneg_span_residual(const Dataset& data, const std::vector<int>& support,
                            const Eigen::VectorXd& z);

// ---- factorized setting ----
// First-order stationarity certificate for the factorized classifier: with
// Ubar = U/||U||_F and Zbar the normalized negative gradient at U U^T,
// returns || Ubar - Zbar Ubar / ||Zbar Ubar||_F ||_F.
double factored_stationarity_residual(const Eigen::MatrixXd& U, const MatrixDataset& data);
// Variant against an explicitly supplied gradient direction.
double factored_stationarity_residual_vs(const Eigen::MatrixXd& U,
                                         const Eigen::MatrixXd& Zbar);

struct NuclearMarginCertificate {
  bool separable = false;
  double gamma = 0.0;
  Eigen::MatrixXd W_star;  // trace-minimal PSD classifier with unit margins
  Eigen::VectorXd alpha;
  bool degenerate_face = false;
  double complementary_slackness = 0.0;
  double stationarity_residual = 0.0;
};

// Trace-minimal PSD separator (the nuclear norm of a PSD matrix is its
// trace): min tr(W) s.t. W >= 0, y_n <W, X_n> >= 1. Projected subgradient
// with eigenvalue clipping; brute force validates it at d = 2 in tests.
NuclearMarginCertificate nuclear_margin(const MatrixDataset& data);

}  // namespace iblab
