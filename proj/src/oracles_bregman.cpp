#include <Eigen/Dense>
#include <cmath>

#include "iblab/oracles.hpp"

namespace iblab {

SpanBasis::SpanBasis(const Eigen::MatrixXd& rows, double rank_tol) {
  const int d = static_cast<int>(rows.cols());
  if (rows.rows() == 0) {
    basis_.resize(d, 0);
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows.transpose(), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = rank_tol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  basis_ = svd.matrixU().leftCols(rank);
}

Eigen::VectorXd SpanBasis::off_span(const Eigen::VectorXd& v) const {
  if (basis_.cols() == 0) return v;
  return v - basis_ * (basis_.transpose() * v);
}

std::pair<double, double> kkt_residual(const Potential& psi, const Dataset& data,
                                       const Eigen::VectorXd& w0, const Eigen::VectorXd& w) {
  const SpanBasis span(data.features);
  const double stationarity = span.off_span_norm(psi.grad(w) - psi.grad(w0));
  double feasibility = 0.0;
  if (data.n_examples() > 0) {
    feasibility = (data.features * w - data.labels).cwiseAbs().maxCoeff();
  }
  return {stationarity, feasibility};
}

BregmanProjectionResult bregman_projection_affine(const Potential& psi,
                                                  const Eigen::MatrixXd& A,
                                                  const Eigen::VectorXd& b,
                                                  const Eigen::VectorXd& w0) {
  psi.require_domain(w0);
  const int m = static_cast<int>(A.rows());
  const Eigen::VectorXd z0 = psi.grad(w0);

  BregmanProjectionResult out;
  if (m == 0) {
    out.w_star = w0;
    out.dual_coefficients.resize(0);
    return out;
  }

  // Damped Newton on the dual objective phi(nu) = psi*(z0 + A^T nu) - <nu, b>.
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(m);
  const double feas_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  double phi = psi.conjugate_value(z0);
  Eigen::VectorXd w = w0;
  double best_feas = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < 200; ++iter) {
    const Eigen::VectorXd z = z0 + A.transpose() * nu;
    w = psi.grad_inverse(z);
    const Eigen::VectorXd F = A * w - b;
    const double feas = F.cwiseAbs().maxCoeff();
    best_feas = std::min(best_feas, feas);
    if (feas < 1e-12 * feas_scale) break;

    Eigen::MatrixXd J(m, m);
    for (int k = 0; k < m; ++k) {
      J.col(k) = A * psi.hessian_inverse_apply(w, A.row(k).transpose());
    }
    J = 0.5 * (J + J.transpose()).eval();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(J);
    Eigen::VectorXd dir = -ldlt.solve(F);
    if (!dir.allFinite()) dir = -F;

    double step = 1.0;
    const double slope = F.dot(dir);
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const Eigen::VectorXd nu_try = nu + step * dir;
      const double phi_try =
          psi.conjugate_value(z0 + A.transpose() * nu_try) - nu_try.dot(b);
      if (std::isfinite(phi_try) && phi_try <= phi + 1e-4 * step * slope) {
        nu = nu_try;
        phi = phi_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  out.w_star = w;
  out.dual_coefficients = nu;
  out.iterations = iter;
  const SpanBasis span(A);
  out.stationarity_residual = span.off_span_norm(psi.grad(w) - z0);
  out.feasibility_residual = (A * w - b).cwiseAbs().maxCoeff();
  if (out.feasibility_residual > 1e-8 * feas_scale || out.stationarity_residual > 1e-8) {
    throw SolveError("bregman projection did not converge", out.stationarity_residual,
                     out.feasibility_residual);
  }
  return out;
}

BregmanProjectionResult bregman_projection(const Potential& psi, const Dataset& data,
                                           const Eigen::VectorXd& w0) {
  return bregman_projection_affine(psi, data.features, data.labels, w0);
}

}  // namespace iblab
