#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iblab/loss.hpp"

namespace iblab {

// Labeled feature vectors. Rows of `features` are the examples x_n.
// For classification datasets every label is +-1.
struct Dataset {
  Eigen::MatrixXd features;  // N x d
  Eigen::VectorXd labels;    // N
  bool classification = false;

  int n_examples() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }

  // Signed feature matrix with rows y_n * x_n.
  Eigen::MatrixXd signed_features() const;

  // Largest dual-norm helper for step-size policies wants max_n ||x_n||_*;
  // kept generic here as the plain row access.
  Eigen::VectorXd example(int n) const { return features.row(n).transpose(); }

  void validate() const;  // throws std::invalid_argument on bad shape/labels
};

// Labeled d x d matrices for the factorized setting.
struct MatrixDataset {
  std::vector<Eigen::MatrixXd> features;
  Eigen::VectorXd labels;

  int n_examples() const { return static_cast<int>(features.size()); }
  int dim() const { return features.empty() ? 0 : static_cast<int>(features[0].rows()); }

  void validate() const;
};

// Empirical objective sum_n l(<w, x_n>, y_n). Saturates at the cap instead of
// returning non-finite values; `saturated` reports whether capping occurred.
double objective(const Dataset& data, LossKind loss, const Eigen::VectorXd& w,
                 bool* saturated = nullptr);

// Full or sub-sampled gradient sum_{n in subset} l'(<w,x_n>, y_n) x_n.
// The result always lies in the span of the participating features.
// An empty subset yields the zero vector.
Eigen::VectorXd gradient(const Dataset& data, LossKind loss, const Eigen::VectorXd& w,
                         const std::vector<int>* subset = nullptr);

double matrix_objective(const MatrixDataset& data, LossKind loss, const Eigen::MatrixXd& W,
                        bool* saturated = nullptr);
Eigen::MatrixXd matrix_gradient(const MatrixDataset& data, LossKind loss,
                                const Eigen::MatrixXd& W);

// Shift-stable evaluation for strict monotone losses where the raw loss
// underflows long before the run ends. grad_ratio is grad(L)/L, which stays
// well scaled however small L becomes.
struct StableEval {
  double log_loss = 0.0;
  double min_margin = 0.0;
  Eigen::VectorXd margins;     // y_n <w, x_n>
  Eigen::VectorXd grad_ratio;  // gradient / loss
  double loss() const { return std::exp(log_loss); }
};

StableEval stable_eval(const Dataset& data, LossKind loss, const Eigen::VectorXd& w);
StableEval stable_eval_matrix(const MatrixDataset& data, LossKind loss,
                              const Eigen::MatrixXd& W);

// ---- named datasets ----
// "example1"/"example2": single example x=[1,2], y=1 (regression).
// "example3": {([1,1,1], 1), ([1,2,0], 10)} (regression).
Dataset builtin_dataset(const std::string& name);

// ---- seeded random generators ----
// Signed features are drawn i.i.d. standard Gaussian so the usual genericity
// assumptions (unique support sets, full-rank submatrices) hold almost surely.

// Realizable underdetermined regression: N < d, y = X w_true with w_true > 0
// elementwise so the entropy-feasible region is nonempty.
Dataset random_realizable_regression(std::uint64_t seed, int dim, int n_examples);

// Linearly separable classification with an enforced margin buffer.
Dataset random_separable_classification(std::uint64_t seed, int dim, int n_examples,
                                        double margin_buffer = 0.15);

// Symmetric matrix dataset separable by a positive semidefinite classifier.
MatrixDataset random_psd_separable(std::uint64_t seed, int dim, int n_examples,
                                   double margin_buffer = 0.1);

// Matrix regression targets realizable by a PSD ground truth.
MatrixDataset random_matrix_regression(std::uint64_t seed, int dim, int n_examples);

// ---- JSON I/O ----
// {"features": [[...],...], "labels": [...], "kind": "vector"|"matrix"}
Dataset dataset_from_json_text(const std::string& text);
std::string dataset_to_json_text(const Dataset& data);
MatrixDataset matrix_dataset_from_json_text(const std::string& text);
std::string matrix_dataset_to_json_text(const MatrixDataset& data);
Dataset load_dataset_file(const std::string& path);

}  // namespace iblab
