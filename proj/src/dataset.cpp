#include "iblab/dataset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace iblab {

namespace {

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void check_dim(int expected, const Eigen::VectorXd& w, const char* what) {
  if (w.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

Eigen::MatrixXd Dataset::signed_features() const {
  return labels.asDiagonal() * features;
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("dataset: feature/label count mismatch");
  }
  if (classification) {
    for (int n = 0; n < labels.size(); ++n) {
      if (labels[n] != 1.0 && labels[n] != -1.0) {
        throw std::invalid_argument("classification dataset: labels must be +-1");
      }
    }
  }
}

void MatrixDataset::validate() const {
  if (static_cast<int>(features.size()) != labels.size()) {
    throw std::invalid_argument("matrix dataset: feature/label count mismatch");
  }
  for (const auto& X : features) {
    if (X.rows() != X.cols() || X.rows() != dim()) {
      throw std::invalid_argument("matrix dataset: all X_n must share square shape");
    }
  }
  for (int n = 0; n < labels.size(); ++n) {
    if (labels[n] != 1.0 && labels[n] != -1.0) {
      throw std::invalid_argument("matrix dataset: labels must be +-1");
    }
  }
}

double objective(const Dataset& data, LossKind loss, const Eigen::VectorXd& w,
                 bool* saturated) {
  check_dim(data.dim(), w, "objective");
  if (saturated) *saturated = false;
  const Eigen::VectorXd preds = data.features * w;
  double total = 0.0;
  for (int n = 0; n < data.n_examples(); ++n) {
    total += loss_value(loss, preds[n], data.labels[n]);
  }
  if (total > kLossSaturationCap) {
    if (saturated) *saturated = true;
    total = kLossSaturationCap;
  }
  return total;
}

Eigen::VectorXd gradient(const Dataset& data, LossKind loss, const Eigen::VectorXd& w,
                         const std::vector<int>* subset) {
  check_dim(data.dim(), w, "gradient");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(data.dim());
  auto accumulate = [&](int n) {
    const double u = data.features.row(n).dot(w);
    g += loss_derivative(loss, u, data.labels[n]) * data.features.row(n).transpose();
  };
  if (subset) {
    for (int n : *subset) {
      if (n < 0 || n >= data.n_examples()) {
        throw std::invalid_argument("gradient: subset index out of range");
      }
      accumulate(n);
    }
  } else {
    for (int n = 0; n < data.n_examples(); ++n) accumulate(n);
  }
  return g;
}

double matrix_objective(const MatrixDataset& data, LossKind loss, const Eigen::MatrixXd& W,
                        bool* saturated) {
  if (W.rows() != data.dim() || W.cols() != data.dim()) {
    throw std::invalid_argument("matrix_objective: shape mismatch");
  }
  if (saturated) *saturated = false;
  double total = 0.0;
  for (int n = 0; n < data.n_examples(); ++n) {
    const double u = W.cwiseProduct(data.features[n]).sum();
    total += loss_value(loss, u, data.labels[n]);
  }
  if (total > kLossSaturationCap) {
    if (saturated) *saturated = true;
    total = kLossSaturationCap;
  }
  return total;
}

Eigen::MatrixXd matrix_gradient(const MatrixDataset& data, LossKind loss,
                                const Eigen::MatrixXd& W) {
  if (W.rows() != data.dim() || W.cols() != data.dim()) {
    throw std::invalid_argument("matrix_gradient: shape mismatch");
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(data.dim(), data.dim());
  for (int n = 0; n < data.n_examples(); ++n) {
    const double u = W.cwiseProduct(data.features[n]).sum();
    G += loss_derivative(loss, u, data.labels[n]) * data.features[n];
  }
  return G;
}

namespace {

// Shared shift-stable reduction: given per-example log-loss values and
// log|l'| values (all derivatives are negative for monotone losses), produce
// log(sum loss) and gradient/loss weights.
struct StableTerms {
  double log_loss;
  Eigen::VectorXd weights;  // -l'_n / L >= 0
};

StableTerms reduce_stable(const Eigen::VectorXd& log_losses,
                          const Eigen::VectorXd& log_abs_derivs) {
  const double shift = log_losses.maxCoeff();
  double acc = 0.0;
  for (int n = 0; n < log_losses.size(); ++n) acc += std::exp(log_losses[n] - shift);
  StableTerms out;
  out.log_loss = shift + std::log(acc);
  out.weights.resize(log_losses.size());
  for (int n = 0; n < log_losses.size(); ++n) {
    out.weights[n] = std::exp(log_abs_derivs[n] - out.log_loss);
  }
  return out;
}

StableEval stable_from_margins(const Eigen::VectorXd& margins, LossKind loss,
                               const Eigen::MatrixXd& signed_rows) {
  const int N = static_cast<int>(margins.size());
  Eigen::VectorXd log_losses(N), log_abs_derivs(N);
  for (int n = 0; n < N; ++n) {
    const double m = margins[n];
    if (loss == LossKind::Exponential) {
      log_losses[n] = -m;
      log_abs_derivs[n] = -m;
    } else if (loss == LossKind::Logistic) {
      // l = log(1 + e^-m); for large m, l ~ e^-m so log l ~ -m.
      const double sp = softplus(-m);
      log_losses[n] = (m > 36.0) ? -m : std::log(sp);
      log_abs_derivs[n] = -softplus(m);
    } else {
      throw std::invalid_argument("stable_eval: strict monotone losses only");
    }
  }
  const StableTerms terms = reduce_stable(log_losses, log_abs_derivs);
  StableEval ev;
  ev.margins = margins;
  ev.min_margin = margins.minCoeff();
  ev.log_loss = terms.log_loss;
  ev.grad_ratio = -(signed_rows.transpose() * terms.weights);
  return ev;
}

}  // namespace

StableEval stable_eval(const Dataset& data, LossKind loss, const Eigen::VectorXd& w) {
  check_dim(data.dim(), w, "stable_eval");
  const Eigen::MatrixXd signed_rows = data.signed_features();
  return stable_from_margins(signed_rows * w, loss, signed_rows);
}

StableEval stable_eval_matrix(const MatrixDataset& data, LossKind loss,
                              const Eigen::MatrixXd& W) {
  const int N = data.n_examples();
  const int d = data.dim();
  Eigen::MatrixXd signed_rows(N, d * d);
  Eigen::VectorXd margins(N);
  for (int n = 0; n < N; ++n) {
    const Eigen::MatrixXd sx = data.labels[n] * data.features[n];
    signed_rows.row(n) = Eigen::Map<const Eigen::VectorXd>(sx.data(), d * d).transpose();
    margins[n] = W.cwiseProduct(sx).sum();
  }
  return stable_from_margins(margins, loss, signed_rows);
}

Dataset builtin_dataset(const std::string& name) {
  Dataset d;
  if (name == "example1" || name == "example2") {
    d.features.resize(1, 2);
    d.features << 1.0, 2.0;
    d.labels.resize(1);
    d.labels << 1.0;
    return d;
  }
  if (name == "example3") {
    d.features.resize(2, 3);
    d.features << 1.0, 1.0, 1.0,
                  1.0, 2.0, 0.0;
    d.labels.resize(2);
    d.labels << 1.0, 10.0;
    return d;
  }
  throw std::invalid_argument("unknown builtin dataset: " + name);
}

Dataset random_realizable_regression(std::uint64_t seed, int dim, int n_examples) {
  if (n_examples >= dim) {
    throw std::invalid_argument("realizable-underdetermined requires N < d");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset d;
  // Resample mildly ill-conditioned draws; oracle accuracy degrades with
  // tiny singular values and nothing in the study needs them.
  for (int attempt = 0; attempt < 64; ++attempt) {
    d.features.resize(n_examples, dim);
    for (int i = 0; i < n_examples; ++i)
      for (int j = 0; j < dim; ++j) d.features(i, j) = gauss(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.features);
    if (svd.singularValues().minCoeff() > 0.3) break;
  }
  Eigen::VectorXd w_true(dim);
  for (int j = 0; j < dim; ++j) w_true[j] = std::abs(gauss(rng)) + 0.2;
  d.labels = d.features * w_true;
  return d;
}

Dataset random_separable_classification(std::uint64_t seed, int dim, int n_examples,
                                        double margin_buffer) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w_sep(dim);
  for (int j = 0; j < dim; ++j) w_sep[j] = gauss(rng);
  w_sep.normalize();
  Dataset d;
  d.classification = true;
  d.features.resize(n_examples, dim);
  d.labels.resize(n_examples);
  int filled = 0;
  while (filled < n_examples) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = gauss(rng);
    const double a = w_sep.dot(x);
    if (std::abs(a) < margin_buffer) continue;  // keep a real margin
    d.features.row(filled) = x.transpose();
    d.labels[filled] = a > 0 ? 1.0 : -1.0;
    ++filled;
  }
  return d;
}

MatrixDataset random_psd_separable(std::uint64_t seed, int dim, int n_examples,
                                   double margin_buffer) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = gauss(rng);
  Eigen::MatrixXd W_sep = A * A.transpose();
  W_sep /= W_sep.norm();
  MatrixDataset d;
  d.labels.resize(n_examples);
  while (static_cast<int>(d.features.size()) < n_examples) {
    Eigen::MatrixXd X(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) X(i, j) = gauss(rng);
    X = 0.5 * (X + X.transpose()).eval();
    const double a = W_sep.cwiseProduct(X).sum();
    if (std::abs(a) < margin_buffer) continue;
    d.labels[static_cast<int>(d.features.size())] = a > 0 ? 1.0 : -1.0;
    d.features.push_back(X);
  }
  return d;
}

MatrixDataset random_matrix_regression(std::uint64_t seed, int dim, int n_examples) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = gauss(rng);
  const Eigen::MatrixXd W_true = A * A.transpose();
  MatrixDataset d;
  d.labels.resize(n_examples);
  for (int n = 0; n < n_examples; ++n) {
    Eigen::MatrixXd X(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) X(i, j) = gauss(rng);
    X = 0.5 * (X + X.transpose()).eval();
    d.features.push_back(X);
    d.labels[n] = W_true.cwiseProduct(X).sum();
  }
  return d;
}

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

Dataset dataset_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("kind", "vector") != "vector") {
    throw std::invalid_argument("dataset JSON: expected kind \"vector\"");
  }
  Dataset d;
  const auto& feats = j.at("features");
  const auto& labels = j.at("labels");
  const int N = static_cast<int>(feats.size());
  if (N == 0) throw std::invalid_argument("dataset JSON: empty features");
  const int dim = static_cast<int>(feats[0].size());
  d.features.resize(N, dim);
  for (int n = 0; n < N; ++n) {
    if (static_cast<int>(feats[n].size()) != dim) {
      throw std::invalid_argument("dataset JSON: ragged feature rows");
    }
    for (int k = 0; k < dim; ++k) d.features(n, k) = feats[n][k].get<double>();
  }
  d.labels.resize(N);
  if (static_cast<int>(labels.size()) != N) {
    throw std::invalid_argument("dataset JSON: label count mismatch");
  }
  for (int n = 0; n < N; ++n) d.labels[n] = labels[n].get<double>();
  d.classification = j.value("classification", false);
  d.validate();
  return d;
}

std::string dataset_to_json_text(const Dataset& data) {
  json j;
  j["kind"] = "vector";
  json feats = json::array();
  for (int n = 0; n < data.n_examples(); ++n) {
    feats.push_back(vector_to_json(data.features.row(n).transpose()));
  }
  j["features"] = feats;
  j["labels"] = vector_to_json(data.labels);
  if (data.classification) j["classification"] = true;
  return j.dump();
}

MatrixDataset matrix_dataset_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("kind", "") != "matrix") {
    throw std::invalid_argument("dataset JSON: expected kind \"matrix\"");
  }
  MatrixDataset d;
  const auto& feats = j.at("features");
  const auto& labels = j.at("labels");
  for (const auto& m : feats) {
    const int rows = static_cast<int>(m.size());
    Eigen::MatrixXd X(rows, rows);
    for (int i = 0; i < rows; ++i) {
      if (static_cast<int>(m[i].size()) != rows) {
        throw std::invalid_argument("dataset JSON: matrices must be square");
      }
      for (int k = 0; k < rows; ++k) X(i, k) = m[i][k].get<double>();
    }
    d.features.push_back(X);
  }
  d.labels.resize(static_cast<int>(labels.size()));
  for (int n = 0; n < d.labels.size(); ++n) d.labels[n] = labels[n].get<double>();
  d.validate();
  return d;
}

std::string matrix_dataset_to_json_text(const MatrixDataset& data) {
  json j;
  j["kind"] = "matrix";
  json feats = json::array();
  for (const auto& X : data.features) {
    json rows = json::array();
    for (int i = 0; i < X.rows(); ++i) {
      rows.push_back(vector_to_json(X.row(i).transpose()));
    }
    feats.push_back(rows);
  }
  j["features"] = feats;
  j["labels"] = vector_to_json(data.labels);
  return j.dump();
}

Dataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return dataset_from_json_text(buf.str());
}

}  // namespace iblab
