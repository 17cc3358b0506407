#include "iblab/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace iblab {

namespace {

double saturate(double v) {
  if (v > kLossSaturationCap) return kLossSaturationCap;
  if (v < -kLossSaturationCap) return -kLossSaturationCap;
  return v;
}

// log(1 + exp(x)) without overflow for large |x|.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

LossFamily loss_family(LossKind kind) {
  switch (kind) {
    case LossKind::Squared:
      return LossFamily::UniqueFiniteRoot;
    case LossKind::Exponential:
    case LossKind::Logistic:
      return LossFamily::StrictMonotone;
  }
  throw std::invalid_argument("unknown loss kind");
}

double loss_value(LossKind kind, double prediction, double label) {
  switch (kind) {
    case LossKind::Squared: {
      const double r = prediction - label;
      return saturate(r * r);
    }
    case LossKind::Exponential:
      return saturate(std::exp(-prediction * label));
    case LossKind::Logistic:
      return softplus(-prediction * label);
  }
  throw std::invalid_argument("unknown loss kind");
}

double loss_derivative(LossKind kind, double prediction, double label) {
  switch (kind) {
    case LossKind::Squared:
      return saturate(2.0 * (prediction - label));
    case LossKind::Exponential:
      return saturate(-label * std::exp(-prediction * label));
    case LossKind::Logistic:
      // -y / (1 + exp(u*y)), evaluated without overflow.
      return -label * std::exp(-softplus(prediction * label));
  }
  throw std::invalid_argument("unknown loss kind");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Squared:
      return "squared";
    case LossKind::Exponential:
      return "exponential";
    case LossKind::Logistic:
      return "logistic";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "squared") return LossKind::Squared;
  if (name == "exponential") return LossKind::Exponential;
  if (name == "logistic") return LossKind::Logistic;
  throw std::invalid_argument("unknown loss kind: " + name);
}

}  // namespace iblab
