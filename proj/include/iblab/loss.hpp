#pragma once

#include <string>

namespace iblab {

// Loss families behave fundamentally differently under unregularized
// optimization: unique-finite-root losses admit attainable minimizers,
// strict-monotone losses drive the iterates to infinity on separable data.
enum class LossKind { Squared, Exponential, Logistic };
enum class LossFamily { UniqueFiniteRoot, StrictMonotone };

// Values and derivatives saturate at this cap instead of overflowing.
inline constexpr double kLossSaturationCap = 1e300;

LossFamily loss_family(LossKind kind);

// Pointwise loss l(u, y) of a prediction u against label y.
double loss_value(LossKind kind, double prediction, double label);

// Derivative of l with respect to the prediction.
double loss_derivative(LossKind kind, double prediction, double label);

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

}  // namespace iblab
