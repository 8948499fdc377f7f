#pragma once

#include <string>
#include <string_view>

namespace infoplane {

enum class ActivationTag { tanh, relu, abs, prelu, elu, softplus, centered_softplus, swish };

/// Hidden-layer nonlinearity. `param` is the PReLU initial slope, the ELU
/// alpha or the Swish beta; unused by the other kinds. For PReLU the slope
/// actually applied is a trained per-layer parameter, so callers pass it
/// explicitly to `activate` / `activate_derivative`.
struct ActivationKind {
  ActivationTag tag = ActivationTag::relu;
  double param = 0.0;

  static ActivationKind tanh() { return {ActivationTag::tanh, 0.0}; }
  static ActivationKind relu() { return {ActivationTag::relu, 0.0}; }
  static ActivationKind abs() { return {ActivationTag::abs, 0.0}; }
  static ActivationKind prelu(double slope = 0.25) { return {ActivationTag::prelu, slope}; }
  static ActivationKind elu(double alpha = 1.0) { return {ActivationTag::elu, alpha}; }
  static ActivationKind softplus() { return {ActivationTag::softplus, 0.0}; }
  static ActivationKind centered_softplus() { return {ActivationTag::centered_softplus, 0.0}; }
  static ActivationKind swish(double beta = 1.0) { return {ActivationTag::swish, beta}; }

  bool has_param() const noexcept {
    return tag == ActivationTag::prelu || tag == ActivationTag::elu || tag == ActivationTag::swish;
  }
  bool operator==(const ActivationKind&) const = default;
};

/// Evaluates the activation. `slope` overrides `kind.param` for PReLU.
double activate(const ActivationKind& kind, double x, double slope);
inline double apply_activation(const ActivationKind& kind, double x) { return activate(kind, x, kind.param); }

/// d activate / dx. At the kinks of relu/abs/prelu the right derivative is used.
double activate_derivative(const ActivationKind& kind, double x, double slope);

/// d prelu(x; a) / da; zero for every other kind.
double activate_slope_derivative(const ActivationKind& kind, double x);

std::string activation_name(ActivationTag tag);
/// Inverse of activation_name; throws ArgumentError on unknown names.
ActivationTag parse_activation_tag(std::string_view name);
/// "relu", "prelu(0.25)", "swish(1)" ...
std::string describe(const ActivationKind& kind);

double softplus(double x) noexcept;
double sigmoid(double x) noexcept;

}  // namespace infoplane
