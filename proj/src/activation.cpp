#include "infoplane/activation.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

constexpr std::array<std::pair<ActivationTag, std::string_view>, 8> kNames{{
    {ActivationTag::tanh, "tanh"},
    {ActivationTag::relu, "relu"},
    {ActivationTag::abs, "abs"},
    {ActivationTag::prelu, "prelu"},
    {ActivationTag::elu, "elu"},
    {ActivationTag::softplus, "softplus"},
    {ActivationTag::centered_softplus, "centered_softplus"},
    {ActivationTag::swish, "swish"},
}};

}  // namespace

// log(1 + e^x) without overflow for large |x|.
double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activate(const ActivationKind& kind, double x, double slope) {
  switch (kind.tag) {
    case ActivationTag::tanh:
      return std::tanh(x);
    case ActivationTag::relu:
      return x > 0.0 ? x : 0.0;
    case ActivationTag::abs:
      return std::abs(x);
    case ActivationTag::prelu:
      return x > 0.0 ? x : slope * x;
    case ActivationTag::elu:
      return x > 0.0 ? x : kind.param * std::expm1(x);
    case ActivationTag::softplus:
      return softplus(x);
    case ActivationTag::centered_softplus:
      return softplus(x) - std::numbers::ln2;
    case ActivationTag::swish:
      return x * sigmoid(kind.param * x);
  }
  return 0.0;
}

double activate_derivative(const ActivationKind& kind, double x, double slope) {
  switch (kind.tag) {
    case ActivationTag::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationTag::relu:
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationTag::abs:
      return x >= 0.0 ? 1.0 : -1.0;
    case ActivationTag::prelu:
      return x > 0.0 ? 1.0 : slope;
    case ActivationTag::elu:
      return x > 0.0 ? 1.0 : kind.param * std::exp(x);
    case ActivationTag::softplus:
    case ActivationTag::centered_softplus:
      return sigmoid(x);
    case ActivationTag::swish: {
      const double s = sigmoid(kind.param * x);
      return s + kind.param * x * s * (1.0 - s);
    }
  }
  return 0.0;
}

double activate_slope_derivative(const ActivationKind& kind, double x) {
  if (kind.tag != ActivationTag::prelu) return 0.0;
  return x > 0.0 ? 0.0 : x;
}

std::string activation_name(ActivationTag tag) {
  for (const auto& [t, name] : kNames)
    if (t == tag) return std::string(name);
  return "unknown";
}

ActivationTag parse_activation_tag(std::string_view name) {
  for (const auto& [t, n] : kNames)
    if (n == name) return t;
  throw ArgumentError("unknown activation \"" + std::string(name) + "\"");
}

std::string describe(const ActivationKind& kind) {
  std::ostringstream out;
  out << activation_name(kind.tag);
  if (kind.has_param()) out << '(' << kind.param << ')';
  return out.str();
}

}  // namespace infoplane
