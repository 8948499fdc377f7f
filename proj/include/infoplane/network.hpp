#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "infoplane/activation.hpp"
#include "infoplane/dataset.hpp"
#include "infoplane/matrix.hpp"
#include "infoplane/trace.hpp"

namespace infoplane {

enum class SnapshotSamples { full, train };

struct NetworkConfig {
  std::vector<std::size_t> layer_sizes{12, 10, 7, 5, 4, 3, 2};
  ActivationKind activation = ActivationKind::relu();
  double l2_lambda = 0.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 512;
  std::size_t epochs = 8000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> snapshot_epochs = default_snapshot_epochs(8000);
  SnapshotSamples snapshot_samples = SnapshotSamples::full;

  /// Approximately log-spaced, strictly increasing, always containing 0 and
  /// `epochs`. Returns every epoch when fewer than `count` exist.
  static std::vector<std::size_t> default_snapshot_epochs(std::size_t epochs, std::size_t count = 60);

  /// Throws ArgumentError when sizes, rates or the snapshot schedule are invalid.
  void validate() const;
  std::size_t layer_count() const noexcept { return layer_sizes.size() - 1; }
};

struct LayerParams {
  Matrix weights;               // fan_out x fan_in
  std::vector<double> biases;   // fan_out
  double slope = 0.0;           // PReLU negative slope; inert for other kinds
};

using Parameters = std::vector<LayerParams>;

struct NetworkState {
  ActivationKind activation;
  Parameters params;
  Parameters first_moment;
  Parameters second_moment;
  std::uint64_t step = 0;

  std::size_t layer_count() const noexcept { return params.size(); }
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Parameters shaped like `like`, all zero.
Parameters zeros_like(const Parameters& like);

/// Truncated-Gaussian weights (std sqrt(2/(fan_in+fan_out)), redrawn beyond
/// two standard deviations), zero biases and moments.
NetworkState initialize(const NetworkConfig& config);

/// Layer outputs for every layer: hidden activations then the softmax
/// output. Throws NumericalError on a non-finite value.
std::vector<Matrix> forward(const NetworkState& state, const Matrix& inputs);

/// Mean cross-entropy (nats) plus l2_lambda * sum of squared hidden-layer weights.
double loss(const NetworkState& state, const Matrix& inputs, std::span<const std::uint8_t> labels,
            double l2_lambda);

/// Exact gradient of `loss`, shaped like the parameters.
Parameters backward(const NetworkState& state, const Matrix& inputs, std::span<const std::uint8_t> labels,
                    double l2_lambda);

/// Bias-corrected ADAM update, in place.
void adam_update(NetworkState& state, const Parameters& gradients, double learning_rate,
                 const AdamHyper& hyper = {});
NetworkState adam_step(NetworkState state, const Parameters& gradients, double learning_rate,
                       const AdamHyper& hyper = {});

struct TrainMetrics {
  std::vector<EpochMetrics> epochs;
};

double accuracy(const Matrix& output, std::span<const std::uint8_t> labels);

struct TrainResult {
  ActivationTrace trace;
  TrainMetrics metrics;
  NetworkState final_state;
};

/// Called after every finished epoch; lets callers inject faults or observe progress.
using EpochHook = std::function<void(std::size_t epoch, NetworkState& state)>;

TrainResult train(const NetworkConfig& config, const Dataset& dataset, const Split& split,
                  const EpochHook& hook = {});

}  // namespace infoplane
