#include "infoplane/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "infoplane/config_io.hpp"
#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

struct ForwardCache {
  std::vector<Matrix> pre;   // W·prev + b
  std::vector<Matrix> post;  // activation (softmax on the last layer)
};

void check_finite(const Matrix& m, int layer, const char* what) {
  for (double v : m.values()) {
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what, layer);
  }
}

ForwardCache run_forward(const NetworkState& state, const Matrix& inputs) {
  const std::size_t batch = inputs.rows();
  const std::size_t layers = state.layer_count();
  ForwardCache cache;
  cache.pre.reserve(layers);
  cache.post.reserve(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    const LayerParams& p = state.params[k];
    const Matrix& prev = k == 0 ? inputs : cache.post[k - 1];
    const std::size_t fan_out = p.weights.rows();
    const std::size_t fan_in = p.weights.cols();
    if (prev.cols() != fan_in) throw ArgumentError("layer " + std::to_string(k) + " input width mismatch");

    Matrix z(batch, fan_out);
    for (std::size_t i = 0; i < batch; ++i) {
      auto x = prev.row(i);
      for (std::size_t o = 0; o < fan_out; ++o) {
        auto w = p.weights.row(o);
        double acc = p.biases[o];
        for (std::size_t j = 0; j < fan_in; ++j) acc += w[j] * x[j];
        z(i, o) = acc;
      }
    }
    check_finite(z, static_cast<int>(k), "pre-activation");

    Matrix a(batch, fan_out);
    if (k + 1 == layers) {
      for (std::size_t i = 0; i < batch; ++i) {
        auto zi = z.row(i);
        const double top = *std::max_element(zi.begin(), zi.end());
        double total = 0.0;
        for (std::size_t o = 0; o < fan_out; ++o) total += (a(i, o) = std::exp(zi[o] - top));
        for (std::size_t o = 0; o < fan_out; ++o) a(i, o) /= total;
      }
    } else {
      for (std::size_t i = 0; i < z.size(); ++i) a.values()[i] = activate(state.activation, z.values()[i], p.slope);
    }
    check_finite(a, static_cast<int>(k), "activation");
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(a));
  }
  return cache;
}

double l2_penalty(const NetworkState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < state.layer_count(); ++k)
    for (double w : state.params[k].weights.values()) total += w * w;
  return total;
}

double cross_entropy(const Matrix& logits, std::span<const std::uint8_t> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto z = logits.row(i);
    const double top = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - top);
    total += top + std::log(s) - z[labels[i]];
  }
  return logits.rows() == 0 ? 0.0 : total / static_cast<double>(logits.rows());
}

std::seed_seq seed_stream(std::uint64_t seed, std::uint32_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
}

}  // namespace

std::vector<std::size_t> NetworkConfig::default_snapshot_epochs(std::size_t epochs, std::size_t count) {
  std::vector<std::size_t> out;
  if (epochs + 1 <= count) {
    out.resize(epochs + 1);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.push_back(0);
  // count-1 points spread log-uniformly over [1, epochs]; each point is
  // pushed past its predecessor and capped so the remaining ones still fit.
  const double top = std::log(static_cast<double>(epochs));
  const std::size_t points = count - 1;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    auto e = static_cast<std::size_t>(std::llround(std::exp(t * top)));
    e = std::max(e, out.back() + 1);
    e = std::min(e, epochs - (points - 1 - i));
    out.push_back(e);
  }
  out.back() = epochs;
  return out;
}

void NetworkConfig::validate() const {
  if (layer_sizes.size() < 2) throw ArgumentError("layer_sizes needs at least an input and an output layer");
  for (auto n : layer_sizes)
    if (n == 0) throw ArgumentError("layer sizes must be positive");
  if (layer_sizes.back() != 2) throw ArgumentError("output layer must have 2 softmax units");
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) throw ArgumentError("l2_lambda must be nonnegative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ArgumentError("learning_rate must be positive");
  if (batch_size == 0) throw ArgumentError("batch_size must be positive");
  for (std::size_t i = 0; i < snapshot_epochs.size(); ++i) {
    if (snapshot_epochs[i] > epochs) throw ArgumentError("snapshot epoch beyond the final epoch");
    if (i > 0 && snapshot_epochs[i] <= snapshot_epochs[i - 1])
      throw ArgumentError("snapshot_epochs must be strictly increasing");
  }
  if (activation.tag == ActivationTag::elu && !(activation.param > 0.0))
    throw ArgumentError("elu alpha must be positive");
}

Parameters zeros_like(const Parameters& like) {
  Parameters out;
  out.reserve(like.size());
  for (const auto& p : like) out.push_back({Matrix(p.weights.rows(), p.weights.cols()), std::vector<double>(p.biases.size()), 0.0});
  return out;
}

NetworkState initialize(const NetworkConfig& config) {
  config.validate();
  auto seq = seed_stream(config.seed, 0);
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  NetworkState state;
  state.activation = config.activation;
  for (std::size_t k = 0; k < config.layer_count(); ++k) {
    const std::size_t fan_in = config.layer_sizes[k];
    const std::size_t fan_out = config.layer_sizes[k + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
    LayerParams p{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0), 0.0};
    for (double& w : p.weights.values()) {
      double s;
      do {
        s = normal(rng);
      } while (std::abs(s) > 2.0);
      w = s * stddev;
    }
    if (config.activation.tag == ActivationTag::prelu && k + 1 < config.layer_count()) p.slope = config.activation.param;
    state.params.push_back(std::move(p));
  }
  state.first_moment = zeros_like(state.params);
  state.second_moment = zeros_like(state.params);
  return state;
}

std::vector<Matrix> forward(const NetworkState& state, const Matrix& inputs) {
  return run_forward(state, inputs).post;
}

double loss(const NetworkState& state, const Matrix& inputs, std::span<const std::uint8_t> labels, double l2_lambda) {
  auto cache = run_forward(state, inputs);
  return cross_entropy(cache.pre.back(), labels) + l2_lambda * l2_penalty(state);
}

Parameters backward(const NetworkState& state, const Matrix& inputs, std::span<const std::uint8_t> labels,
                    double l2_lambda) {
  if (labels.size() != inputs.rows()) throw ArgumentError("label count does not match batch size");
  const auto cache = run_forward(state, inputs);
  const std::size_t batch = inputs.rows();
  const std::size_t layers = state.layer_count();
  Parameters grad = zeros_like(state.params);
  if (batch == 0) return grad;

  // Softmax + cross-entropy residual.
  Matrix delta = cache.post.back();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    delta(i, labels[i]) -= 1.0;
    for (double& d : delta.row(i)) d *= inv_batch;
  }

  for (std::size_t k = layers; k-- > 0;) {
    const LayerParams& p = state.params[k];
    const Matrix& prev = k == 0 ? inputs : cache.post[k - 1];
    const std::size_t fan_out = p.weights.rows();
    const std::size_t fan_in = p.weights.cols();
    LayerParams& g = grad[k];
    for (std::size_t i = 0; i < batch; ++i) {
      auto d = delta.row(i);
      auto x = prev.row(i);
      for (std::size_t o = 0; o < fan_out; ++o) {
        g.biases[o] += d[o];
        auto gw = g.weights.row(o);
        for (std::size_t j = 0; j < fan_in; ++j) gw[j] += d[o] * x[j];
      }
    }
    if (k + 1 < layers && l2_lambda != 0.0) {
      auto w = p.weights.values();
      auto gw = g.weights.values();
      for (std::size_t n = 0; n < w.size(); ++n) gw[n] += 2.0 * l2_lambda * w[n];
    }
    if (k == 0) break;

    // Propagate into layer k-1.
    const Matrix& pre = cache.pre[k - 1];
    const double slope = state.params[k - 1].slope;
    Matrix next(batch, fan_in);
    double slope_grad = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      auto d = delta.row(i);
      for (std::size_t j = 0; j < fan_in; ++j) {
        double upstream = 0.0;
        for (std::size_t o = 0; o < fan_out; ++o) upstream += d[o] * p.weights(o, j);
        const double z = pre(i, j);
        next(i, j) = upstream * activate_derivative(state.activation, z, slope);
        slope_grad += upstream * activate_slope_derivative(state.activation, z);
      }
    }
    grad[k - 1].slope = slope_grad;
    delta = std::move(next);
  }
  return grad;
}

void adam_update(NetworkState& state, const Parameters& gradients, double learning_rate, const AdamHyper& hyper) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);
  auto update = [&](double& param, double& m, double& v, double g) {
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    param -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  };
  for (std::size_t k = 0; k < state.params.size(); ++k) {
    auto& p = state.params[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto& g = gradients[k];
    for (std::size_t n = 0; n < p.weights.size(); ++n)
      update(p.weights.values()[n], m.weights.values()[n], v.weights.values()[n], g.weights.values()[n]);
    for (std::size_t n = 0; n < p.biases.size(); ++n) update(p.biases[n], m.biases[n], v.biases[n], g.biases[n]);
    update(p.slope, m.slope, v.slope, g.slope);
  }
}

NetworkState adam_step(NetworkState state, const Parameters& gradients, double learning_rate, const AdamHyper& hyper) {
  adam_update(state, gradients, learning_rate, hyper);
  return state;
}

double accuracy(const Matrix& output, std::span<const std::uint8_t> labels) {
  if (output.rows() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < output.rows(); ++i) {
    const auto predicted = output(i, 1) > output(i, 0) ? 1U : 0U;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(output.rows());
}

TrainResult train(const NetworkConfig& config, const Dataset& dataset, const Split& split, const EpochHook& hook) {
  config.validate();
  if (dataset.inputs.cols() != config.layer_sizes.front())
    throw ArgumentError("dataset width does not match the input layer");
  if (split.train_indices.empty()) throw ArgumentError("empty training split");

  auto labels_of = [&](std::span<const std::size_t> idx) {
    std::vector<std::uint8_t> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = dataset.labels[idx[i]];
    return out;
  };
  const Matrix train_x = select_rows(dataset.inputs, std::span<const std::size_t>(split.train_indices));
  const auto train_y = labels_of(split.train_indices);
  const Matrix test_x = select_rows(dataset.inputs, std::span<const std::size_t>(split.test_indices));
  const auto test_y = labels_of(split.test_indices);
  const bool full = config.snapshot_samples == SnapshotSamples::full;
  const Matrix& snap_x = full ? dataset.inputs : train_x;

  TrainResult result;
  auto& manifest = result.trace.manifest;
  manifest.layer_sizes.assign(config.layer_sizes.begin() + 1, config.layer_sizes.end());
  manifest.epochs = config.snapshot_epochs;
  manifest.config = config_to_json(config);
  manifest.dataset_fingerprint = dataset.fingerprint();
  manifest.labels = full ? dataset.labels : train_y;

  NetworkState state = initialize(config);
  auto seq = seed_stream(config.seed, 1);
  std::mt19937_64 shuffle_rng(seq);
  std::vector<std::size_t> order(train_x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto record = [&](std::size_t epoch) {
    Snapshot snap{epoch, forward(state, snap_x)};
    const auto train_cache = run_forward(state, train_x);
    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = cross_entropy(train_cache.pre.back(), train_y);
    metrics.train_accuracy = accuracy(train_cache.post.back(), train_y);
    metrics.test_accuracy = test_x.rows() ? accuracy(forward(state, test_x).back(), test_y) : 0.0;
    result.trace.snapshots.push_back(std::move(snap));
    result.metrics.epochs.push_back(metrics);
  };

  std::size_t next_snapshot = 0;
  for (std::size_t epoch = 0;; ++epoch) {
    try {
      if (next_snapshot < config.snapshot_epochs.size() && config.snapshot_epochs[next_snapshot] == epoch) {
        record(epoch);
        ++next_snapshot;
      }
      if (epoch == config.epochs) break;

      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t stop = std::min(order.size(), start + config.batch_size);
        std::span<const std::size_t> batch_idx(order.data() + start, stop - start);
        const Matrix batch_x = select_rows(train_x, batch_idx);
        std::vector<std::uint8_t> batch_y(batch_idx.size());
        for (std::size_t i = 0; i < batch_idx.size(); ++i) batch_y[i] = train_y[batch_idx[i]];
        const auto grads = backward(state, batch_x, batch_y, config.l2_lambda);
        adam_update(state, grads, config.learning_rate);
      }
      if (hook) hook(epoch + 1, state);
    } catch (const NumericalError& e) {
      throw NumericalError(e.detail() + " during epoch " + std::to_string(epoch), e.layer());
    }
  }
  manifest.metrics = result.metrics.epochs;
  result.final_state = std::move(state);
  return result;
}

}  // namespace infoplane
