#include "s2an2/ubp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2an2/rng.hpp"

namespace s2an2 {

const char* activation_name(ActivationKind kind) {
  return kind == ActivationKind::sigmoid ? "sigmoid" : "bipolar";
}

ActivationKind activation_from_name(const std::string& name) {
  if (name == "sigmoid") return ActivationKind::sigmoid;
  if (name == "bipolar") return ActivationKind::bipolar_sigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

double activate(ActivationKind kind, double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return kind == ActivationKind::sigmoid ? s : 2.0 * s - 1.0;
}

double activation_derivative(ActivationKind kind, double a) {
  return kind == ActivationKind::sigmoid ? a * (1.0 - a) : 0.5 * (1.0 - a * a);
}

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

void UbpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("UbpSpec: need at least input and output layers");
  }
  for (std::size_t size : layer_sizes) {
    if (size == 0) throw std::invalid_argument("UbpSpec: zero-size layer");
  }
}

Gradients Gradients::zeros_like(const UbpNetwork& net) {
  Gradients g;
  g.weights.reserve(net.weights.size());
  g.biases.reserve(net.biases.size());
  for (const Matrix& w : net.weights) g.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

std::size_t UbpNetwork::parameter_count() const {
  std::size_t count = 0;
  for (const Matrix& w : weights) count += w.rows * w.cols;
  for (const auto& b : biases) count += b.size();
  return count;
}

void UbpNetwork::validate() const {
  spec.validate();
  const std::size_t n_weight_layers = spec.n_layers() - 1;
  if (weights.size() != n_weight_layers || biases.size() != n_weight_layers) {
    throw std::runtime_error("UbpNetwork: layer count disagrees with spec");
  }
  for (std::size_t l = 0; l < n_weight_layers; ++l) {
    if (weights[l].rows != spec.layer_sizes[l + 1] || weights[l].cols != spec.layer_sizes[l] ||
        weights[l].data.size() != weights[l].rows * weights[l].cols ||
        biases[l].size() != spec.layer_sizes[l + 1]) {
      throw std::runtime_error("UbpNetwork: shape mismatch at layer " + std::to_string(l + 1));
    }
    for (double v : weights[l].data) {
      if (!std::isfinite(v)) throw std::runtime_error("UbpNetwork: non-finite weight");
    }
    for (double v : biases[l]) {
      if (!std::isfinite(v)) throw std::runtime_error("UbpNetwork: non-finite bias");
    }
  }
}

UbpNetwork init_network(const UbpSpec& spec, std::uint64_t seed) {
  spec.validate();
  UbpNetwork net;
  net.spec = spec;
  const std::size_t n_weight_layers = spec.n_layers() - 1;
  net.weights.reserve(n_weight_layers);
  net.biases.reserve(n_weight_layers);
  Rng rng(seed);
  for (std::size_t l = 0; l < n_weight_layers; ++l) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix w(spec.layer_sizes[l + 1], fan_in);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(spec.layer_sizes[l + 1], 0.0);
  }
  return net;
}

void forward_into(const UbpNetwork& net, std::span<const double> input, ForwardTrace& trace) {
  const std::size_t n_layers = net.spec.n_layers();
  if (input.size() != net.input_size()) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                " values, spec expects " + std::to_string(net.input_size()));
  }
  trace.activations.resize(n_layers);
  trace.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const Matrix& w = net.weights[l];
    const std::vector<double>& prev = trace.activations[l];
    std::vector<double>& out = trace.activations[l + 1];
    out.resize(w.rows);
    const ActivationKind kind =
        (l + 2 == n_layers) ? net.spec.output_activation : net.spec.hidden_activation;
    const std::vector<double>& bias = net.biases[l];
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double* wr = w.row(r);
      double sum = bias[r];
      for (std::size_t c = 0; c < w.cols; ++c) sum += wr[c] * prev[c];
      out[r] = activate(kind, sum);
    }
  }
}

ForwardTrace forward(const UbpNetwork& net, std::span<const double> input) {
  ForwardTrace trace;
  forward_into(net, input, trace);
  return trace;
}

std::vector<long double> forward_extended(const UbpNetwork& net,
                                          std::span<const long double> input) {
  const std::size_t n_layers = net.spec.n_layers();
  if (input.size() != net.input_size()) {
    throw std::invalid_argument("forward_extended: input size mismatch");
  }
  std::vector<long double> prev(input.begin(), input.end());
  std::vector<long double> next;
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const Matrix& w = net.weights[l];
    const ActivationKind kind =
        (l + 2 == n_layers) ? net.spec.output_activation : net.spec.hidden_activation;
    next.resize(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double* wr = w.row(r);
      long double sum = net.biases[l][r];
      for (std::size_t c = 0; c < w.cols; ++c) sum += static_cast<long double>(wr[c]) * prev[c];
      const long double s = 1.0L / (1.0L + std::exp(-sum));
      next[r] = kind == ActivationKind::sigmoid ? s : 2.0L * s - 1.0L;
    }
    prev.swap(next);
  }
  return prev;
}

long double mse_extended(const UbpNetwork& net, std::span<const long double> input,
                         std::span<const double> target) {
  const std::vector<long double> output = forward_extended(net, input);
  if (output.size() != target.size() || output.empty()) {
    throw std::invalid_argument("mse_extended: size mismatch");
  }
  long double sum = 0.0L;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const long double d = output[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<long double>(output.size());
}

void backward_into(const UbpNetwork& net, const ForwardTrace& trace,
                   std::span<const double> output_error, Gradients& gradients,
                   std::vector<double>* input_error) {
  const std::size_t n_layers = net.spec.n_layers();
  if (trace.activations.size() != n_layers) {
    throw std::invalid_argument("backward: trace does not match the network spec");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (trace.activations[l].size() != net.spec.layer_sizes[l]) {
      throw std::invalid_argument("backward: trace shape mismatch at layer " + std::to_string(l));
    }
  }
  if (output_error.size() != net.output_size()) {
    throw std::invalid_argument("backward: output_error size mismatch");
  }
  if (gradients.weights.size() != net.weights.size()) {
    gradients = Gradients::zeros_like(net);
  }

  std::vector<double> err(output_error.begin(), output_error.end());
  std::vector<double> delta;
  for (std::size_t l = n_layers - 1; l >= 1; --l) {
    const ActivationKind kind =
        (l == n_layers - 1) ? net.spec.output_activation : net.spec.hidden_activation;
    const std::vector<double>& act = trace.activations[l];
    delta.resize(act.size());
    for (std::size_t i = 0; i < act.size(); ++i) {
      delta[i] = err[i] * activation_derivative(kind, act[i]);
    }
    const Matrix& w = net.weights[l - 1];
    Matrix& dw = gradients.weights[l - 1];
    std::vector<double>& db = gradients.biases[l - 1];
    const std::vector<double>& prev = trace.activations[l - 1];
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      double* dwr = dw.row(r);
      for (std::size_t c = 0; c < w.cols; ++c) dwr[c] = d * prev[c];
      db[r] = d;
    }
    const bool need_upstream = l > 1 || input_error != nullptr;
    if (need_upstream) {
      err.assign(w.cols, 0.0);
      for (std::size_t r = 0; r < w.rows; ++r) {
        const double d = delta[r];
        const double* wr = w.row(r);
        for (std::size_t c = 0; c < w.cols; ++c) err[c] += wr[c] * d;
      }
    }
    if (l == 1) break;
  }
  if (input_error != nullptr) *input_error = std::move(err);
}

BackwardResult backward(const UbpNetwork& net, const ForwardTrace& trace,
                        std::span<const double> output_error) {
  BackwardResult result;
  backward_into(net, trace, output_error, result.gradients, &result.input_error);
  return result;
}

void apply_update(UbpNetwork& net, const Gradients& gradients, Gradients& velocity,
                  double learning_rate, double momentum) {
  if (gradients.weights.size() != net.weights.size() ||
      velocity.weights.size() != net.weights.size()) {
    throw std::invalid_argument("apply_update: layer count mismatch");
  }
  bool finite = true;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (!gradients.weights[l].same_shape(net.weights[l]) ||
        !velocity.weights[l].same_shape(net.weights[l]) ||
        gradients.biases[l].size() != net.biases[l].size() ||
        velocity.biases[l].size() != net.biases[l].size()) {
      throw std::invalid_argument("apply_update: shape mismatch at layer " + std::to_string(l + 1));
    }
    auto& w = net.weights[l].data;
    const auto& g = gradients.weights[l].data;
    auto& v = velocity.weights[l].data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum * v[i] - learning_rate * g[i];
      w[i] += v[i];
      finite &= std::isfinite(w[i]);
    }
    auto& b = net.biases[l];
    const auto& gb = gradients.biases[l];
    auto& vb = velocity.biases[l];
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = momentum * vb[i] - learning_rate * gb[i];
      b[i] += vb[i];
      finite &= std::isfinite(b[i]);
    }
  }
  if (!finite) throw std::runtime_error("apply_update: non-finite result");
}

double mse_loss(std::span<const double> output, std::span<const double> target) {
  if (output.size() != target.size() || output.empty()) {
    throw std::invalid_argument("mse_loss: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(output.size());
}

std::vector<double> mse_loss_gradient(std::span<const double> output,
                                      std::span<const double> target) {
  if (output.size() != target.size() || output.empty()) {
    throw std::invalid_argument("mse_loss_gradient: size mismatch");
  }
  std::vector<double> grad(output.size());
  const double scale = 2.0 / static_cast<double>(output.size());
  for (std::size_t i = 0; i < output.size(); ++i) {
    grad[i] = scale * (output[i] - target[i]);
  }
  return grad;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
  }
  if (max_epochs == 0) throw std::invalid_argument("TrainConfig: max_epochs must be positive");
  if (!(target_mse >= 0.0)) throw std::invalid_argument("TrainConfig: target_mse must be >= 0");
}

GradientCheckReport gradient_check_detailed(UbpNetwork net, std::span<const double> input,
                                            std::span<const double> target, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("gradient_check: eps must be positive");
  const ForwardTrace trace = forward(net, input);
  const BackwardResult analytic =
      backward(net, trace, mse_loss_gradient(trace.output(), target));

  GradientCheckReport report;
  bool first = true;
  const std::vector<long double> probe_input(input.begin(), input.end());
  auto consider = [&](double analytic_value, double* slot, std::string location) {
    const double original = *slot;
    *slot = original + eps;
    const long double loss_plus = mse_extended(net, probe_input, target);
    *slot = original - eps;
    const long double loss_minus = mse_extended(net, probe_input, target);
    *slot = original;
    const double numeric =
        static_cast<double>((loss_plus - loss_minus) / (2.0L * static_cast<long double>(eps)));
    const double rel = relative_error(analytic_value, numeric);
    if (first || rel > report.max_rel_error) {
      first = false;
      report.max_rel_error = rel;
      report.location = std::move(location);
      report.analytic = analytic_value;
      report.numeric = numeric;
    }
  };

  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Matrix& w = net.weights[l];
    for (std::size_t r = 0; r < w.rows; ++r) {
      for (std::size_t c = 0; c < w.cols; ++c) {
        consider(analytic.gradients.weights[l].at(r, c), &w.at(r, c),
                 "W" + std::to_string(l + 1) + "(" + std::to_string(r) + "," +
                     std::to_string(c) + ")");
      }
    }
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      consider(analytic.gradients.biases[l][i], &net.biases[l][i],
               "b" + std::to_string(l + 1) + "(" + std::to_string(i) + ")");
    }
  }
  return report;
}

double gradient_check(const UbpNetwork& net, std::span<const double> input,
                      std::span<const double> target, double eps) {
  return gradient_check_detailed(net, input, target, eps).max_rel_error;
}

}  // namespace s2an2
