#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace s2an2 {

enum class ActivationKind { sigmoid, bipolar_sigmoid };

const char* activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);

/// sigmoid(x) = 1 / (1 + e^-x), range (0, 1).
/// bipolar_sigmoid(x) = 2 * sigmoid(x) - 1, range (-1, 1).
double activate(ActivationKind kind, double x);

/// Derivative written in terms of the activation value a:
/// sigmoid' = a(1 - a), bipolar' = (1 - a^2) / 2.
double activation_derivative(ActivationKind kind, double a);

/// |a - b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

/// Dense row-major matrix. Rows index units of a layer, columns index units
/// of the previous layer.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

struct UbpSpec {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  ActivationKind hidden_activation = ActivationKind::sigmoid;
  ActivationKind output_activation = ActivationKind::sigmoid;

  std::size_t n_layers() const { return layer_sizes.size(); }
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  void validate() const;
  bool operator==(const UbpSpec&) const = default;
};

struct UbpNetwork;

/// Per-layer gradient (or velocity) storage, shape-congruent with a network.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const UbpNetwork& net);
};

/// One feed-forward network. weights[l] maps layer l to layer l+1 and has
/// layer_sizes[l+1] rows by layer_sizes[l] columns.
struct UbpNetwork {
  UbpSpec spec;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t input_size() const { return spec.input_size(); }
  std::size_t output_size() const { return spec.output_size(); }
  std::size_t parameter_count() const;
  void validate() const;  // shapes agree with spec and all values are finite
};

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawn row-major
/// layer by layer from Rng(seed); biases zero. Bit-identical per (spec, seed).
UbpNetwork init_network(const UbpSpec& spec, std::uint64_t seed);

/// Activations of every layer for one input; activations[0] is the input.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;

  const std::vector<double>& output() const { return activations.back(); }
};

ForwardTrace forward(const UbpNetwork& net, std::span<const double> input);
void forward_into(const UbpNetwork& net, std::span<const double> input, ForwardTrace& trace);

/// Forward pass carried out in extended precision. The finite-difference
/// probes use it so roundoff on the numeric side stays far below the
/// comparison tolerance even where gradients are attenuated to ~1e-8.
std::vector<long double> forward_extended(const UbpNetwork& net,
                                          std::span<const long double> input);

/// MSE of forward_extended against the target, in extended precision.
long double mse_extended(const UbpNetwork& net, std::span<const long double> input,
                         std::span<const double> target);

struct BackwardResult {
  Gradients gradients;
  std::vector<double> input_error;
};

/// Standard backprop through a stored trace. output_error is
/// dLoss/d(output activations); input_error is dLoss/d(input), the value
/// handed upstream when networks are chained.
BackwardResult backward(const UbpNetwork& net, const ForwardTrace& trace,
                        std::span<const double> output_error);

/// Allocation-free variant; pass input_error = nullptr to skip the input
/// gradient. gradients is resized on first use.
void backward_into(const UbpNetwork& net, const ForwardTrace& trace,
                   std::span<const double> output_error, Gradients& gradients,
                   std::vector<double>* input_error);

/// velocity <- momentum * velocity - lr * gradients;
/// weights  <- weights + velocity.  momentum = 0 is plain SGD.
void apply_update(UbpNetwork& net, const Gradients& gradients, Gradients& velocity,
                  double learning_rate, double momentum);

/// (1/n) * sum (output - target)^2
double mse_loss(std::span<const double> output, std::span<const double> target);

/// dMSE/d(output) = 2 (output - target) / n
std::vector<double> mse_loss_gradient(std::span<const double> output,
                                      std::span<const double> target);

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  std::size_t max_epochs = 500;
  double target_mse = 0.01;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;

  void validate() const;
};

struct GradientCheckReport {
  double max_rel_error = 0.0;
  std::string location;  // worst entry, e.g. "W1(2,0)" or "b2(1)"
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Central-difference check of backward() against mse_loss over every weight
/// and bias. Returns the maximum relative error.
double gradient_check(const UbpNetwork& net, std::span<const double> input,
                      std::span<const double> target, double eps);
GradientCheckReport gradient_check_detailed(UbpNetwork net, std::span<const double> input,
                                            std::span<const double> target, double eps);

}  // namespace s2an2
