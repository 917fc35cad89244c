#include "s2an2/s2an2.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "s2an2/rng.hpp"

namespace s2an2 {

std::size_t class_code_bits(std::size_t n_classes) {
  if (n_classes < 2) throw std::invalid_argument("class_code_bits: need at least 2 classes");
  std::size_t bits = 1;
  while ((std::size_t{1} << bits) < n_classes) ++bits;
  return bits;
}

std::vector<int> encode_class(std::size_t k, std::size_t n_bits) {
  if (n_bits == 0 || n_bits >= 64) throw std::invalid_argument("encode_class: bad bit count");
  if (k >= (std::size_t{1} << n_bits)) {
    throw std::invalid_argument("encode_class: class " + std::to_string(k) +
                                " does not fit in " + std::to_string(n_bits) + " bits");
  }
  std::vector<int> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    bits[i] = static_cast<int>((k >> (n_bits - 1 - i)) & 1u);
  }
  return bits;
}

std::vector<double> class_code_targets(std::size_t k, std::size_t n_bits) {
  const std::vector<int> bits = encode_class(k, n_bits);
  std::vector<double> target(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) target[i] = static_cast<double>(bits[i]);
  return target;
}

std::size_t decode_class(std::span<const double> output, std::size_t n_classes) {
  const std::size_t n_bits = class_code_bits(n_classes);
  if (output.size() != n_bits) {
    throw std::invalid_argument("decode_class: output size does not match the code width");
  }
  std::size_t best = 0;
  double best_dist = 0.0;
  for (std::size_t k = 0; k < n_classes; ++k) {
    double dist = 0.0;
    for (std::size_t i = 0; i < n_bits; ++i) {
      const double bit = static_cast<double>((k >> (n_bits - 1 - i)) & 1u);
      const double d = output[i] - bit;
      dist += d * d;
    }
    if (k == 0 || dist < best_dist) {
      best = k;
      best_dist = dist;
    }
  }
  return best;
}

S2an2Spec S2an2Spec::make(std::size_t n_features, std::size_t n_classes,
                          std::vector<std::size_t> class_hidden,
                          std::vector<std::size_t> integrator_hidden) {
  S2an2Spec spec;
  spec.n_features = n_features;
  spec.n_classes = n_classes;
  spec.class_ubp_spec.layer_sizes.push_back(n_features);
  for (std::size_t h : class_hidden) spec.class_ubp_spec.layer_sizes.push_back(h);
  spec.class_ubp_spec.layer_sizes.push_back(1);
  spec.class_ubp_spec.hidden_activation = ActivationKind::sigmoid;
  spec.class_ubp_spec.output_activation = ActivationKind::bipolar_sigmoid;

  spec.integrator_spec.layer_sizes.push_back(n_classes);
  for (std::size_t h : integrator_hidden) spec.integrator_spec.layer_sizes.push_back(h);
  spec.integrator_spec.layer_sizes.push_back(class_code_bits(n_classes));
  spec.integrator_spec.hidden_activation = ActivationKind::sigmoid;
  spec.integrator_spec.output_activation = ActivationKind::sigmoid;
  spec.validate();
  return spec;
}

void S2an2Spec::validate() const {
  if (n_features == 0) throw std::invalid_argument("S2an2Spec: n_features must be positive");
  if (n_classes < 2) throw std::invalid_argument("S2an2Spec: need at least 2 classes");
  class_ubp_spec.validate();
  integrator_spec.validate();
  if (class_ubp_spec.input_size() != n_features) {
    throw std::invalid_argument("S2an2Spec: class UBP input size must equal n_features");
  }
  if (class_ubp_spec.output_size() != 1) {
    throw std::invalid_argument("S2an2Spec: class UBPs have exactly one output node");
  }
  if (class_ubp_spec.output_activation != ActivationKind::bipolar_sigmoid) {
    throw std::invalid_argument("S2an2Spec: class UBP output activation must be bipolar");
  }
  if (integrator_spec.input_size() != n_classes) {
    throw std::invalid_argument("S2an2Spec: integrator input size must equal n_classes");
  }
  if (integrator_spec.output_size() != n_bits()) {
    throw std::invalid_argument("S2an2Spec: integrator output size must equal the code width");
  }
  if (integrator_spec.output_activation != ActivationKind::sigmoid) {
    throw std::invalid_argument("S2an2Spec: integrator output activation must be sigmoid");
  }
}

std::size_t S2an2Model::parameter_count() const {
  std::size_t count = integrator.parameter_count();
  for (const UbpNetwork& net : class_ubps) count += net.parameter_count();
  return count;
}

void S2an2Model::validate() const {
  spec.validate();
  if (class_ubps.size() != spec.n_classes) {
    throw std::runtime_error("S2an2Model: class UBP count disagrees with spec");
  }
  for (const UbpNetwork& net : class_ubps) {
    if (!(net.spec == spec.class_ubp_spec)) {
      throw std::runtime_error("S2an2Model: class UBP spec mismatch");
    }
    net.validate();
  }
  if (!(integrator.spec == spec.integrator_spec)) {
    throw std::runtime_error("S2an2Model: integrator spec mismatch");
  }
  integrator.validate();
  if (boundary_weights.size() != spec.n_classes) {
    throw std::runtime_error("S2an2Model: boundary weight count disagrees with spec");
  }
  for (double w : boundary_weights) {
    if (w != 1.0) throw std::runtime_error("S2an2Model: boundary weight is not exactly 1");
  }
}

TrainMode TrainMode::with_aux(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("TrainMode: aux weight must be >= 0");
  TrainMode mode;
  mode.aux_weight = lambda;
  return mode;
}

S2an2Model build_s2an2(const S2an2Spec& spec, std::uint64_t seed) {
  spec.validate();
  S2an2Model model;
  model.spec = spec;
  model.integrator = init_network(spec.integrator_spec, seed);
  model.class_ubps.reserve(spec.n_classes);
  for (std::size_t j = 0; j < spec.n_classes; ++j) {
    model.class_ubps.push_back(init_network(spec.class_ubp_spec, seed + 1 + j));
  }
  model.boundary_weights.assign(spec.n_classes, 1.0);
  return model;
}

namespace {

// Reused per-sample buffers for one full forward/backward pass.
struct Workspace {
  std::vector<ForwardTrace> class_traces;
  ForwardTrace integrator_trace;
  std::vector<double> integrator_input;
  std::vector<double> integrator_error;
  std::vector<double> boundary_error;  // integrator input error, length K
  std::vector<Gradients> class_grads;
  Gradients integrator_grads;
  std::vector<double> target;

  explicit Workspace(const S2an2Model& model)
      : class_traces(model.spec.n_classes),
        integrator_input(model.spec.n_classes, 0.0),
        class_grads(model.spec.n_classes),
        target(model.spec.n_bits(), 0.0) {
    for (std::size_t j = 0; j < model.spec.n_classes; ++j) {
      class_grads[j] = Gradients::zeros_like(model.class_ubps[j]);
    }
    integrator_grads = Gradients::zeros_like(model.integrator);
  }
};

// One sample's forward pass and gradient computation; returns the integrator
// MSE. Gradients land in the workspace, no weights are modified.
double backprop_sample(const S2an2Model& model, std::span<const double> x, std::size_t label,
                       double aux_weight, Workspace& ws) {
  const std::size_t n_classes = model.spec.n_classes;
  for (std::size_t j = 0; j < n_classes; ++j) {
    forward_into(model.class_ubps[j], x, ws.class_traces[j]);
    ws.integrator_input[j] = model.boundary_weights[j] * ws.class_traces[j].output()[0];
  }
  forward_into(model.integrator, ws.integrator_input, ws.integrator_trace);
  const std::vector<double>& out = ws.integrator_trace.output();

  const std::size_t n_bits = model.spec.n_bits();
  for (std::size_t i = 0; i < n_bits; ++i) {
    ws.target[i] = static_cast<double>((label >> (n_bits - 1 - i)) & 1u);
  }
  const double loss = mse_loss(out, ws.target);

  ws.integrator_error.resize(n_bits);
  const double scale = 2.0 / static_cast<double>(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    ws.integrator_error[i] = scale * (out[i] - ws.target[i]);
  }
  backward_into(model.integrator, ws.integrator_trace, ws.integrator_error,
                ws.integrator_grads, &ws.boundary_error);

  double up[1];
  for (std::size_t j = 0; j < n_classes; ++j) {
    up[0] = ws.boundary_error[j] * model.boundary_weights[j];
    if (aux_weight != 0.0) {
      const double own_target = (label == j) ? 1.0 : -1.0;
      up[0] += aux_weight * (ws.class_traces[j].output()[0] - own_target);
    }
    backward_into(model.class_ubps[j], ws.class_traces[j], std::span<const double>(up, 1),
                  ws.class_grads[j], nullptr);
  }
  return loss;
}

}  // namespace

S2an2Forward forward_full(const S2an2Model& model, std::span<const double> x) {
  S2an2Forward result;
  result.hl1_outputs.resize(model.spec.n_classes);
  std::vector<double> integrator_input(model.spec.n_classes);
  for (std::size_t j = 0; j < model.spec.n_classes; ++j) {
    result.hl1_outputs[j] = forward(model.class_ubps[j], x).output()[0];
    integrator_input[j] = model.boundary_weights[j] * result.hl1_outputs[j];
  }
  result.output = forward(model.integrator, integrator_input).output();
  return result;
}

std::size_t predict(const S2an2Model& model, std::span<const double> x) {
  return decode_class(forward_full(model, x).output, model.spec.n_classes);
}

TrainResult train_s2an2(S2an2Model& model, const TabularDataset& data, const TrainConfig& config,
                        const TrainMode& mode, const EpochCallback& on_epoch) {
  config.validate();
  data.validate();
  if (data.n() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.n_features != model.spec.n_features) {
    throw std::invalid_argument("train: dataset has " + std::to_string(data.n_features) +
                                " features, model expects " +
                                std::to_string(model.spec.n_features));
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.labels[i] >= model.spec.n_classes) {
      throw std::invalid_argument("train: label " + std::to_string(data.labels[i]) +
                                  " out of range at sample " + std::to_string(i));
    }
  }

  Workspace ws(model);
  std::vector<Gradients> class_velocity(model.spec.n_classes);
  for (std::size_t j = 0; j < model.spec.n_classes; ++j) {
    class_velocity[j] = Gradients::zeros_like(model.class_ubps[j]);
  }
  Gradients integrator_velocity = Gradients::zeros_like(model.integrator);

  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(config.seed);

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.shuffle_each_epoch) shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const double loss =
          backprop_sample(model, data.sample(idx), data.labels[idx], mode.aux_weight, ws);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 ", sample " + std::to_string(idx));
      }
      loss_sum += loss;
      apply_update(model.integrator, ws.integrator_grads, integrator_velocity,
                   config.learning_rate, config.momentum);
      for (std::size_t j = 0; j < model.spec.n_classes; ++j) {
        apply_update(model.class_ubps[j], ws.class_grads[j], class_velocity[j],
                     config.learning_rate, config.momentum);
      }
    }
    const double epoch_mse = loss_sum / static_cast<double>(data.n());
    result.epoch_mse.push_back(epoch_mse);
    result.epochs_run = epoch + 1;
    if (on_epoch) on_epoch(epoch + 1, epoch_mse);
    if (epoch_mse <= config.target_mse) {
      result.reached_target = true;
      break;
    }
  }
  return result;
}

GradientCheckReport s2an2_gradient_check(const S2an2Model& model, std::span<const double> x,
                                         std::size_t label, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("s2an2_gradient_check: eps must be positive");
  if (label >= model.spec.n_classes) {
    throw std::invalid_argument("s2an2_gradient_check: label out of range");
  }
  S2an2Model probe = model;
  Workspace ws(probe);
  backprop_sample(probe, x, label, 0.0, ws);

  const std::vector<double> target = class_code_targets(label, model.spec.n_bits());
  const std::vector<long double> probe_x(x.begin(), x.end());
  auto loss_at = [&]() -> long double {
    std::vector<long double> integrator_input(probe.spec.n_classes);
    for (std::size_t j = 0; j < probe.spec.n_classes; ++j) {
      integrator_input[j] = static_cast<long double>(probe.boundary_weights[j]) *
                            forward_extended(probe.class_ubps[j], probe_x)[0];
    }
    return mse_extended(probe.integrator, integrator_input, target);
  };

  GradientCheckReport report;
  bool first = true;
  auto consider = [&](double analytic_value, double* slot, std::string location) {
    const double original = *slot;
    *slot = original + eps;
    const long double loss_plus = loss_at();
    *slot = original - eps;
    const long double loss_minus = loss_at();
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

  auto sweep_network = [&](UbpNetwork& net, const Gradients& grads, const std::string& name) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      Matrix& w = net.weights[l];
      for (std::size_t r = 0; r < w.rows; ++r) {
        for (std::size_t c = 0; c < w.cols; ++c) {
          consider(grads.weights[l].at(r, c), &w.at(r, c),
                   name + " W" + std::to_string(l + 1) + "(" + std::to_string(r) + "," +
                       std::to_string(c) + ")");
        }
      }
      for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
        consider(grads.biases[l][i], &net.biases[l][i],
                 name + " b" + std::to_string(l + 1) + "(" + std::to_string(i) + ")");
      }
    }
  };

  for (std::size_t j = 0; j < probe.spec.n_classes; ++j) {
    sweep_network(probe.class_ubps[j], ws.class_grads[j], "class" + std::to_string(j));
  }
  sweep_network(probe.integrator, ws.integrator_grads, "integrator");
  return report;
}

}  // namespace s2an2
