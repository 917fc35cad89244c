#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "s2an2/dataset.hpp"
#include "s2an2/ubp.hpp"

namespace s2an2 {

/// Number of output bits for a class count: ceil(log2(n_classes)), floor 1.
std::size_t class_code_bits(std::size_t n_classes);

/// Big-endian binary code of class k, zero-padded to n_bits.
std::vector<int> encode_class(std::size_t k, std::size_t n_bits);

/// The code bits as 0.0 / 1.0 training targets.
std::vector<double> class_code_targets(std::size_t k, std::size_t n_bits);

/// Nearest codeword by squared distance; ties resolve to the smallest class.
std::size_t decode_class(std::span<const double> output, std::size_t n_classes);

struct S2an2Spec {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  UbpSpec class_ubp_spec;   // input n_features, output 1, bipolar output
  UbpSpec integrator_spec;  // input n_classes, output n_bits, sigmoid output

  static S2an2Spec make(std::size_t n_features, std::size_t n_classes,
                        std::vector<std::size_t> class_hidden = {15, 2},
                        std::vector<std::size_t> integrator_hidden = {15, 20});

  std::size_t n_bits() const { return class_code_bits(n_classes); }
  void validate() const;
  bool operator==(const S2an2Spec&) const = default;
};

/// Two hyper-layers: one class UBP per class feeding a single integrator UBP
/// through constant unit-weight edges. The constant edges never learn;
/// gradients pass through them unchanged.
struct S2an2Model {
  S2an2Spec spec;
  std::vector<UbpNetwork> class_ubps;
  UbpNetwork integrator;
  std::vector<double> boundary_weights;  // all exactly 1.0, by invariant

  std::size_t parameter_count() const;  // learnable parameters only
  void validate() const;
};

struct TrainMode {
  /// Weight of the auxiliary per-class-UBP target term (+1 for the own
  /// class, -1 otherwise) added to each class UBP's output error.
  /// 0 is purely end-to-end; that regime stalls at the mean-prediction
  /// plateau on every dataset we generate, so the default keeps a moderate
  /// auxiliary pull.
  double aux_weight = 0.5;

  static TrainMode end_to_end() { return TrainMode{0.0}; }
  static TrainMode with_aux(double lambda);
};

/// Integrator seeded with `seed`, class UBP j with `seed + 1 + j`.
S2an2Model build_s2an2(const S2an2Spec& spec, std::uint64_t seed);

struct S2an2Forward {
  std::vector<double> hl1_outputs;  // class-UBP outputs, each in (-1, 1)
  std::vector<double> output;       // integrator outputs, each in (0, 1)
};

S2an2Forward forward_full(const S2an2Model& model, std::span<const double> x);
std::size_t predict(const S2an2Model& model, std::span<const double> x);

struct TrainResult {
  std::vector<double> epoch_mse;  // integrator MSE averaged over each epoch
  std::size_t epochs_run = 0;
  bool reached_target = false;
};

using EpochCallback = std::function<void(std::size_t epoch, double mse)>;

/// Per-sample SGD over the whole structure. The integrator's MSE against the
/// class code drives learning; its input error crosses the hyper-layer
/// boundary through the constant edges. Stops at max_epochs or when the
/// epoch-mean MSE reaches target_mse. Boundary weights are never touched.
TrainResult train_s2an2(S2an2Model& model, const TabularDataset& data,
                        const TrainConfig& config, const TrainMode& mode,
                        const EpochCallback& on_epoch = nullptr);

/// Finite-difference check of the whole structure: the integrator MSE against
/// the class code, differentiated through both hyper-layers, for every weight
/// and bias of every network.
GradientCheckReport s2an2_gradient_check(const S2an2Model& model, std::span<const double> x,
                                         std::size_t label, double eps);

}  // namespace s2an2
