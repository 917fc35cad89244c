#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "s2an2/dataset.hpp"
#include "s2an2/s2an2.hpp"
#include "s2an2/ubp.hpp"

namespace s2an2 {

/// First-layer weight mass attached to each input node, per class UBP, plus
/// the column-summed global scores and their min-max normalization.
struct ImportanceTable {
  Matrix per_class;  // n_classes x n_features
  std::vector<double> global;
  std::vector<double> normalized;
};

/// Entry [k][i] is the sum over first-hidden units h of |W1[h][i]| of class
/// UBP k. signed_sum drops the absolute value (the sums then cancel; kept as
/// a fidelity switch, not the default).
ImportanceTable per_class_importance(const S2an2Model& model, bool signed_sum = false);

/// (v - min) / (max - min); a constant vector maps to all 0.5.
std::vector<double> normalize_minmax(std::span<const double> values);

struct CutoffRule {
  enum class Kind { fixed_after_minmax, mean_minus_alpha_var };

  Kind kind = Kind::fixed_after_minmax;
  double threshold = 0.5;    // fixed_after_minmax: keep normalized >= threshold
  double alpha = 0.3;        // mean_minus_alpha_var: keep raw >= mean - alpha * variance
  bool use_std_dev = false;  // mean_minus_alpha_var: subtract alpha * stddev instead

  static CutoffRule fixed(double threshold = 0.5);
  static CutoffRule mean_var(double alpha = 0.3, bool use_std_dev = false);
};

struct RefinePlan {
  std::vector<std::size_t> kept_indices;     // strictly increasing
  std::vector<std::size_t> dropped_indices;  // complement, strictly increasing
};

/// Splits features per the rule. Throws if nothing would be kept, telling the
/// caller to lower the threshold; never silently keeps everything.
RefinePlan select_features(std::span<const double> scores, const CutoffRule& rule);

/// Population mean and variance helpers used by the cutoff rules.
double mean_of(std::span<const double> values);
double population_variance(std::span<const double> values);

/// Shrinks the class-UBP input to the kept features. Hidden layers wider than
/// the kept count shrink proportionally (rounded to nearest, floor one unit);
/// narrower ones keep their size. The integrator is untouched. The refined
/// model is meant to be retrained from scratch.
S2an2Spec refine_spec(const S2an2Spec& spec, const RefinePlan& plan);

/// Removes the dropped input columns from every class UBP's first layer while
/// keeping all trained weights. The pruned model's output equals the
/// original's with the dropped inputs forced to zero, exactly.
S2an2Model prune_model(const S2an2Model& model, const RefinePlan& plan);

/// Restricts a dataset to the plan's kept feature columns.
TabularDataset apply_plan(const TabularDataset& data, const RefinePlan& plan);

/// TP / (TP + FP); absent when no positive predictions exist.
std::optional<double> precision(std::size_t tp, std::size_t fp);

struct ConfusionMatrix {
  std::size_t n_classes = 0;
  std::vector<std::size_t> counts;  // true class (row) x predicted class (column)

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t k) : n_classes(k), counts(k * k, 0) {}

  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * n_classes + predicted];
  }
  void add(std::size_t truth, std::size_t predicted) {
    ++counts[truth * n_classes + predicted];
  }
  std::size_t total() const;
  std::size_t support(std::size_t truth) const;        // row sum
  std::size_t predicted_count(std::size_t cls) const;  // column sum
};

struct EvalMetrics {
  ConfusionMatrix confusion;
  std::size_t n_samples = 0;
  double accuracy = 0.0;
  std::vector<std::optional<double>> per_class_precision;  // absent: class never predicted
  std::vector<std::optional<double>> per_class_accuracy;   // absent: class has no samples
};

EvalMetrics metrics_from_confusion(const ConfusionMatrix& confusion);

struct ModelComparison {
  std::vector<std::optional<double>> per_class_accuracy_ratio;  // refined / original
  std::optional<double> accuracy_ratio;
};

/// Per-class and overall accuracy ratios, refined over original. A ratio is
/// absent whenever its denominator is zero or either side is absent.
ModelComparison compare_models(const EvalMetrics& original, const EvalMetrics& refined);

}  // namespace s2an2
