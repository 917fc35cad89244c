#include "s2an2/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace s2an2 {

ImportanceTable per_class_importance(const S2an2Model& model, bool signed_sum) {
  const std::size_t n_classes = model.spec.n_classes;
  const std::size_t n_features = model.spec.n_features;
  ImportanceTable table;
  table.per_class = Matrix(n_classes, n_features);
  for (std::size_t k = 0; k < n_classes; ++k) {
    const Matrix& w1 = model.class_ubps[k].weights.front();
    for (std::size_t h = 0; h < w1.rows; ++h) {
      const double* row = w1.row(h);
      double* out = table.per_class.row(k);
      for (std::size_t i = 0; i < n_features; ++i) {
        out[i] += signed_sum ? row[i] : std::abs(row[i]);
      }
    }
  }
  table.global.assign(n_features, 0.0);
  for (std::size_t k = 0; k < n_classes; ++k) {
    const double* row = table.per_class.row(k);
    for (std::size_t i = 0; i < n_features; ++i) table.global[i] += row[i];
  }
  table.normalized = normalize_minmax(table.global);
  return table;
}

std::vector<double> normalize_minmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("normalize_minmax: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(values.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / range;
  return out;
}

CutoffRule CutoffRule::fixed(double threshold) {
  CutoffRule rule;
  rule.kind = Kind::fixed_after_minmax;
  rule.threshold = threshold;
  return rule;
}

CutoffRule CutoffRule::mean_var(double alpha, bool use_std_dev) {
  CutoffRule rule;
  rule.kind = Kind::mean_minus_alpha_var;
  rule.alpha = alpha;
  rule.use_std_dev = use_std_dev;
  return rule;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_of: empty input");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  const double mean = mean_of(values);
  double sum = 0.0;
  for (double v : values) {
    const double d = v - mean;
    sum += d * d;
  }
  return sum / static_cast<double>(values.size());
}

RefinePlan select_features(std::span<const double> scores, const CutoffRule& rule) {
  if (scores.empty()) throw std::invalid_argument("select_features: empty score vector");
  std::vector<bool> keep(scores.size(), false);
  if (rule.kind == CutoffRule::Kind::fixed_after_minmax) {
    const std::vector<double> normalized = normalize_minmax(scores);
    for (std::size_t i = 0; i < scores.size(); ++i) keep[i] = normalized[i] >= rule.threshold;
  } else {
    const double spread = rule.use_std_dev ? std::sqrt(population_variance(scores))
                                           : population_variance(scores);
    const double cutoff = mean_of(scores) - rule.alpha * spread;
    for (std::size_t i = 0; i < scores.size(); ++i) keep[i] = scores[i] >= cutoff;
  }
  RefinePlan plan;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (keep[i] ? plan.kept_indices : plan.dropped_indices).push_back(i);
  }
  if (plan.kept_indices.empty()) {
    throw std::runtime_error(
        "select_features: the cutoff keeps no features; lower the threshold");
  }
  return plan;
}

namespace {

void validate_plan(const RefinePlan& plan, std::size_t n_features) {
  if (plan.kept_indices.empty()) throw std::invalid_argument("plan keeps no features");
  if (plan.kept_indices.size() + plan.dropped_indices.size() != n_features) {
    throw std::invalid_argument("plan does not partition the feature set");
  }
  std::vector<bool> seen(n_features, false);
  auto mark = [&](const std::vector<std::size_t>& indices) {
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t i : indices) {
      if (i >= n_features) throw std::invalid_argument("plan index out of range");
      if (!first && i <= prev) throw std::invalid_argument("plan indices must increase");
      if (seen[i]) throw std::invalid_argument("plan index repeated");
      seen[i] = true;
      prev = i;
      first = false;
    }
  };
  mark(plan.kept_indices);
  mark(plan.dropped_indices);
}

std::size_t rescale_hidden(std::size_t size, std::size_t kept, std::size_t original) {
  if (size <= kept) return size;
  const double scaled =
      static_cast<double>(size) * static_cast<double>(kept) / static_cast<double>(original);
  const auto rounded = static_cast<std::size_t>(std::llround(scaled));
  return rounded == 0 ? 1 : rounded;
}

}  // namespace

S2an2Spec refine_spec(const S2an2Spec& spec, const RefinePlan& plan) {
  spec.validate();
  validate_plan(plan, spec.n_features);
  const std::size_t kept = plan.kept_indices.size();
  S2an2Spec refined = spec;
  refined.n_features = kept;
  auto& sizes = refined.class_ubp_spec.layer_sizes;
  sizes.front() = kept;
  for (std::size_t l = 1; l + 1 < sizes.size(); ++l) {
    sizes[l] = rescale_hidden(sizes[l], kept, spec.n_features);
  }
  refined.validate();
  return refined;
}

S2an2Model prune_model(const S2an2Model& model, const RefinePlan& plan) {
  model.validate();
  validate_plan(plan, model.spec.n_features);
  const std::size_t kept = plan.kept_indices.size();
  S2an2Model pruned = model;
  pruned.spec.n_features = kept;
  pruned.spec.class_ubp_spec.layer_sizes.front() = kept;
  for (std::size_t j = 0; j < model.class_ubps.size(); ++j) {
    UbpNetwork& net = pruned.class_ubps[j];
    net.spec.layer_sizes.front() = kept;
    const Matrix& old_w1 = model.class_ubps[j].weights.front();
    Matrix w1(old_w1.rows, kept);
    for (std::size_t r = 0; r < old_w1.rows; ++r) {
      for (std::size_t c = 0; c < kept; ++c) {
        w1.at(r, c) = old_w1.at(r, plan.kept_indices[c]);
      }
    }
    net.weights.front() = std::move(w1);
  }
  pruned.validate();
  return pruned;
}

TabularDataset apply_plan(const TabularDataset& data, const RefinePlan& plan) {
  data.validate();
  validate_plan(plan, data.n_features);
  TabularDataset reduced;
  reduced.n_features = plan.kept_indices.size();
  reduced.labels = data.labels;
  reduced.features.reserve(data.n() * reduced.n_features);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const std::span<const double> row = data.sample(i);
    for (std::size_t k : plan.kept_indices) reduced.features.push_back(row[k]);
  }
  if (!data.feature_names.empty()) {
    for (std::size_t k : plan.kept_indices) {
      reduced.feature_names.push_back(data.feature_names[k]);
    }
  }
  return reduced;
}

std::optional<double> precision(std::size_t tp, std::size_t fp) {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (std::size_t c : counts) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::support(std::size_t truth) const {
  std::size_t sum = 0;
  for (std::size_t p = 0; p < n_classes; ++p) sum += at(truth, p);
  return sum;
}

std::size_t ConfusionMatrix::predicted_count(std::size_t cls) const {
  std::size_t sum = 0;
  for (std::size_t t = 0; t < n_classes; ++t) sum += at(t, cls);
  return sum;
}

EvalMetrics metrics_from_confusion(const ConfusionMatrix& confusion) {
  if (confusion.n_classes == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  EvalMetrics metrics;
  metrics.confusion = confusion;
  metrics.n_samples = confusion.total();
  std::size_t correct = 0;
  for (std::size_t k = 0; k < confusion.n_classes; ++k) correct += confusion.at(k, k);
  metrics.accuracy =
      metrics.n_samples == 0 ? 0.0 : static_cast<double>(correct) / metrics.n_samples;
  for (std::size_t k = 0; k < confusion.n_classes; ++k) {
    const std::size_t tp = confusion.at(k, k);
    const std::size_t fp = confusion.predicted_count(k) - tp;
    metrics.per_class_precision.push_back(precision(tp, fp));
    const std::size_t support = confusion.support(k);
    if (support == 0) {
      metrics.per_class_accuracy.push_back(std::nullopt);
    } else {
      metrics.per_class_accuracy.push_back(static_cast<double>(tp) / support);
    }
  }
  return metrics;
}

ModelComparison compare_models(const EvalMetrics& original, const EvalMetrics& refined) {
  if (original.per_class_accuracy.size() != refined.per_class_accuracy.size()) {
    throw std::invalid_argument("compare_models: class count mismatch");
  }
  ModelComparison cmp;
  for (std::size_t k = 0; k < original.per_class_accuracy.size(); ++k) {
    const auto& orig = original.per_class_accuracy[k];
    const auto& refd = refined.per_class_accuracy[k];
    if (!orig.has_value() || !refd.has_value() || *orig == 0.0) {
      cmp.per_class_accuracy_ratio.push_back(std::nullopt);
    } else {
      cmp.per_class_accuracy_ratio.push_back(*refd / *orig);
    }
  }
  if (original.accuracy > 0.0) {
    cmp.accuracy_ratio = refined.accuracy / original.accuracy;
  }
  return cmp;
}

}  // namespace s2an2
