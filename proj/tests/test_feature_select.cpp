#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "s2an2/data_io.hpp"
#include "s2an2/feature_select.hpp"
#include "s2an2/rng.hpp"

using namespace s2an2;

namespace {

// The published per-feature scores the cutoff examples are anchored to.
const std::vector<double> kAnchorScores = {5.74, 7.03, 8.03, 8.42, 8.2,  8.2, 7.76,
                                           7.92, 7.24, 4.89, 3.11, 4.53, 4.13};

}  // namespace

TEST_CASE("per_class_importance hand sums") {
  const S2an2Spec spec = S2an2Spec::make(2, 2, {2}, {2});
  S2an2Model model = build_s2an2(spec, 1);

  // class UBP 0 first layer: [[1,-2],[3,4]] -> importance [4, 6]
  model.class_ubps[0].weights[0].data = {1.0, -2.0, 3.0, 4.0};
  // class UBP 1 first layer: zeros -> row of zeros
  std::fill(model.class_ubps[1].weights[0].data.begin(),
            model.class_ubps[1].weights[0].data.end(), 0.0);

  const ImportanceTable table = per_class_importance(model);
  CHECK(table.per_class.at(0, 0) == 4.0);
  CHECK(table.per_class.at(0, 1) == 6.0);
  CHECK(table.per_class.at(1, 0) == 0.0);
  CHECK(table.per_class.at(1, 1) == 0.0);
  CHECK(table.global == std::vector<double>{4.0, 6.0});
  CHECK(table.normalized == std::vector<double>{0.0, 1.0});

  const ImportanceTable raw = per_class_importance(model, /*signed_sum=*/true);
  CHECK(raw.per_class.at(0, 0) == 4.0);   // 1 + 3
  CHECK(raw.per_class.at(0, 1) == 2.0);   // -2 + 4
}

TEST_CASE("importance is invariant under hidden unit permutation") {
  const S2an2Spec spec = S2an2Spec::make(4, 2, {3}, {2});
  S2an2Model model = build_s2an2(spec, 5);
  const ImportanceTable before = per_class_importance(model);

  // swap two rows of class UBP 0's first layer
  Matrix& w = model.class_ubps[0].weights[0];
  for (std::size_t c = 0; c < w.cols; ++c) std::swap(w.at(0, c), w.at(2, c));
  const ImportanceTable after = per_class_importance(model);
  CHECK(before.global == after.global);
}

TEST_CASE("normalize_minmax anchors and degenerate case") {
  const std::vector<double> normalized = normalize_minmax(kAnchorScores);
  CHECK(normalized[3] == 1.0);   // max
  CHECK(normalized[10] == 0.0);  // min
  CHECK(normalized[0] == doctest::Approx(0.4952919020715631).epsilon(1e-12));

  CHECK(normalize_minmax(std::vector<double>{7.0, 7.0, 7.0}) ==
        std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("normalize_minmax is idempotent and affine invariant") {
  Rng rng(3);
  std::vector<double> v(9);
  for (double& x : v) x = rng.uniform(-4.0, 4.0);
  const std::vector<double> n1 = normalize_minmax(v);
  const std::vector<double> n2 = normalize_minmax(n1);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(n2[i] == doctest::Approx(n1[i]).epsilon(1e-12));

  std::vector<double> scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = 2.5 * v[i] + 3.0;
  const std::vector<double> n3 = normalize_minmax(scaled);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(n3[i] == doctest::Approx(n1[i]).epsilon(1e-12));
}

TEST_CASE("select_features fixed cutoff keeps eight of the anchor scores") {
  const RefinePlan plan = select_features(kAnchorScores, CutoffRule::fixed(0.5));
  CHECK(plan.kept_indices == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(plan.dropped_indices == std::vector<std::size_t>{0, 9, 10, 11, 12});
}

TEST_CASE("select_features mean minus alpha times variance") {
  // mean 0.8, population variance 0.16, cutoff 0.752 -> index 4 dropped
  const std::vector<double> v = {1.0, 1.0, 1.0, 1.0, 0.0};
  const RefinePlan plan = select_features(v, CutoffRule::mean_var(0.3));
  CHECK(plan.kept_indices == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(plan.dropped_indices == std::vector<std::size_t>{4});

  CHECK(mean_of(v) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(population_variance(v) == doctest::Approx(0.16).epsilon(1e-12));
}

TEST_CASE("select_features edge cases") {
  // all equal: normalized all 0.5, inclusive comparison keeps everything
  const std::vector<double> equal = {3.0, 3.0, 3.0};
  const RefinePlan all = select_features(equal, CutoffRule::fixed(0.5));
  CHECK(all.kept_indices.size() == 3);
  CHECK(all.dropped_indices.empty());

  // cutoff above 1: nothing kept -> error, never a silent keep-all
  CHECK_THROWS_AS(select_features(kAnchorScores, CutoffRule::fixed(1.1)), std::runtime_error);
}

TEST_CASE("fixed cutoff selection is invariant under positive affine rescaling") {
  Rng rng(11);
  std::vector<double> v(13);
  for (double& x : v) x = rng.uniform(0.0, 10.0);
  const RefinePlan base = select_features(v, CutoffRule::fixed(0.5));
  std::vector<double> scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = 0.37 * v[i] + 12.0;
  const RefinePlan same = select_features(scaled, CutoffRule::fixed(0.5));
  CHECK(base.kept_indices == same.kept_indices);
}

TEST_CASE("refine_spec rescaling") {
  const S2an2Spec spec = S2an2Spec::make(13, 10);  // class UBP [13,15,2,1]

  RefinePlan plan;
  plan.kept_indices = {1, 2, 3, 4, 5, 6, 7, 8};
  plan.dropped_indices = {0, 9, 10, 11, 12};
  const S2an2Spec refined = refine_spec(spec, plan);
  CHECK(refined.class_ubp_spec.layer_sizes == std::vector<std::size_t>{8, 9, 2, 1});
  CHECK(refined.integrator_spec == spec.integrator_spec);
  CHECK(refined.n_classes == 10);
  CHECK(refined.n_bits() == 4);

  RefinePlan identity;
  identity.kept_indices.resize(13);
  std::iota(identity.kept_indices.begin(), identity.kept_indices.end(), 0);
  CHECK(refine_spec(spec, identity) == spec);

  RefinePlan single;
  single.kept_indices = {4};
  for (std::size_t i = 0; i < 13; ++i) {
    if (i != 4) single.dropped_indices.push_back(i);
  }
  const S2an2Spec tiny = refine_spec(spec, single);
  CHECK(tiny.class_ubp_spec.layer_sizes == std::vector<std::size_t>{1, 1, 1, 1});

  RefinePlan bad;
  bad.kept_indices = {1, 1};
  CHECK_THROWS_AS(refine_spec(spec, bad), std::invalid_argument);
}

TEST_CASE("prune_model equals zeroing dropped inputs and columns") {
  auto [data, truth] = synth_tabular(3, 120, 8, 3, {0, 1, 2});
  const S2an2Spec spec = S2an2Spec::make(8, 3, {6, 3}, {5});
  S2an2Model model = build_s2an2(spec, 13);
  TrainConfig config;
  config.max_epochs = 15;
  config.target_mse = 0.0;
  config.seed = 13;
  train_s2an2(model, data, config, TrainMode{});

  RefinePlan plan;
  plan.kept_indices = {0, 2, 3, 6};
  plan.dropped_indices = {1, 4, 5, 7};
  const S2an2Model pruned = prune_model(model, plan);
  CHECK(pruned.spec.n_features == 4);
  CHECK(pruned.parameter_count() < model.parameter_count());

  // reference: original with dropped inputs forced to zero and the matching
  // first-layer columns zeroed
  S2an2Model zeroed = model;
  for (UbpNetwork& net : zeroed.class_ubps) {
    for (std::size_t h = 0; h < net.weights[0].rows; ++h) {
      for (std::size_t i : plan.dropped_indices) net.weights[0].at(h, i) = 0.0;
    }
  }

  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(8);
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    std::vector<double> x_masked = x;
    for (std::size_t i : plan.dropped_indices) x_masked[i] = 0.0;
    std::vector<double> x_kept;
    for (std::size_t i : plan.kept_indices) x_kept.push_back(x[i]);

    const S2an2Forward a = forward_full(pruned, x_kept);
    const S2an2Forward b = forward_full(zeroed, x_masked);
    CHECK(a.output == b.output);  // exact, bit for bit
    CHECK(a.hl1_outputs == b.hl1_outputs);
  }
}

TEST_CASE("apply_plan column selection") {
  TabularDataset data;
  data.n_features = 3;
  data.features = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  data.labels = {0, 1};
  data.feature_names = {"a", "b", "c"};
  RefinePlan plan;
  plan.kept_indices = {0, 2};
  plan.dropped_indices = {1};
  const TabularDataset reduced = apply_plan(data, plan);
  CHECK(reduced.n_features == 2);
  CHECK(reduced.features == std::vector<double>{1.0, 3.0, 4.0, 6.0});
  CHECK(reduced.feature_names == std::vector<std::string>{"a", "c"});
}

TEST_CASE("select_features rejects an empty score vector") {
  CHECK_THROWS_AS(select_features(std::vector<double>{}, CutoffRule::fixed(0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(normalize_minmax(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("precision guard") {
  CHECK(precision(9, 1) == 0.9);
  CHECK(precision(0, 5) == 0.0);
  CHECK_FALSE(precision(0, 0).has_value());
}

TEST_CASE("metrics and model comparison") {
  ConfusionMatrix confusion(3);
  // class 0: 8/10 correct; class 1: 9/10; class 2 is never predicted at all
  confusion.counts = {8, 2, 0,
                      1, 9, 0,
                      5, 5, 0};
  const EvalMetrics m = metrics_from_confusion(confusion);
  CHECK(m.n_samples == 30);
  CHECK(m.accuracy == doctest::Approx(17.0 / 30).epsilon(1e-12));
  CHECK(m.per_class_accuracy[0] == doctest::Approx(0.8));
  CHECK(m.per_class_accuracy[1] == doctest::Approx(0.9));
  CHECK(m.per_class_accuracy[2] == doctest::Approx(0.0));
  CHECK(m.per_class_precision[0] == doctest::Approx(8.0 / 14).epsilon(1e-12));
  CHECK_FALSE(m.per_class_precision[2].has_value());  // column sum 1? no: 1+0+0

  const ModelComparison same = compare_models(m, m);
  CHECK(same.accuracy_ratio == doctest::Approx(1.0));
  CHECK(same.per_class_accuracy_ratio[0] == doctest::Approx(1.0));
  CHECK_FALSE(same.per_class_accuracy_ratio[2].has_value());  // original accuracy 0

  EvalMetrics refined = m;
  refined.accuracy = 0.98;
  EvalMetrics original = m;
  original.accuracy = 0.85;
  const ModelComparison ratio = compare_models(original, refined);
  CHECK(*ratio.accuracy_ratio == doctest::Approx(0.98 / 0.85).epsilon(1e-12));
}

TEST_CASE("trained importance ranks an informative feature above noise") {
  // feature 0 determines the class; the rest is noise
  std::size_t wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [data, truth] = synth_tabular(seed, 150, 6, 2, {0});
    const S2an2Spec spec = S2an2Spec::make(6, 2, {8}, {4});
    S2an2Model model = build_s2an2(spec, seed);
    TrainConfig config;
    config.max_epochs = 40;
    config.target_mse = 0.02;
    config.seed = seed;
    train_s2an2(model, data, config, TrainMode{});
    const ImportanceTable table = per_class_importance(model);
    double noise_mean = 0.0;
    for (std::size_t i = 1; i < 6; ++i) noise_mean += table.global[i];
    noise_mean /= 5.0;
    if (table.global[0] > noise_mean) ++wins;
  }
  CHECK(wins >= 4);
}
