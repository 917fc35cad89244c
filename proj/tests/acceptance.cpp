// Acceptance suite: one pass/fail line per criterion. Exit 0 iff every
// criterion that ran passed. --only N restricts to one criterion (repeatable),
// --cli PATH points at the command-line binary (defaults to $S2AN2_CLI).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include <unistd.h>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "s2an2/data_io.hpp"
#include "s2an2/feature_select.hpp"
#include "s2an2/report.hpp"
#include "s2an2/rng.hpp"
#include "s2an2/s2an2.hpp"
#include "s2an2/vector_mode.hpp"

using namespace s2an2;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  int criterion;
  bool pass;
  std::string details;
};

std::vector<Outcome> outcomes;

void record(int criterion, bool pass, const std::string& details) {
  outcomes.push_back({criterion, pass, details});
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, details.c_str());
  std::fflush(stdout);
}

TabularDataset slice(const TabularDataset& data, std::size_t from, std::size_t to) {
  TabularDataset out;
  out.n_features = data.n_features;
  out.features.assign(data.features.begin() + from * data.n_features,
                      data.features.begin() + to * data.n_features);
  out.labels.assign(data.labels.begin() + from, data.labels.begin() + to);
  return out;
}

double accuracy_of(const S2an2Model& model, const TabularDataset& data) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (predict(model, data.sample(i)) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n());
}

// ---------------------------------------------------------------------------

void criterion_1() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_at;

  for (const std::vector<std::size_t>& sizes :
       {std::vector<std::size_t>{2, 3, 1}, std::vector<std::size_t>{13, 15, 2, 1}}) {
    UbpSpec spec;
    spec.layer_sizes = sizes;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const UbpNetwork net = init_network(spec, seed);
      Rng rng(seed * 97 + 3);
      std::vector<double> x(sizes.front());
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      std::vector<double> target(sizes.back());
      for (double& v : target) v = rng.uniform(0.0, 1.0);
      const GradientCheckReport report = gradient_check_detailed(net, x, target, 1e-5);
      if (report.max_rel_error > worst) {
        worst = report.max_rel_error;
        worst_at = "ubp[" + std::to_string(sizes.front()) + "..] " + report.location;
      }
    }
  }

  const MovieS2an2Spec movie_spec = MovieS2an2Spec::make(2, 3, 3, 2, {4}, {3}, {3});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MovieModel model = build_movie_model(movie_spec, seed);
    Rng rng(seed * 977 + 5);
    FrameSequence movie;
    movie.n_frames = 2;
    movie.height = 3;
    movie.width = 3;
    movie.pixels.resize(18);
    for (double& v : movie.pixels) v = rng.uniform(-1.0, 1.0);
    const GradientCheckReport report = movie_gradient_check(model, movie, seed % 2, 1e-5);
    if (report.max_rel_error > worst) {
      worst = report.max_rel_error;
      worst_at = "tiny-movie " + report.location;
    }
  }

  const double elapsed = seconds_since(start);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gradient correctness: worst rel err %.3e (%s), %.1fs (bound 1e-4, 60s)", worst,
                worst_at.c_str(), elapsed);
  record(1, worst < 1e-4 && elapsed < 60.0, buf);
}

void criterion_2() {
  bool pass = true;

  auto [tab, tab_truth] = synth_tabular(11, 200, 6, 4, {0, 1, 2});
  S2an2Model tab_model = build_s2an2(S2an2Spec::make(6, 4, {8, 3}, {6}), 11);
  TrainConfig config;
  config.max_epochs = 100;
  config.target_mse = 0.0;  // run all 100 epochs
  config.seed = 11;
  train_s2an2(tab_model, tab, config, TrainMode{});
  const double one = 1.0;
  for (double w : tab_model.boundary_weights) {
    pass &= std::memcmp(&w, &one, sizeof(double)) == 0;
  }

  auto [mov, mov_truth] = synth_movies(11, 60, 3, 8, 8, BBox{2, 2, 3, 3}, {0, 1});
  MovieModel mov_model = build_movie_model(MovieS2an2Spec::make(3, 8, 8, 2, {4}, {3}, {3}), 11);
  config.learning_rate = 0.05;
  train_movie(mov_model, mov, config, TrainMode{});
  for (double w : mov_model.boundary_weights) {
    pass &= std::memcmp(&w, &one, sizeof(double)) == 0;
  }

  record(2, pass,
         "constant-edge invariance: all boundary weights bit-equal to 1.0 after 100 epochs "
         "(tabular + movie)");
}

// Criteria 3 and 4 share the per-seed training work.
void criteria_3_and_4() {
  const std::vector<std::size_t> informative = {0, 1, 2, 3, 4};
  int top6_ok = 0;
  int kept_ok = 0;
  std::vector<double> ratios;

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [all, truth] = synth_tabular(seed, 2500, 13, 10, informative);
    const TabularDataset train_set = slice(all, 0, 2000);
    const TabularDataset test_set = slice(all, 2000, 2500);

    S2an2Model model = build_s2an2(S2an2Spec::make(13, 10), seed);
    TrainConfig config;  // lr 0.1, momentum 0.9, up to 500 epochs
    config.target_mse = 0.05;
    config.seed = seed;
    train_s2an2(model, train_set, config, TrainMode{});

    const ImportanceTable table = per_class_importance(model);
    std::vector<std::size_t> order(13);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return table.global[a] > table.global[b]; });
    const std::set<std::size_t> top6(order.begin(), order.begin() + 6);
    bool all_in_top6 = true;
    for (std::size_t i : informative) all_in_top6 &= top6.count(i) > 0;
    top6_ok += all_in_top6;

    const RefinePlan plan = select_features(table.global, CutoffRule::fixed(0.5));
    bool all_kept = true;
    for (std::size_t i : informative) {
      all_kept &= std::binary_search(plan.kept_indices.begin(), plan.kept_indices.end(), i);
    }
    kept_ok += all_kept;

    // criterion 4: rebuild the reduced spec and retrain from scratch
    S2an2Model refined = build_s2an2(refine_spec(model.spec, plan), seed);
    train_s2an2(refined, apply_plan(train_set, plan), config, TrainMode{});
    const double original_accuracy = accuracy_of(model, test_set);
    const double refined_accuracy = accuracy_of(refined, apply_plan(test_set, plan));
    if (original_accuracy > 0.0) ratios.push_back(refined_accuracy / original_accuracy);
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "feature recovery: informative in top 6 in %d/20 (need 18), cutoff 0.5 keeps "
                "all informative in %d/20 (need 16)",
                top6_ok, kept_ok);
  record(3, top6_ok >= 18 && kept_ok >= 16, buf);

  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.size() == 20 ? 0.5 * (ratios[9] + ratios[10]) : 0.0;
  std::snprintf(buf, sizeof(buf),
                "refinement quality: refined/original test-accuracy median %.4f over 20 seeds "
                "(need >= 0.95)",
                median);
  record(4, ratios.size() == 20 && median >= 0.95, buf);
}

struct MovieRunArtifacts {
  std::vector<double> param_ratios;           // refined / original, per seed
  std::vector<std::uint64_t> seeds;           // aligned with param_ratios
  std::vector<BBox> bboxes;
  std::vector<std::vector<std::size_t>> kept_frames;
};

// Criteria 5 and 6 share the per-seed movie training work.
void criteria_5_and_6() {
  const BBox signal_box{12, 12, 8, 8};
  const std::vector<std::size_t> signal_frames = {4, 5, 8, 9};  // paper's {5,6,9,10}, 0-based
  const MovieS2an2Spec spec = MovieS2an2Spec::make(10, 32, 32, 2, {2}, {3}, {3});

  int cover_ok = 0;
  int frames_ok = 0;
  MovieRunArtifacts art;

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [data, truth] = synth_movies(seed, 1200, 10, 32, 32, signal_box, signal_frames);
    MovieModel model = build_movie_model(spec, seed);
    TrainConfig config;
    config.learning_rate = 0.02;
    config.max_epochs = 6;
    config.target_mse = 0.0;
    config.seed = seed;
    train_movie(model, data, config, TrainMode::with_aux(1.0));

    const Matrix values = pixel_importance(model);
    const PixelMask mask = pixel_mask(values, 0.3);
    std::size_t covered = 0;
    for (std::size_t r = 0; r < 32; ++r) {
      for (std::size_t c = 0; c < 32; ++c) {
        if (signal_box.contains(r, c) && mask.bbox.contains(r, c)) ++covered;
      }
    }
    cover_ok += covered * 10 >= signal_box.area() * 9;  // >= 90% of signal pixels

    const std::vector<double> importance = frame_importance(model);
    std::vector<std::size_t> order(10);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    int hits = 0;
    for (int i = 0; i < 5; ++i) {
      hits += std::find(signal_frames.begin(), signal_frames.end(), order[i]) !=
              signal_frames.end();
    }
    frames_ok += hits >= 3;

    // the criterion-5 crop: mask bbox plus the four best-ranked frames
    std::vector<std::size_t> kept(order.begin(), order.begin() + 4);
    std::sort(kept.begin(), kept.end());
    const MovieS2an2Spec refined_spec = refine_movie_spec(spec, mask.bbox, kept);
    const MovieModel refined_probe = build_movie_model(refined_spec, seed);
    art.param_ratios.push_back(static_cast<double>(refined_probe.parameter_count()) /
                               static_cast<double>(model.parameter_count()));
    art.seeds.push_back(seed);
    art.bboxes.push_back(mask.bbox);
    art.kept_frames.push_back(kept);
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "pixel/frame recovery: mask bbox covers >=90%% of signal pixels in %d/20 "
                "(need 16), >=3 of 4 signal frames in top 5 in %d/20 (need 16)",
                cover_ok, frames_ok);
  record(5, cover_ok >= 16 && frames_ok >= 16, buf);

  // criterion 6: median parameter ratio, and wall time on the median seed
  std::vector<std::size_t> by_ratio(art.param_ratios.size());
  std::iota(by_ratio.begin(), by_ratio.end(), 0);
  std::sort(by_ratio.begin(), by_ratio.end(),
            [&](std::size_t a, std::size_t b) { return art.param_ratios[a] < art.param_ratios[b]; });
  const std::size_t median_pos = by_ratio[art.param_ratios.size() / 2];
  const double median_ratio =
      0.5 * (art.param_ratios[by_ratio[9]] + art.param_ratios[by_ratio[10]]);

  const std::uint64_t seed = art.seeds[median_pos];
  const BBox bbox = art.bboxes[median_pos];
  const std::vector<std::size_t>& kept = art.kept_frames[median_pos];

  auto [train_data, train_truth] = synth_movies(seed, 1200, 10, 32, 32, signal_box, signal_frames);
  MovieModel original = build_movie_model(spec, seed);
  TrainConfig config;
  config.learning_rate = 0.02;
  config.max_epochs = 6;
  config.target_mse = 0.0;
  config.seed = seed;
  train_movie(original, train_data, config, TrainMode::with_aux(1.0));

  const MovieDataset cropped_train = crop_dataset(train_data, bbox, kept);
  MovieModel refined = build_movie_model(refine_movie_spec(spec, bbox, kept), seed);
  train_movie(refined, cropped_train, config, TrainMode::with_aux(1.0));

  auto [eval_data, eval_truth] = synth_movies(9001, 100, 10, 32, 32, signal_box, signal_frames);
  const MovieDataset cropped_eval = crop_dataset(eval_data, bbox, kept);

  // wall time over 100 movies, summed across repeated passes to ride over
  // scheduler noise; the flop gap between the two models is ~3x
  constexpr int kPasses = 25;
  auto time_eval = [&](const MovieModel& model, const MovieDataset& data) {
    volatile std::size_t sink = 0;
    const auto t0 = Clock::now();
    for (int pass = 0; pass < kPasses; ++pass) {
      for (std::size_t i = 0; i < data.n(); ++i) sink = sink + predict_movie(model, data.movies[i]);
    }
    return seconds_since(t0) / kPasses;
  };
  const double original_seconds = time_eval(original, eval_data);
  const double refined_seconds = time_eval(refined, cropped_eval);

  const fs::path dir =
      fs::temp_directory_path() / ("s2an2_c6_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  save_model(original, dir / "original.txt");
  save_model(refined, dir / "refined.txt");
  const std::size_t original_bytes = fs::file_size(dir / "original.txt");
  const std::size_t refined_bytes = fs::file_size(dir / "refined.txt");
  fs::remove_all(dir);

  std::printf("resources                 original        refined      ratio\n");
  std::printf("  parameter count   %14zu %14zu %10.3f\n", original.parameter_count(),
              refined.parameter_count(),
              static_cast<double>(refined.parameter_count()) / original.parameter_count());
  std::printf("  model bytes       %14zu %14zu %10.3f\n", original_bytes, refined_bytes,
              static_cast<double>(refined_bytes) / original_bytes);
  std::printf("  eval seconds      %14.4f %14.4f %10.3f\n", original_seconds, refined_seconds,
              refined_seconds / original_seconds);

  std::snprintf(buf, sizeof(buf),
                "resource reduction: median parameter ratio %.3f (need < 0.40); eval of 100 "
                "movies %.4fs -> %.4fs (median-seed crop %zux%zu, %zu frames)",
                median_ratio, original_seconds, refined_seconds, bbox.height, bbox.width,
                kept.size());
  record(6, median_ratio < 0.40 && refined_seconds < original_seconds, buf);
}

void criterion_7() {
  auto [data, truth] = synth_tabular(21, 300, 13, 10, {0, 1, 2, 3, 4});
  S2an2Model model = build_s2an2(S2an2Spec::make(13, 10), 21);
  TrainConfig config;
  config.target_mse = 0.05;
  config.seed = 21;
  train_s2an2(model, data, config, TrainMode{});

  const ImportanceTable table = per_class_importance(model);
  const RefinePlan plan = select_features(table.global, CutoffRule::fixed(0.5));
  const S2an2Model pruned = prune_model(model, plan);

  S2an2Model zeroed = model;
  for (UbpNetwork& net : zeroed.class_ubps) {
    for (std::size_t h = 0; h < net.weights[0].rows; ++h) {
      for (std::size_t dropped : plan.dropped_indices) net.weights[0].at(h, dropped) = 0.0;
    }
  }

  bool exact = true;
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(13);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    std::vector<double> masked = x;
    for (std::size_t dropped : plan.dropped_indices) masked[dropped] = 0.0;
    std::vector<double> kept_only;
    for (std::size_t keep : plan.kept_indices) kept_only.push_back(x[keep]);
    const S2an2Forward a = forward_full(pruned, kept_only);
    const S2an2Forward b = forward_full(zeroed, masked);
    exact &= a.output == b.output && a.hl1_outputs == b.hl1_outputs;
  }
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "pruning equivalence: pruned output bit-equal to zeroed-input original on 100 "
                "random inputs (kept %zu of 13)",
                plan.kept_indices.size());
  record(7, exact, buf);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_8(const std::string& cli) {
  if (cli.empty()) {
    record(8, false, "determinism/serialization: CLI binary not found (set S2AN2_CLI or --cli)");
    return;
  }
  const fs::path dir =
      fs::temp_directory_path() / ("s2an2_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const std::string command = "cd '" + dir.string() + "' && '" + cli + "' " + args +
                                " > /dev/null 2>&1";
    return std::system(command.c_str()) == 0;
  };

  bool pass = true;
  pass &= run("synth-tabular --seed 5 --n 300 --d 8 --k 4 --informative 0,1,2 --out data_a");
  pass &= run("synth-tabular --seed 5 --n 300 --d 8 --k 4 --informative 0,1,2 --out data_b");
  pass &= read_file(dir / "data_a.csv") == read_file(dir / "data_b.csv");

  const std::string train_flags =
      "train --data data_a.csv --mode tabular --seed 9 --epochs 40 --target-mse 0.05 "
      "--class-hidden 8,2 --integrator-hidden 6";
  pass &= run(train_flags + " --out-model model_a.txt");
  pass &= run(train_flags + " --out-model model_b.txt");
  const std::string model_bytes = read_file(dir / "model_a.txt");
  pass &= !model_bytes.empty() && model_bytes == read_file(dir / "model_b.txt");

  // save -> load -> save is byte-identical
  bool roundtrip = false;
  try {
    const LoadedModel loaded = load_model(dir / "model_a.txt");
    save_model(std::get<S2an2Model>(loaded), dir / "model_c.txt");
    roundtrip = model_bytes == read_file(dir / "model_c.txt");
  } catch (const std::exception&) {
    roundtrip = false;
  }
  pass &= roundtrip;

  fs::remove_all(dir);
  record(8, pass,
         "determinism + serialization: identical flags give byte-identical datasets and "
         "models; save->load->save is byte-identical");
}

void criterion_9() {
  const std::vector<double> anchor = {5.74, 7.03, 8.03, 8.42, 8.2,  8.2, 7.76,
                                      7.92, 7.24, 4.89, 3.11, 4.53, 4.13};
  bool pass = false;
  std::size_t kept_count = 0;
  try {
    const RefinePlan plan = select_features(anchor, CutoffRule::fixed(0.5));
    kept_count = plan.kept_indices.size();
    pass = plan.kept_indices == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8};
  } catch (const std::exception&) {
    pass = false;
  }
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "normalization/cutoff arithmetic: min-max + 0.5 cutoff keeps %zu features "
                "{F2..F9} of the published scores (need exactly those 8)",
                kept_count);
  record(9, pass, buf);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string cli = std::getenv("S2AN2_CLI") ? std::getenv("S2AN2_CLI") : "";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only N]... [--cli PATH]\n", argv[0]);
      return 2;
    }
  }
  auto wanted = [&](int criterion) { return only.empty() || only.count(criterion) > 0; };

  const auto start = Clock::now();
  if (wanted(1)) criterion_1();
  if (wanted(2)) criterion_2();
  if (wanted(3) || wanted(4)) criteria_3_and_4();
  if (wanted(5) || wanted(6)) criteria_5_and_6();
  if (wanted(7)) criterion_7();
  if (wanted(8)) criterion_8(cli);
  if (wanted(9)) criterion_9();

  int failed = 0;
  for (const Outcome& outcome : outcomes) failed += !outcome.pass;
  std::printf("acceptance: %zu criteria run, %d failed, %.1fs total\n", outcomes.size(), failed,
              seconds_since(start));
  return failed == 0 ? 0 : 1;
}
