// Command-line surface for the S2AN2 pipeline: synthesize datasets, train,
// rank features or frames by weight mass, refine or prune, evaluate and
// compare models, and run finite-difference gradient checks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "s2an2/data_io.hpp"
#include "s2an2/feature_select.hpp"
#include "s2an2/report.hpp"
#include "s2an2/rng.hpp"
#include "s2an2/s2an2.hpp"
#include "s2an2/vector_mode.hpp"

namespace {

using namespace s2an2;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::size_t> parse_index_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> values;
  if (text.empty()) return values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string field =
        pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
    try {
      std::size_t consumed = 0;
      const unsigned long long v = std::stoull(field, &consumed);
      if (consumed != field.size()) throw std::invalid_argument(field);
      values.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + field + "' is not a non-negative integer");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return values;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// plan CSV: the rank/refine exchange format.
// Header "index,raw_score,normalized_score,kept"; one row per feature or
// frame, sorted by normalized score descending (ties by index). Movie plans
// carry one trailing comment "# bbox,row,col,height,width".

struct PlanFile {
  struct Entry {
    std::size_t index;
    double raw;
    double normalized;
    bool kept;
  };
  std::vector<Entry> entries;
  std::optional<BBox> bbox;

  RefinePlan to_refine_plan() const {
    RefinePlan plan;
    for (const Entry& e : entries) (e.kept ? plan.kept_indices : plan.dropped_indices).push_back(e.index);
    std::sort(plan.kept_indices.begin(), plan.kept_indices.end());
    std::sort(plan.dropped_indices.begin(), plan.dropped_indices.end());
    return plan;
  }
};

void write_plan(const PlanFile& plan, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << "index,raw_score,normalized_score,kept\n";
  for (const auto& e : plan.entries) {
    out << e.index << ',' << fmt_double(e.raw) << ',' << fmt_double(e.normalized) << ','
        << (e.kept ? 1 : 0) << '\n';
  }
  if (plan.bbox.has_value()) {
    out << "# bbox," << plan.bbox->row_min << ',' << plan.bbox->col_min << ','
        << plan.bbox->height << ',' << plan.bbox->width << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

PlanFile read_plan(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  PlanFile plan;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "index,raw_score,normalized_score,kept") {
        throw std::runtime_error(path.string() + ": not a plan file");
      }
      continue;
    }
    if (line.rfind("# bbox,", 0) == 0) {
      std::vector<std::size_t> v;
      try {
        v = parse_index_list(line.substr(7), "--plan");
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": bad bbox comment");
      }
      if (v.size() != 4) throw std::runtime_error(path.string() + ": bad bbox comment");
      plan.bbox = BBox{v[0], v[1], v[2], v[3]};
      continue;
    }
    if (line[0] == '#') continue;
    PlanFile::Entry entry{};
    char* end = nullptr;
    const char* p = line.c_str();
    entry.index = std::strtoull(p, &end, 10);
    if (end == p || *end != ',') throw std::runtime_error(path.string() + ": bad row " + std::to_string(line_no));
    p = end + 1;
    entry.raw = std::strtod(p, &end);
    if (end == p || *end != ',') throw std::runtime_error(path.string() + ": bad row " + std::to_string(line_no));
    p = end + 1;
    entry.normalized = std::strtod(p, &end);
    if (end == p || *end != ',') throw std::runtime_error(path.string() + ": bad row " + std::to_string(line_no));
    p = end + 1;
    if (p[0] == '1' && p[1] == '\0') entry.kept = true;
    else if (p[0] == '0' && p[1] == '\0') entry.kept = false;
    else throw std::runtime_error(path.string() + ": bad kept flag in row " + std::to_string(line_no));
    plan.entries.push_back(entry);
  }
  if (plan.entries.empty()) throw std::runtime_error(path.string() + ": empty plan");
  return plan;
}

PlanFile make_plan(const std::vector<double>& raw, const RefinePlan& refine) {
  const std::vector<double> normalized = normalize_minmax(raw);
  std::vector<bool> kept(raw.size(), false);
  for (std::size_t i : refine.kept_indices) kept[i] = true;
  PlanFile plan;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    plan.entries.push_back({i, raw[i], normalized[i], kept[i]});
  }
  std::sort(plan.entries.begin(), plan.entries.end(), [](const auto& a, const auto& b) {
    if (a.normalized != b.normalized) return a.normalized > b.normalized;
    return a.index < b.index;
  });
  return plan;
}

// ---------------------------------------------------------------------------

struct SynthTabularArgs {
  std::uint64_t seed = 1;
  std::size_t n = 1000;
  std::size_t d = 13;
  std::size_t k = 10;
  std::string informative = "0,1,2,3,4";
  std::string out;
};

int run_synth_tabular(const SynthTabularArgs& args) {
  auto [data, truth] =
      synth_tabular(args.seed, args.n, args.d, args.k,
                    parse_index_list(args.informative, "--informative"));
  const fs::path csv_path = args.out + ".csv";
  const fs::path truth_path = args.out + ".truth.json";
  write_csv(data, csv_path);
  write_ground_truth(truth, truth_path);
  std::cout << "dataset " << csv_path.string() << '\n';
  std::cout << "truth " << truth_path.string() << '\n';
  return 0;
}

struct SynthMoviesArgs {
  std::uint64_t seed = 1;
  std::size_t n = 100;
  std::size_t frames = 10;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t k = 2;
  std::string bbox = "12,12,8,8";
  std::string signal_frames = "4,5,8,9";
  std::string out;
};

int run_synth_movies(const SynthMoviesArgs& args) {
  const std::vector<std::size_t> box = parse_index_list(args.bbox, "--bbox");
  if (box.size() != 4) throw CLI::ValidationError("--bbox", "expected row,col,height,width");
  auto [data, truth] = synth_movies(args.seed, args.n, args.frames, args.height, args.width,
                                    BBox{box[0], box[1], box[2], box[3]},
                                    parse_index_list(args.signal_frames, "--signal-frames"),
                                    args.k);
  const fs::path manifest = write_movie_dataset(data, args.out);
  const fs::path truth_path = args.out + ".truth.json";
  write_ground_truth(truth, truth_path);
  std::cout << "manifest " << manifest.string() << '\n';
  std::cout << "truth " << truth_path.string() << '\n';
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string mode;
  std::string out_model;
  std::string stats_out;
  std::uint64_t seed = 1;
  std::size_t epochs = 500;
  double lr = 0.1;
  double momentum = 0.9;
  double target_mse = 0.01;
  double aux_weight = 0.5;
  bool no_shuffle = false;
  std::string class_hidden;
  std::string integrator_hidden;
  std::string frame_hidden;
};

TrainConfig config_from(const TrainArgs& args) {
  TrainConfig config;
  config.learning_rate = args.lr;
  config.momentum = args.momentum;
  config.max_epochs = args.epochs;
  config.target_mse = args.target_mse;
  config.seed = args.seed;
  config.shuffle_each_epoch = !args.no_shuffle;
  config.validate();
  return config;
}

void write_train_stats(const std::string& path, double seconds, const TrainResult& result) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "{\n  \"train_seconds\": " << fmt_double(seconds)
      << ",\n  \"epochs_run\": " << result.epochs_run << ",\n  \"final_mse\": "
      << (result.epoch_mse.empty() ? "null" : fmt_double(result.epoch_mse.back()))
      << ",\n  \"reached_target\": " << (result.reached_target ? "true" : "false") << "\n}\n";
}

int run_train(const TrainArgs& args) {
  const TrainConfig config = config_from(args);
  const TrainMode mode = TrainMode::with_aux(args.aux_weight);
  const auto on_epoch = [](std::size_t epoch, double mse) {
    std::printf("epoch %zu mse %.6f\n", epoch, mse);
  };

  if (args.mode == "tabular") {
    const TabularDataset data = read_csv(args.data);
    const std::size_t n_classes = data.max_label() + 1;
    if (n_classes < 2) throw std::runtime_error("train: need at least 2 classes in the data");
    std::vector<std::size_t> class_hidden = {15, 2};
    std::vector<std::size_t> integrator_hidden = {15, 20};
    if (!args.class_hidden.empty()) class_hidden = parse_index_list(args.class_hidden, "--class-hidden");
    if (!args.integrator_hidden.empty()) {
      integrator_hidden = parse_index_list(args.integrator_hidden, "--integrator-hidden");
    }
    S2an2Model model = build_s2an2(
        S2an2Spec::make(data.n_features, n_classes, class_hidden, integrator_hidden), args.seed);
    const auto start = Clock::now();
    const TrainResult result = train_s2an2(model, data, config, mode, on_epoch);
    const double elapsed = seconds_since(start);
    save_model(model, args.out_model);
    std::printf("train_seconds %.3f epochs %zu\n", elapsed, result.epochs_run);
    std::cout << "model " << args.out_model << '\n';
    write_train_stats(args.stats_out, elapsed, result);
    return 0;
  }
  if (args.mode == "movie") {
    const MovieDataset data = read_movie_manifest(args.data);
    std::size_t n_classes = 0;
    for (std::size_t label : data.labels) n_classes = std::max(n_classes, label + 1);
    if (n_classes < 2) throw std::runtime_error("train: need at least 2 classes in the data");
    std::vector<std::size_t> frame_hidden = {64, 16};
    std::vector<std::size_t> class_hidden = {15, 5};
    std::vector<std::size_t> integrator_hidden = {5, 2};
    if (!args.frame_hidden.empty()) frame_hidden = parse_index_list(args.frame_hidden, "--frame-hidden");
    if (!args.class_hidden.empty()) class_hidden = parse_index_list(args.class_hidden, "--class-hidden");
    if (!args.integrator_hidden.empty()) {
      integrator_hidden = parse_index_list(args.integrator_hidden, "--integrator-hidden");
    }
    MovieModel model = build_movie_model(
        MovieS2an2Spec::make(data.n_frames, data.height, data.width, n_classes, frame_hidden,
                             class_hidden, integrator_hidden),
        args.seed);
    const auto start = Clock::now();
    const TrainResult result = train_movie(model, data, config, mode, on_epoch);
    const double elapsed = seconds_since(start);
    save_model(model, args.out_model);
    std::printf("train_seconds %.3f epochs %zu\n", elapsed, result.epochs_run);
    std::cout << "model " << args.out_model << '\n';
    write_train_stats(args.stats_out, elapsed, result);
    return 0;
  }
  throw CLI::ValidationError("--mode", "must be 'tabular' or 'movie'");
}

struct RankArgs {
  std::string model;
  std::string out;
  std::string pixel_out;
  std::string cutoff_rule = "fixed";
  double cutoff = 0.5;
  double alpha = 0.3;
  bool use_std_dev = false;
  bool signed_sum = false;
};

CutoffRule rule_from(const RankArgs& args) {
  if (args.cutoff_rule == "fixed") return CutoffRule::fixed(args.cutoff);
  if (args.cutoff_rule == "meanvar") return CutoffRule::mean_var(args.alpha, args.use_std_dev);
  throw CLI::ValidationError("--cutoff-rule", "must be 'fixed' or 'meanvar'");
}

int run_rank(const RankArgs& args) {
  const CutoffRule rule = rule_from(args);
  const LoadedModel loaded = load_model(args.model);
  if (std::holds_alternative<S2an2Model>(loaded)) {
    const S2an2Model& model = std::get<S2an2Model>(loaded);
    const ImportanceTable table = per_class_importance(model, args.signed_sum);
    const RefinePlan refine = select_features(table.global, rule);
    write_plan(make_plan(table.global, refine), args.out);
    std::cout << "plan " << args.out << '\n';
    std::cout << "kept " << refine.kept_indices.size() << " of " << table.global.size()
              << " features\n";
    return 0;
  }
  const MovieModel& model = std::get<MovieModel>(loaded);
  const std::vector<double> frames = frame_importance(model, args.signed_sum);
  const RefinePlan refine = select_features(frames, rule);
  const Matrix pixels = pixel_importance(model, args.signed_sum);
  const PixelMask mask = pixel_mask(pixels, args.alpha, args.use_std_dev);

  PlanFile plan = make_plan(frames, refine);
  plan.bbox = mask.bbox;
  write_plan(plan, args.out);

  FrameSequence importance_image;
  importance_image.n_frames = 1;
  importance_image.height = model.spec.height;
  importance_image.width = model.spec.width;
  importance_image.pixels = pixels.data;
  const fs::path pixel_path =
      args.pixel_out.empty() ? fs::path(args.out).replace_extension(".pixels.s2frm")
                             : fs::path(args.pixel_out);
  write_movie_container(importance_image, pixel_path);

  std::cout << "plan " << args.out << '\n';
  std::cout << "pixel-importance " << pixel_path.string() << '\n';
  std::cout << "bbox " << mask.bbox.row_min << ',' << mask.bbox.col_min << ','
            << mask.bbox.height << ',' << mask.bbox.width << '\n';
  std::cout << "kept " << refine.kept_indices.size() << " of " << frames.size() << " frames\n";
  return 0;
}

struct RefineArgs {
  std::string model;
  std::string plan;
  std::string out_model;
  std::string data;
  std::string stats_out;
  bool retrain = false;
  bool prune = false;
  std::uint64_t seed = 1;
  std::size_t epochs = 500;
  double lr = 0.1;
  double momentum = 0.9;
  double target_mse = 0.01;
  double aux_weight = 0.5;
  bool no_shuffle = false;
};

int run_refine(const RefineArgs& args) {
  TrainArgs train_args;
  train_args.seed = args.seed;
  train_args.epochs = args.epochs;
  train_args.lr = args.lr;
  train_args.momentum = args.momentum;
  train_args.target_mse = args.target_mse;
  train_args.no_shuffle = args.no_shuffle;
  const TrainConfig config = config_from(train_args);
  const TrainMode mode = TrainMode::with_aux(args.aux_weight);

  const PlanFile plan_file = read_plan(args.plan);
  const LoadedModel loaded = load_model(args.model);

  if (std::holds_alternative<S2an2Model>(loaded)) {
    const S2an2Model& model = std::get<S2an2Model>(loaded);
    const RefinePlan plan = plan_file.to_refine_plan();
    const std::size_t before = model.parameter_count();
    if (args.prune) {
      const S2an2Model pruned = prune_model(model, plan);
      save_model(pruned, args.out_model);
      std::printf("mode prune\nparameters before %zu after %zu\n", before,
                  pruned.parameter_count());
    } else {
      const TabularDataset data = apply_plan(read_csv(args.data), plan);
      S2an2Model refined = build_s2an2(refine_spec(model.spec, plan), args.seed);
      const auto start = Clock::now();
      const TrainResult result = train_s2an2(refined, data, config, mode);
      const double elapsed = seconds_since(start);
      save_model(refined, args.out_model);
      std::printf("mode retrain\nparameters before %zu after %zu\n", before,
                  refined.parameter_count());
      std::printf("train_seconds %.3f epochs %zu\n", elapsed, result.epochs_run);
      write_train_stats(args.stats_out, elapsed, result);
    }
    std::cout << "model " << args.out_model << '\n';
    return 0;
  }

  const MovieModel& model = std::get<MovieModel>(loaded);
  if (!plan_file.bbox.has_value()) {
    throw std::runtime_error(args.plan + ": movie refinement needs the bbox comment");
  }
  const BBox bbox = *plan_file.bbox;
  std::vector<std::size_t> kept_frames;
  for (const auto& e : plan_file.entries) {
    if (e.kept) kept_frames.push_back(e.index);
  }
  std::sort(kept_frames.begin(), kept_frames.end());
  const std::size_t before = model.parameter_count();
  if (args.prune) {
    const MovieModel pruned = prune_movie_model(model, bbox, kept_frames);
    save_model(pruned, args.out_model);
    std::printf("mode prune\nparameters before %zu after %zu\n", before,
                pruned.parameter_count());
  } else {
    const MovieDataset data = crop_dataset(read_movie_manifest(args.data), bbox, kept_frames);
    MovieModel refined =
        build_movie_model(refine_movie_spec(model.spec, bbox, kept_frames), args.seed);
    const auto start = Clock::now();
    const TrainResult result = train_movie(refined, data, config, mode);
    const double elapsed = seconds_since(start);
    save_model(refined, args.out_model);
    std::printf("mode retrain\nparameters before %zu after %zu\n", before,
                refined.parameter_count());
    std::printf("train_seconds %.3f epochs %zu\n", elapsed, result.epochs_run);
    write_train_stats(args.stats_out, elapsed, result);
  }
  std::cout << "model " << args.out_model << '\n';
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string plan;
  std::string out;
  std::string train_stats;
};

std::optional<double> train_seconds_from(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string key = "\"train_seconds\":";
  const std::size_t pos = text.find(key);
  if (pos == std::string::npos) throw std::runtime_error(path + ": no train_seconds field");
  return std::strtod(text.c_str() + pos + key.size(), nullptr);
}

int run_eval(const EvalArgs& args) {
  const LoadedModel loaded = load_model(args.model);
  EvalRecord record;
  if (std::holds_alternative<S2an2Model>(loaded)) {
    const S2an2Model& model = std::get<S2an2Model>(loaded);
    TabularDataset data = read_csv(args.data);
    if (!args.plan.empty()) data = apply_plan(data, read_plan(args.plan).to_refine_plan());
    for (std::size_t label : data.labels) {
      if (label >= model.spec.n_classes) throw std::runtime_error("eval: label out of range");
    }
    ConfusionMatrix confusion(model.spec.n_classes);
    const auto start = Clock::now();
    for (std::size_t i = 0; i < data.n(); ++i) {
      confusion.add(data.labels[i], predict(model, data.sample(i)));
    }
    record.resources.eval_seconds = seconds_since(start);
    record.model_kind = "tabular";
    record.metrics = metrics_from_confusion(confusion);
    record.resources.parameter_count = model.parameter_count();
  } else {
    const MovieModel& model = std::get<MovieModel>(loaded);
    MovieDataset data = read_movie_manifest(args.data);
    if (!args.plan.empty()) {
      const PlanFile plan_file = read_plan(args.plan);
      if (!plan_file.bbox.has_value()) {
        throw std::runtime_error(args.plan + ": movie evaluation needs the bbox comment");
      }
      std::vector<std::size_t> kept_frames;
      for (const auto& e : plan_file.entries) {
        if (e.kept) kept_frames.push_back(e.index);
      }
      std::sort(kept_frames.begin(), kept_frames.end());
      data = crop_dataset(data, *plan_file.bbox, kept_frames);
    }
    for (std::size_t label : data.labels) {
      if (label >= model.spec.n_classes) throw std::runtime_error("eval: label out of range");
    }
    ConfusionMatrix confusion(model.spec.n_classes);
    const auto start = Clock::now();
    for (std::size_t i = 0; i < data.n(); ++i) {
      confusion.add(data.labels[i], predict_movie(model, data.movies[i]));
    }
    record.resources.eval_seconds = seconds_since(start);
    record.model_kind = "movie";
    record.metrics = metrics_from_confusion(confusion);
    record.resources.parameter_count = model.parameter_count();
  }
  record.resources.model_bytes = fs::file_size(args.model);
  record.resources.train_seconds = train_seconds_from(args.train_stats);

  const EvalMetrics& m = record.metrics;
  std::printf("samples %zu\n", m.n_samples);
  std::printf("accuracy %.4f\n", m.accuracy);
  std::printf("%-6s %8s %8s %8s %10s %10s\n", "class", "support", "tp", "fp", "precision",
              "accuracy");
  for (std::size_t k = 0; k < m.confusion.n_classes; ++k) {
    const std::size_t tp = m.confusion.at(k, k);
    const std::size_t fp = m.confusion.predicted_count(k) - tp;
    const std::string prec =
        m.per_class_precision[k].has_value()
            ? [&] { char b[16]; std::snprintf(b, sizeof(b), "%.4f", *m.per_class_precision[k]); return std::string(b); }()
            : "n/a";
    const std::string acc =
        m.per_class_accuracy[k].has_value()
            ? [&] { char b[16]; std::snprintf(b, sizeof(b), "%.4f", *m.per_class_accuracy[k]); return std::string(b); }()
            : "n/a";
    std::printf("%-6zu %8zu %8zu %8zu %10s %10s\n", k, m.confusion.support(k), tp, fp,
                prec.c_str(), acc.c_str());
  }
  std::printf("confusion (rows true, columns predicted)\n");
  for (std::size_t t = 0; t < m.confusion.n_classes; ++t) {
    for (std::size_t p = 0; p < m.confusion.n_classes; ++p) {
      std::printf("%s%zu", p == 0 ? "" : " ", m.confusion.at(t, p));
    }
    std::printf("\n");
  }
  std::printf("parameter_count %zu\n", record.resources.parameter_count);
  std::printf("model_bytes %zu\n", record.resources.model_bytes);
  std::printf("eval_seconds %.3f\n", *record.resources.eval_seconds);
  if (!args.out.empty()) {
    write_eval_record(record, args.out);
    std::cout << "metrics " << args.out << '\n';
  }
  return 0;
}

struct ReportArgs {
  std::string original;
  std::string refined;
  std::string out_prefix = "report";
};

int run_report(const ReportArgs& args) {
  const RunReport report =
      make_run_report(read_eval_record(args.original), read_eval_record(args.refined));
  std::cout << format_report(report);
  const fs::path csv_path = args.out_prefix + ".csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw std::runtime_error(csv_path.string() + ": cannot open for writing");
  out << report_csv(report);
  out.flush();
  if (!out) throw std::runtime_error(csv_path.string() + ": write failed");
  std::cout << "csv " << csv_path.string() << '\n';
  return 0;
}

struct GradcheckArgs {
  std::string preset;
  std::size_t seeds = 20;
  double eps = 1e-5;
  double tolerance = 1e-4;
};

int run_gradcheck(const GradcheckArgs& args) {
  GradientCheckReport worst;
  bool first = true;
  auto track = [&](const GradientCheckReport& report, std::uint64_t seed) {
    std::printf("seed %llu max_rel_error %.3e at %s\n",
                static_cast<unsigned long long>(seed), report.max_rel_error,
                report.location.c_str());
    if (first || report.max_rel_error > worst.max_rel_error) {
      first = false;
      worst = report;
    }
  };

  if (args.preset == "tiny-tabular") {
    const S2an2Spec spec = S2an2Spec::make(4, 3, {3}, {3});
    for (std::uint64_t seed = 1; seed <= args.seeds; ++seed) {
      const S2an2Model model = build_s2an2(spec, seed);
      Rng rng(seed * 7919 + 13);
      std::vector<double> x(spec.n_features);
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      track(s2an2_gradient_check(model, x, seed % spec.n_classes, args.eps), seed);
    }
  } else if (args.preset == "tiny-movie") {
    const MovieS2an2Spec spec = MovieS2an2Spec::make(2, 3, 3, 2, {4}, {3}, {3});
    for (std::uint64_t seed = 1; seed <= args.seeds; ++seed) {
      const MovieModel model = build_movie_model(spec, seed);
      Rng rng(seed * 7919 + 13);
      FrameSequence movie;
      movie.n_frames = spec.n_frames;
      movie.height = spec.height;
      movie.width = spec.width;
      movie.pixels.resize(movie.n_frames * movie.frame_size());
      for (double& v : movie.pixels) v = rng.uniform(-1.0, 1.0);
      track(movie_gradient_check(model, movie, seed % spec.n_classes, args.eps), seed);
    }
  } else {
    throw CLI::ValidationError("--spec-preset", "must be 'tiny-tabular' or 'tiny-movie'");
  }

  std::printf("worst %s analytic %.10e numeric %.10e rel %.3e\n", worst.location.c_str(),
              worst.analytic, worst.numeric, worst.max_rel_error);
  if (worst.max_rel_error < args.tolerance) {
    std::printf("gradcheck PASS (tolerance %.1e)\n", args.tolerance);
    return 0;
  }
  std::printf("gradcheck FAIL (tolerance %.1e)\n", args.tolerance);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S2AN2: hierarchical back-propagation ensemble with weight-based refinement"};
  app.require_subcommand(1);

  SynthTabularArgs synth_tabular_args;
  CLI::App* synth_tab = app.add_subcommand("synth-tabular", "generate a labeled tabular dataset");
  synth_tab->add_option("--seed", synth_tabular_args.seed, "generator seed");
  synth_tab->add_option("--n", synth_tabular_args.n, "sample count");
  synth_tab->add_option("--d", synth_tabular_args.d, "feature count");
  synth_tab->add_option("--k", synth_tabular_args.k, "class count");
  synth_tab->add_option("--informative", synth_tabular_args.informative,
                        "comma-separated informative feature indices");
  synth_tab->add_option("--out", synth_tabular_args.out, "output prefix")->required();

  SynthMoviesArgs synth_movies_args;
  CLI::App* synth_mov = app.add_subcommand("synth-movies", "generate a labeled movie dataset");
  synth_mov->add_option("--seed", synth_movies_args.seed, "generator seed");
  synth_mov->add_option("--n", synth_movies_args.n, "movie count");
  synth_mov->add_option("--frames", synth_movies_args.frames, "frames per movie");
  synth_mov->add_option("--height", synth_movies_args.height, "frame height");
  synth_mov->add_option("--width", synth_movies_args.width, "frame width");
  synth_mov->add_option("--k", synth_movies_args.k, "class count");
  synth_mov->add_option("--bbox", synth_movies_args.bbox, "signal box as row,col,height,width");
  synth_mov->add_option("--signal-frames", synth_movies_args.signal_frames,
                        "comma-separated 0-based signal frame indices");
  synth_mov->add_option("--out", synth_movies_args.out, "output prefix")->required();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a model on a dataset");
  train->add_option("--data", train_args.data, "CSV file or movie manifest")->required();
  train->add_option("--mode", train_args.mode, "tabular or movie")->required();
  train->add_option("--out-model", train_args.out_model, "model output path")->required();
  train->add_option("--seed", train_args.seed, "build + shuffle seed");
  train->add_option("--epochs", train_args.epochs, "epoch cap");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--momentum", train_args.momentum, "momentum in [0,1)");
  train->add_option("--target-mse", train_args.target_mse, "stop when epoch MSE reaches this");
  train->add_option("--aux-weight", train_args.aux_weight,
                    "weight of the per-class +1/-1 auxiliary targets");
  train->add_flag("--no-shuffle", train_args.no_shuffle, "keep sample order fixed");
  train->add_option("--class-hidden", train_args.class_hidden, "class UBP hidden sizes");
  train->add_option("--integrator-hidden", train_args.integrator_hidden,
                    "integrator hidden sizes");
  train->add_option("--frame-hidden", train_args.frame_hidden, "frame UBP hidden sizes (movie)");
  train->add_option("--stats-out", train_args.stats_out, "write training stats JSON here");

  RankArgs rank_args;
  CLI::App* rank = app.add_subcommand("rank", "rank inputs by trained weight mass");
  rank->add_option("--model", rank_args.model, "trained model")->required();
  rank->add_option("--out", rank_args.out, "plan CSV output path")->required();
  rank->add_option("--cutoff-rule", rank_args.cutoff_rule, "fixed or meanvar");
  rank->add_option("--cutoff", rank_args.cutoff, "threshold for the fixed rule");
  rank->add_option("--alpha", rank_args.alpha, "alpha for meanvar and the pixel mask");
  rank->add_flag("--std-dev", rank_args.use_std_dev, "meanvar subtracts alpha*stddev instead");
  rank->add_flag("--signed", rank_args.signed_sum, "sum signed weights instead of |w|");
  rank->add_option("--pixel-out", rank_args.pixel_out,
                   "pixel-importance container path (movie models)");

  RefineArgs refine_args;
  CLI::App* refine = app.add_subcommand("refine", "rebuild-and-retrain or prune per a plan");
  refine->add_option("--model", refine_args.model, "trained model")->required();
  refine->add_option("--plan", refine_args.plan, "plan CSV from rank")->required();
  refine->add_option("--out-model", refine_args.out_model, "refined model output")->required();
  CLI::Option* retrain_flag = refine->add_flag("--retrain", refine_args.retrain,
                                               "rebuild the reduced spec and retrain");
  CLI::Option* prune_flag =
      refine->add_flag("--prune", refine_args.prune, "drop columns, keep trained weights");
  retrain_flag->excludes(prune_flag);
  refine->add_option("--data", refine_args.data, "training data (retrain mode)");
  refine->add_option("--seed", refine_args.seed, "build + shuffle seed");
  refine->add_option("--epochs", refine_args.epochs, "epoch cap");
  refine->add_option("--lr", refine_args.lr, "learning rate");
  refine->add_option("--momentum", refine_args.momentum, "momentum in [0,1)");
  refine->add_option("--target-mse", refine_args.target_mse, "stop when epoch MSE reaches this");
  refine->add_option("--aux-weight", refine_args.aux_weight, "auxiliary target weight");
  refine->add_flag("--no-shuffle", refine_args.no_shuffle, "keep sample order fixed");
  refine->add_option("--stats-out", refine_args.stats_out, "write training stats JSON here");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
  eval->add_option("--model", eval_args.model, "model path")->required();
  eval->add_option("--data", eval_args.data, "CSV file or movie manifest")->required();
  eval->add_option("--plan", eval_args.plan, "apply this plan's reduction to the data first");
  eval->add_option("--out", eval_args.out, "write metrics JSON here");
  eval->add_option("--train-stats", eval_args.train_stats, "training stats JSON to fold in");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "merge two eval outputs into ratio tables");
  report->add_option("--original", report_args.original, "metrics JSON of the original model")
      ->required();
  report->add_option("--refined", report_args.refined, "metrics JSON of the refined model")
      ->required();
  report->add_option("--out-prefix", report_args.out_prefix, "CSV output prefix");

  GradcheckArgs gradcheck_args;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gradcheck->add_option("--spec-preset", gradcheck_args.preset, "tiny-tabular or tiny-movie")
      ->required();
  gradcheck->add_option("--seeds", gradcheck_args.seeds, "number of seeds");
  gradcheck->add_option("--eps", gradcheck_args.eps, "finite-difference step");
  gradcheck->add_option("--tolerance", gradcheck_args.tolerance, "pass/fail threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(synth_tab)) return run_synth_tabular(synth_tabular_args);
    if (app.got_subcommand(synth_mov)) return run_synth_movies(synth_movies_args);
    if (app.got_subcommand(train)) return run_train(train_args);
    if (app.got_subcommand(rank)) return run_rank(rank_args);
    if (app.got_subcommand(refine)) {
      if (!refine_args.retrain && !refine_args.prune) {
        std::cerr << "error: refine needs --retrain or --prune\n";
        return 2;
      }
      if (refine_args.retrain && refine_args.data.empty()) {
        std::cerr << "error: --retrain needs --data\n";
        return 2;
      }
      return run_refine(refine_args);
    }
    if (app.got_subcommand(eval)) return run_eval(eval_args);
    if (app.got_subcommand(report)) return run_report(report_args);
    if (app.got_subcommand(gradcheck)) return run_gradcheck(gradcheck_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
