#include "s2an2/vector_mode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "s2an2/rng.hpp"

namespace s2an2 {

void FrameSequence::validate() const {
  if (n_frames == 0 || height == 0 || width == 0) {
    throw std::runtime_error("FrameSequence: zero dimension");
  }
  if (pixels.size() != n_frames * height * width) {
    throw std::runtime_error("FrameSequence: pixel storage does not match dimensions");
  }
  for (double v : pixels) {
    if (!std::isfinite(v)) throw std::runtime_error("FrameSequence: non-finite pixel");
  }
}

void MovieDataset::validate() const {
  if (movies.size() != labels.size()) {
    throw std::runtime_error("MovieDataset: movie/label count mismatch");
  }
  for (const FrameSequence& movie : movies) {
    movie.validate();
    if (movie.n_frames != n_frames || movie.height != height || movie.width != width) {
      throw std::runtime_error("MovieDataset: inconsistent movie dimensions");
    }
  }
}

MovieS2an2Spec MovieS2an2Spec::make(std::size_t n_frames, std::size_t height, std::size_t width,
                                    std::size_t n_classes, std::vector<std::size_t> frame_hidden,
                                    std::vector<std::size_t> class_hidden,
                                    std::vector<std::size_t> integrator_hidden) {
  MovieS2an2Spec spec;
  spec.n_frames = n_frames;
  spec.height = height;
  spec.width = width;
  spec.n_classes = n_classes;

  spec.frame_ubp_spec.layer_sizes.push_back(height * width);
  for (std::size_t h : frame_hidden) spec.frame_ubp_spec.layer_sizes.push_back(h);
  spec.frame_ubp_spec.layer_sizes.push_back(1);
  spec.frame_ubp_spec.output_activation = ActivationKind::bipolar_sigmoid;

  spec.class_ubp_spec.layer_sizes.push_back(n_frames);
  for (std::size_t h : class_hidden) spec.class_ubp_spec.layer_sizes.push_back(h);
  spec.class_ubp_spec.layer_sizes.push_back(1);
  spec.class_ubp_spec.output_activation = ActivationKind::bipolar_sigmoid;

  spec.integrator_spec.layer_sizes.push_back(n_classes);
  for (std::size_t h : integrator_hidden) spec.integrator_spec.layer_sizes.push_back(h);
  spec.integrator_spec.layer_sizes.push_back(class_code_bits(n_classes));
  spec.integrator_spec.output_activation = ActivationKind::sigmoid;

  spec.validate();
  return spec;
}

void MovieS2an2Spec::validate() const {
  if (n_frames == 0 || height == 0 || width == 0) {
    throw std::invalid_argument("MovieS2an2Spec: zero dimension");
  }
  if (n_classes < 2) throw std::invalid_argument("MovieS2an2Spec: need at least 2 classes");
  frame_ubp_spec.validate();
  class_ubp_spec.validate();
  integrator_spec.validate();
  if (frame_ubp_spec.input_size() != height * width || frame_ubp_spec.output_size() != 1 ||
      frame_ubp_spec.output_activation != ActivationKind::bipolar_sigmoid) {
    throw std::invalid_argument("MovieS2an2Spec: bad frame UBP spec");
  }
  if (class_ubp_spec.input_size() != n_frames || class_ubp_spec.output_size() != 1 ||
      class_ubp_spec.output_activation != ActivationKind::bipolar_sigmoid) {
    throw std::invalid_argument("MovieS2an2Spec: bad class UBP spec");
  }
  if (integrator_spec.input_size() != n_classes ||
      integrator_spec.output_size() != n_bits() ||
      integrator_spec.output_activation != ActivationKind::sigmoid) {
    throw std::invalid_argument("MovieS2an2Spec: bad integrator spec");
  }
}

std::size_t MovieModel::parameter_count() const {
  std::size_t count = integrator.parameter_count();
  for (const UbpNetwork& net : frame_ubps) count += net.parameter_count();
  for (const UbpNetwork& net : class_ubps) count += net.parameter_count();
  return count;
}

void MovieModel::validate() const {
  spec.validate();
  if (frame_ubps.size() != spec.n_frames || class_ubps.size() != spec.n_classes) {
    throw std::runtime_error("MovieModel: tier sizes disagree with spec");
  }
  for (const UbpNetwork& net : frame_ubps) {
    if (!(net.spec == spec.frame_ubp_spec)) throw std::runtime_error("MovieModel: frame UBP spec mismatch");
    net.validate();
  }
  for (const UbpNetwork& net : class_ubps) {
    if (!(net.spec == spec.class_ubp_spec)) throw std::runtime_error("MovieModel: class UBP spec mismatch");
    net.validate();
  }
  if (!(integrator.spec == spec.integrator_spec)) {
    throw std::runtime_error("MovieModel: integrator spec mismatch");
  }
  integrator.validate();
  if (boundary_weights.size() != spec.n_classes) {
    throw std::runtime_error("MovieModel: boundary weight count disagrees with spec");
  }
  for (double w : boundary_weights) {
    if (w != 1.0) throw std::runtime_error("MovieModel: boundary weight is not exactly 1");
  }
}

MovieModel build_movie_model(const MovieS2an2Spec& spec, std::uint64_t seed) {
  spec.validate();
  MovieModel model;
  model.spec = spec;
  model.integrator = init_network(spec.integrator_spec, seed);
  model.frame_ubps.reserve(spec.n_frames);
  for (std::size_t f = 0; f < spec.n_frames; ++f) {
    model.frame_ubps.push_back(init_network(spec.frame_ubp_spec, seed + 1 + f));
  }
  model.class_ubps.reserve(spec.n_classes);
  for (std::size_t k = 0; k < spec.n_classes; ++k) {
    model.class_ubps.push_back(init_network(spec.class_ubp_spec, seed + 1 + spec.n_frames + k));
  }
  model.boundary_weights.assign(spec.n_classes, 1.0);
  return model;
}

namespace {

struct MovieWorkspace {
  std::vector<ForwardTrace> frame_traces;
  std::vector<ForwardTrace> class_traces;
  ForwardTrace integrator_trace;
  std::vector<double> frame_outputs;
  std::vector<double> integrator_input;
  std::vector<double> integrator_error;
  std::vector<double> boundary_error;
  std::vector<double> class_input_error;
  std::vector<double> frame_error;  // summed upstream error per frame UBP
  std::vector<Gradients> frame_grads;
  std::vector<Gradients> class_grads;
  Gradients integrator_grads;
  std::vector<double> target;

  explicit MovieWorkspace(const MovieModel& model)
      : frame_traces(model.spec.n_frames),
        class_traces(model.spec.n_classes),
        frame_outputs(model.spec.n_frames, 0.0),
        integrator_input(model.spec.n_classes, 0.0),
        frame_error(model.spec.n_frames, 0.0),
        frame_grads(model.spec.n_frames),
        class_grads(model.spec.n_classes),
        target(model.spec.n_bits(), 0.0) {
    for (std::size_t f = 0; f < model.spec.n_frames; ++f) {
      frame_grads[f] = Gradients::zeros_like(model.frame_ubps[f]);
    }
    for (std::size_t k = 0; k < model.spec.n_classes; ++k) {
      class_grads[k] = Gradients::zeros_like(model.class_ubps[k]);
    }
    integrator_grads = Gradients::zeros_like(model.integrator);
  }
};

double backprop_movie(const MovieModel& model, const FrameSequence& movie, std::size_t label,
                      double aux_weight, MovieWorkspace& ws) {
  const std::size_t n_frames = model.spec.n_frames;
  const std::size_t n_classes = model.spec.n_classes;
  for (std::size_t f = 0; f < n_frames; ++f) {
    forward_into(model.frame_ubps[f], movie.frame(f), ws.frame_traces[f]);
    ws.frame_outputs[f] = ws.frame_traces[f].output()[0];
  }
  for (std::size_t k = 0; k < n_classes; ++k) {
    forward_into(model.class_ubps[k], ws.frame_outputs, ws.class_traces[k]);
    ws.integrator_input[k] = model.boundary_weights[k] * ws.class_traces[k].output()[0];
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

  std::fill(ws.frame_error.begin(), ws.frame_error.end(), 0.0);
  double up[1];
  for (std::size_t k = 0; k < n_classes; ++k) {
    up[0] = ws.boundary_error[k] * model.boundary_weights[k];
    if (aux_weight != 0.0) {
      const double own_target = (label == k) ? 1.0 : -1.0;
      up[0] += aux_weight * (ws.class_traces[k].output()[0] - own_target);
    }
    backward_into(model.class_ubps[k], ws.class_traces[k], std::span<const double>(up, 1),
                  ws.class_grads[k], &ws.class_input_error);
    for (std::size_t f = 0; f < n_frames; ++f) ws.frame_error[f] += ws.class_input_error[f];
  }
  for (std::size_t f = 0; f < n_frames; ++f) {
    up[0] = ws.frame_error[f];
    backward_into(model.frame_ubps[f], ws.frame_traces[f], std::span<const double>(up, 1),
                  ws.frame_grads[f], nullptr);
  }
  return loss;
}

}  // namespace

MovieForward forward_movie(const MovieModel& model, const FrameSequence& movie) {
  if (movie.n_frames != model.spec.n_frames || movie.height != model.spec.height ||
      movie.width != model.spec.width) {
    throw std::invalid_argument("forward_movie: movie dimensions do not match the spec");
  }
  MovieForward result;
  result.frame_outputs.resize(model.spec.n_frames);
  for (std::size_t f = 0; f < model.spec.n_frames; ++f) {
    result.frame_outputs[f] = forward(model.frame_ubps[f], movie.frame(f)).output()[0];
  }
  result.class_outputs.resize(model.spec.n_classes);
  std::vector<double> integrator_input(model.spec.n_classes);
  for (std::size_t k = 0; k < model.spec.n_classes; ++k) {
    result.class_outputs[k] = forward(model.class_ubps[k], result.frame_outputs).output()[0];
    integrator_input[k] = model.boundary_weights[k] * result.class_outputs[k];
  }
  result.output = forward(model.integrator, integrator_input).output();
  return result;
}

std::size_t predict_movie(const MovieModel& model, const FrameSequence& movie) {
  return decode_class(forward_movie(model, movie).output, model.spec.n_classes);
}

TrainResult train_movie(MovieModel& model, const MovieDataset& data, const TrainConfig& config,
                        const TrainMode& mode, const EpochCallback& on_epoch) {
  config.validate();
  data.validate();
  if (data.n() == 0) throw std::invalid_argument("train_movie: empty dataset");
  if (data.n_frames != model.spec.n_frames || data.height != model.spec.height ||
      data.width != model.spec.width) {
    throw std::invalid_argument("train_movie: dataset dimensions do not match the spec");
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.labels[i] >= model.spec.n_classes) {
      throw std::invalid_argument("train_movie: label out of range at movie " + std::to_string(i));
    }
  }

  MovieWorkspace ws(model);
  std::vector<Gradients> frame_velocity(model.spec.n_frames);
  for (std::size_t f = 0; f < model.spec.n_frames; ++f) {
    frame_velocity[f] = Gradients::zeros_like(model.frame_ubps[f]);
  }
  std::vector<Gradients> class_velocity(model.spec.n_classes);
  for (std::size_t k = 0; k < model.spec.n_classes; ++k) {
    class_velocity[k] = Gradients::zeros_like(model.class_ubps[k]);
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
          backprop_movie(model, data.movies[idx], data.labels[idx], mode.aux_weight, ws);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train_movie: non-finite loss at epoch " +
                                 std::to_string(epoch + 1));
      }
      loss_sum += loss;
      apply_update(model.integrator, ws.integrator_grads, integrator_velocity,
                   config.learning_rate, config.momentum);
      for (std::size_t k = 0; k < model.spec.n_classes; ++k) {
        apply_update(model.class_ubps[k], ws.class_grads[k], class_velocity[k],
                     config.learning_rate, config.momentum);
      }
      for (std::size_t f = 0; f < model.spec.n_frames; ++f) {
        apply_update(model.frame_ubps[f], ws.frame_grads[f], frame_velocity[f],
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

Matrix pixel_importance(const MovieModel& model, bool signed_sum) {
  const std::size_t height = model.spec.height;
  const std::size_t width = model.spec.width;
  Matrix values(height, width);
  for (const UbpNetwork& net : model.frame_ubps) {
    const Matrix& w1 = net.weights.front();
    for (std::size_t h = 0; h < w1.rows; ++h) {
      const double* row = w1.row(h);
      for (std::size_t p = 0; p < w1.cols; ++p) {
        values.data[p] += signed_sum ? row[p] : std::abs(row[p]);
      }
    }
  }
  return values;
}

PixelMask pixel_mask(const Matrix& values, double alpha, bool use_std_dev) {
  if (values.data.empty()) throw std::invalid_argument("pixel_mask: empty matrix");
  const double spread = use_std_dev ? std::sqrt(population_variance(values.data))
                                    : population_variance(values.data);
  const double cutoff = mean_of(values.data) - alpha * spread;

  PixelMask result;
  result.cutoff = cutoff;
  result.mask.assign(values.data.size(), 0);
  std::size_t row_min = values.rows, row_max = 0;
  std::size_t col_min = values.cols, col_max = 0;
  bool any = false;
  for (std::size_t r = 0; r < values.rows; ++r) {
    for (std::size_t c = 0; c < values.cols; ++c) {
      if (values.at(r, c) >= cutoff) {
        result.mask[r * values.cols + c] = 1;
        any = true;
        row_min = std::min(row_min, r);
        row_max = std::max(row_max, r);
        col_min = std::min(col_min, c);
        col_max = std::max(col_max, c);
      }
    }
  }
  if (!any) {
    throw std::runtime_error("pixel_mask: cutoff is above every value; nothing kept");
  }
  result.bbox = BBox{row_min, col_min, row_max - row_min + 1, col_max - col_min + 1};
  return result;
}

std::vector<double> frame_importance(const MovieModel& model, bool signed_sum) {
  std::vector<double> values(model.spec.n_frames, 0.0);
  for (const UbpNetwork& net : model.class_ubps) {
    const Matrix& w1 = net.weights.front();
    for (std::size_t h = 0; h < w1.rows; ++h) {
      const double* row = w1.row(h);
      for (std::size_t f = 0; f < w1.cols; ++f) {
        values[f] += signed_sum ? row[f] : std::abs(row[f]);
      }
    }
  }
  return values;
}

namespace {

void validate_crop(const BBox& bbox, const std::vector<std::size_t>& kept_frames,
                   std::size_t n_frames, std::size_t height, std::size_t width) {
  if (bbox.height == 0 || bbox.width == 0) throw std::invalid_argument("crop: empty box");
  if (bbox.row_min + bbox.height > height || bbox.col_min + bbox.width > width) {
    throw std::invalid_argument("crop: box exceeds the frame");
  }
  if (kept_frames.empty()) throw std::invalid_argument("crop: no frames kept");
  for (std::size_t i = 0; i < kept_frames.size(); ++i) {
    if (kept_frames[i] >= n_frames) throw std::invalid_argument("crop: frame index out of range");
    if (i > 0 && kept_frames[i] <= kept_frames[i - 1]) {
      throw std::invalid_argument("crop: frame indices must increase");
    }
  }
}

}  // namespace

FrameSequence crop_sequence(const FrameSequence& movie, const BBox& bbox,
                            const std::vector<std::size_t>& kept_frames) {
  validate_crop(bbox, kept_frames, movie.n_frames, movie.height, movie.width);
  FrameSequence out;
  out.n_frames = kept_frames.size();
  out.height = bbox.height;
  out.width = bbox.width;
  out.pixels.reserve(out.n_frames * out.frame_size());
  for (std::size_t f : kept_frames) {
    for (std::size_t r = 0; r < bbox.height; ++r) {
      for (std::size_t c = 0; c < bbox.width; ++c) {
        out.pixels.push_back(movie.at(f, bbox.row_min + r, bbox.col_min + c));
      }
    }
  }
  return out;
}

MovieDataset crop_dataset(const MovieDataset& data, const BBox& bbox,
                          const std::vector<std::size_t>& kept_frames) {
  data.validate();
  validate_crop(bbox, kept_frames, data.n_frames, data.height, data.width);
  MovieDataset out;
  out.n_frames = kept_frames.size();
  out.height = bbox.height;
  out.width = bbox.width;
  out.labels = data.labels;
  out.movies.reserve(data.n());
  for (const FrameSequence& movie : data.movies) {
    out.movies.push_back(crop_sequence(movie, bbox, kept_frames));
  }
  return out;
}

namespace {

std::size_t rescale_layer(std::size_t size, std::size_t new_input, std::size_t old_input) {
  if (size <= new_input) return size;
  const double scaled =
      static_cast<double>(size) * static_cast<double>(new_input) / static_cast<double>(old_input);
  const auto rounded = static_cast<std::size_t>(std::llround(scaled));
  return rounded == 0 ? 1 : rounded;
}

}  // namespace

MovieS2an2Spec refine_movie_spec(const MovieS2an2Spec& spec, const BBox& bbox,
                                 const std::vector<std::size_t>& kept_frames) {
  spec.validate();
  validate_crop(bbox, kept_frames, spec.n_frames, spec.height, spec.width);
  MovieS2an2Spec refined = spec;
  refined.height = bbox.height;
  refined.width = bbox.width;
  refined.n_frames = kept_frames.size();

  auto& frame_sizes = refined.frame_ubp_spec.layer_sizes;
  const std::size_t old_pixels = spec.height * spec.width;
  frame_sizes.front() = bbox.area();
  for (std::size_t l = 1; l + 1 < frame_sizes.size(); ++l) {
    frame_sizes[l] = rescale_layer(frame_sizes[l], bbox.area(), old_pixels);
  }

  auto& class_sizes = refined.class_ubp_spec.layer_sizes;
  class_sizes.front() = kept_frames.size();
  for (std::size_t l = 1; l + 1 < class_sizes.size(); ++l) {
    class_sizes[l] = rescale_layer(class_sizes[l], kept_frames.size(), spec.n_frames);
  }
  refined.validate();
  return refined;
}

MovieModel prune_movie_model(const MovieModel& model, const BBox& bbox,
                             const std::vector<std::size_t>& kept_frames) {
  model.validate();
  validate_crop(bbox, kept_frames, model.spec.n_frames, model.spec.height, model.spec.width);

  MovieModel pruned;
  pruned.spec = model.spec;
  pruned.spec.height = bbox.height;
  pruned.spec.width = bbox.width;
  pruned.spec.n_frames = kept_frames.size();
  pruned.spec.frame_ubp_spec.layer_sizes.front() = bbox.area();
  pruned.spec.class_ubp_spec.layer_sizes.front() = kept_frames.size();
  pruned.integrator = model.integrator;
  pruned.boundary_weights = model.boundary_weights;

  for (std::size_t f : kept_frames) {
    UbpNetwork net = model.frame_ubps[f];
    net.spec.layer_sizes.front() = bbox.area();
    const Matrix& old_w1 = model.frame_ubps[f].weights.front();
    Matrix w1(old_w1.rows, bbox.area());
    for (std::size_t h = 0; h < old_w1.rows; ++h) {
      std::size_t out_col = 0;
      for (std::size_t r = 0; r < bbox.height; ++r) {
        for (std::size_t c = 0; c < bbox.width; ++c) {
          const std::size_t pixel = (bbox.row_min + r) * model.spec.width + (bbox.col_min + c);
          w1.at(h, out_col++) = old_w1.at(h, pixel);
        }
      }
    }
    net.weights.front() = std::move(w1);
    pruned.frame_ubps.push_back(std::move(net));
  }

  for (const UbpNetwork& old_net : model.class_ubps) {
    UbpNetwork net = old_net;
    net.spec.layer_sizes.front() = kept_frames.size();
    const Matrix& old_w1 = old_net.weights.front();
    Matrix w1(old_w1.rows, kept_frames.size());
    for (std::size_t h = 0; h < old_w1.rows; ++h) {
      for (std::size_t i = 0; i < kept_frames.size(); ++i) {
        w1.at(h, i) = old_w1.at(h, kept_frames[i]);
      }
    }
    net.weights.front() = std::move(w1);
    pruned.class_ubps.push_back(std::move(net));
  }
  pruned.validate();
  return pruned;
}

GradientCheckReport movie_gradient_check(const MovieModel& model, const FrameSequence& movie,
                                         std::size_t label, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("movie_gradient_check: eps must be positive");
  if (label >= model.spec.n_classes) {
    throw std::invalid_argument("movie_gradient_check: label out of range");
  }
  MovieModel probe = model;
  MovieWorkspace ws(probe);
  backprop_movie(probe, movie, label, 0.0, ws);

  const std::vector<double> target = class_code_targets(label, model.spec.n_bits());
  auto loss_at = [&]() -> long double {
    std::vector<long double> frame_outputs(probe.spec.n_frames);
    for (std::size_t f = 0; f < probe.spec.n_frames; ++f) {
      const auto frame = movie.frame(f);
      const std::vector<long double> pixels(frame.begin(), frame.end());
      frame_outputs[f] = forward_extended(probe.frame_ubps[f], pixels)[0];
    }
    std::vector<long double> integrator_input(probe.spec.n_classes);
    for (std::size_t k = 0; k < probe.spec.n_classes; ++k) {
      integrator_input[k] = static_cast<long double>(probe.boundary_weights[k]) *
                            forward_extended(probe.class_ubps[k], frame_outputs)[0];
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

  for (std::size_t f = 0; f < probe.spec.n_frames; ++f) {
    sweep_network(probe.frame_ubps[f], ws.frame_grads[f], "frame" + std::to_string(f));
  }
  for (std::size_t k = 0; k < probe.spec.n_classes; ++k) {
    sweep_network(probe.class_ubps[k], ws.class_grads[k], "class" + std::to_string(k));
  }
  sweep_network(probe.integrator, ws.integrator_grads, "integrator");
  return report;
}

}  // namespace s2an2
