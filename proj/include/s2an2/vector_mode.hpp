#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "s2an2/feature_select.hpp"
#include "s2an2/s2an2.hpp"
#include "s2an2/ubp.hpp"

namespace s2an2 {

/// Fixed-length sequence of equally sized frames, stored frame-major then
/// row-major.
struct FrameSequence {
  std::size_t n_frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;  // n_frames * height * width

  std::size_t frame_size() const { return height * width; }
  double at(std::size_t f, std::size_t r, std::size_t c) const {
    return pixels[(f * height + r) * width + c];
  }
  double& at(std::size_t f, std::size_t r, std::size_t c) {
    return pixels[(f * height + r) * width + c];
  }
  std::span<const double> frame(std::size_t f) const {
    return {pixels.data() + f * frame_size(), frame_size()};
  }
  void validate() const;
};

struct MovieDataset {
  std::size_t n_frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<FrameSequence> movies;
  std::vector<std::size_t> labels;

  std::size_t n() const { return movies.size(); }
  void validate() const;
};

/// Three tiers: one frame UBP per frame, their scalar outputs fanning out to
/// every class UBP as ordinary learnable inputs, and the class UBPs feeding
/// the integrator through constant unit-weight edges.
struct MovieS2an2Spec {
  std::size_t n_frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t n_classes = 0;
  UbpSpec frame_ubp_spec;   // input height*width, output 1, bipolar output
  UbpSpec class_ubp_spec;   // input n_frames, output 1, bipolar output
  UbpSpec integrator_spec;  // input n_classes, output n_bits, sigmoid output

  static MovieS2an2Spec make(std::size_t n_frames, std::size_t height, std::size_t width,
                             std::size_t n_classes,
                             std::vector<std::size_t> frame_hidden = {64, 16},
                             std::vector<std::size_t> class_hidden = {15, 5},
                             std::vector<std::size_t> integrator_hidden = {5, 2});

  std::size_t n_bits() const { return class_code_bits(n_classes); }
  void validate() const;
  bool operator==(const MovieS2an2Spec&) const = default;
};

struct MovieModel {
  MovieS2an2Spec spec;
  std::vector<UbpNetwork> frame_ubps;
  std::vector<UbpNetwork> class_ubps;
  UbpNetwork integrator;
  std::vector<double> boundary_weights;  // all exactly 1.0

  std::size_t parameter_count() const;
  void validate() const;
};

/// Integrator seeded with `seed`, frame UBP f with `seed + 1 + f`, class
/// UBP k with `seed + 1 + n_frames + k`.
MovieModel build_movie_model(const MovieS2an2Spec& spec, std::uint64_t seed);

struct MovieForward {
  std::vector<double> frame_outputs;  // one per frame UBP, in (-1, 1)
  std::vector<double> class_outputs;  // one per class UBP, in (-1, 1)
  std::vector<double> output;         // integrator outputs, in (0, 1)
};

MovieForward forward_movie(const MovieModel& model, const FrameSequence& movie);
std::size_t predict_movie(const MovieModel& model, const FrameSequence& movie);

/// Per-sample SGD across all three tiers. The integrator error crosses the
/// constant edges into the class UBPs; each frame UBP's upstream error is the
/// sum of the class UBPs' input errors for its slot. Updates run in a fixed
/// order (integrator, class UBPs, frame UBPs), so results are bit-stable.
TrainResult train_movie(MovieModel& model, const MovieDataset& data, const TrainConfig& config,
                        const TrainMode& mode, const EpochCallback& on_epoch = nullptr);

/// Value at pixel p: sum over frame UBPs f and first-hidden units h of
/// |W1 of frame UBP f at [h][p]|, reshaped row-major to height x width.
Matrix pixel_importance(const MovieModel& model, bool signed_sum = false);

struct BBox {
  std::size_t row_min = 0;
  std::size_t col_min = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t area() const { return height * width; }
  bool contains(std::size_t r, std::size_t c) const {
    return r >= row_min && r < row_min + height && c >= col_min && c < col_min + width;
  }
  bool operator==(const BBox&) const = default;
};

struct PixelMask {
  std::vector<std::uint8_t> mask;  // height x width, row-major
  BBox bbox;                       // minimal rectangle containing every kept cell
  double cutoff = 0.0;
};

/// Keeps values >= mean - alpha * population_variance (or alpha * stddev when
/// use_std_dev). Throws when the mask is empty.
PixelMask pixel_mask(const Matrix& values, double alpha = 0.3, bool use_std_dev = false);

/// Importance of frame f: sum over class UBPs k and first-hidden units h of
/// |W1 of class UBP k at [h][f]|. Feed to select_features for frame cutoffs.
std::vector<double> frame_importance(const MovieModel& model, bool signed_sum = false);

FrameSequence crop_sequence(const FrameSequence& movie, const BBox& bbox,
                            const std::vector<std::size_t>& kept_frames);

/// Pure windowing: every movie reduced to the kept frames, each cropped to
/// the box. Pixel values are copied, never resampled.
MovieDataset crop_dataset(const MovieDataset& data, const BBox& bbox,
                          const std::vector<std::size_t>& kept_frames);

/// Spec for a rebuilt model on the cropped input. Hidden layers wider than
/// the new input shrink proportionally (floor one unit), as in refine_spec.
MovieS2an2Spec refine_movie_spec(const MovieS2an2Spec& spec, const BBox& bbox,
                                 const std::vector<std::size_t>& kept_frames);

/// Keeps trained weights: frame UBPs outside kept_frames are removed, first
/// layers lose the out-of-box pixel columns, class UBPs lose the dropped
/// frame columns. Output on cropped input equals the original's with dropped
/// pixels zeroed and dropped frame slots' columns zeroed, exactly.
MovieModel prune_movie_model(const MovieModel& model, const BBox& bbox,
                             const std::vector<std::size_t>& kept_frames);

/// Finite-difference check through all three tiers.
GradientCheckReport movie_gradient_check(const MovieModel& model, const FrameSequence& movie,
                                         std::size_t label, double eps);

}  // namespace s2an2
