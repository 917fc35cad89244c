#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <variant>
#include <vector>

#include "s2an2/dataset.hpp"
#include "s2an2/s2an2.hpp"
#include "s2an2/vector_mode.hpp"

namespace s2an2 {

// File formats, all versioned by a magic string:
//
//  CSV         UTF-8, comma separated, '.' decimal point. First row is the
//              header; the last column is "label" (a non-negative integer),
//              the rest are numeric features. Reals are written with 17
//              significant digits, so a write/read round trip is exact.
//
//  container   "S2AN2FRM 1\n" (11 bytes), then F, H, W as unsigned 32-bit
//              little-endian integers, then F*H*W IEEE-754 32-bit
//              little-endian reals, frame-major then row-major. Values widen
//              to 64-bit on load.
//
//  model       "S2AN2-MODEL 1" header, then line-oriented text sections for
//              the spec, the class codes, the constant boundary weights and
//              every network's layers and values. Reals carry 17 significant
//              digits; save -> load -> save is byte-identical.

TabularDataset read_csv(const std::filesystem::path& path);
void write_csv(const TabularDataset& data, const std::filesystem::path& path);

FrameSequence read_movie_container(const std::filesystem::path& path);
void write_movie_container(const FrameSequence& movie, const std::filesystem::path& path);

/// Manifest: CSV with header "path,label"; container paths are resolved
/// relative to the manifest's directory. All containers must agree on
/// F, H and W.
MovieDataset read_movie_manifest(const std::filesystem::path& manifest_path);

/// Writes one container per movie as <prefix>_NNNN.s2frm plus the manifest
/// <prefix>.manifest.csv. Returns the manifest path.
std::filesystem::path write_movie_dataset(const MovieDataset& data,
                                          const std::filesystem::path& prefix);

void save_model(const S2an2Model& model, const std::filesystem::path& path);
void save_model(const MovieModel& model, const std::filesystem::path& path);

using LoadedModel = std::variant<S2an2Model, MovieModel>;
LoadedModel load_model(const std::filesystem::path& path);

struct TabularGroundTruth {
  std::uint64_t seed = 0;
  std::vector<std::size_t> informative;  // feature indices carrying label signal
};

struct MovieGroundTruth {
  std::uint64_t seed = 0;
  BBox signal_bbox;
  std::vector<std::size_t> signal_frames;  // 0-based frame indices
};

void write_ground_truth(const TabularGroundTruth& truth, const std::filesystem::path& path);
void write_ground_truth(const MovieGroundTruth& truth, const std::filesystem::path& path);
TabularGroundTruth read_tabular_ground_truth(const std::filesystem::path& path);
MovieGroundTruth read_movie_ground_truth(const std::filesystem::path& path);

/// Labeled tabular samples with known informative coordinates. Class
/// prototypes live on the informative coordinates, drawn uniformly from
/// [-1.5, 1.5] with pairwise distance >= 2 sigma (sigma = 0.3, the
/// within-class noise scale); samples add gaussian(0, sigma) noise there.
/// Every other coordinate is standard-normal noise independent of the label.
/// Labels cycle 0..K-1, so counts are balanced with the remainder on the low
/// classes. Pure function of its arguments.
std::pair<TabularDataset, TabularGroundTruth> synth_tabular(std::uint64_t seed, std::size_t n,
                                                            std::size_t d, std::size_t k,
                                                            std::vector<std::size_t> informative);

/// Labeled movies. Every pixel is gaussian background noise of identical
/// distribution across classes, with a label-independent vignette (noise
/// scale 0.1 at the frame edge ramping to 1 over five pixels, flat inside,
/// the way a centered subject leaves frame edges quiet). Inside signal_bbox,
/// on signal
/// frames only, a class-specific intensity ramp is added (amplitude
/// 0.6 + 0.5 * class, ramp 0.5..1.5 along the box diagonal). Labels cycle
/// 0..K-1.
std::pair<MovieDataset, MovieGroundTruth> synth_movies(std::uint64_t seed, std::size_t n,
                                                       std::size_t n_frames, std::size_t height,
                                                       std::size_t width, const BBox& signal_bbox,
                                                       std::vector<std::size_t> signal_frames,
                                                       std::size_t k = 2);

}  // namespace s2an2
