#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nait {

// Feature vector used as the key for every memory lookup.
using StateVec = std::vector<float>;

struct FrameShape {
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const FrameShape&, const FrameShape&) = default;
};

// Row-major grid of real intensities.
class Frame {
 public:
  Frame() = default;
  Frame(std::size_t height, std::size_t width, double fill = 0.0);
  Frame(std::size_t height, std::size_t width, std::vector<double> pixels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  FrameShape shape() const { return {height_, width_}; }
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  std::span<double> row(std::size_t r) { return {pixels_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const { return {pixels_.data() + r * width_, width_}; }
  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  double energy() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

// The four most recent observations, newest first. Until four observations
// have been pushed the oldest one fills the remaining slots.
class FrameStack {
 public:
  static constexpr std::size_t kDepth = 4;

  FrameStack() = default;
  explicit FrameStack(const Frame& first);
  FrameStack(Frame newest, Frame prev1, Frame prev2, Frame prev3);

  void reset(const Frame& first);
  void push(Frame newest);

  const Frame& operator[](std::size_t age) const { return frames_[age]; }
  FrameShape shape() const { return frames_[0].shape(); }
  // Concatenation of the four frames, newest first, each row-major.
  std::vector<double> flatten() const;

 private:
  std::array<Frame, kDepth> frames_;
};

// [[o_t, o_t-1], [o_t-2, o_t-3]] as one 2H x 2W frame.
Frame tile_2x2(const FrameStack& stack);

// Orthonormal 2D DCT-II (rows, then columns). O(N log N) per axis.
Frame dct2(const Frame& image);
// Inverse of dct2 (orthonormal DCT-III on both axes).
Frame idct2(const Frame& coeffs);

// Computes the top-left sqrt(F) x sqrt(F) block of dct2(tile_2x2(stack))
// directly from truncated cosine bases, flattened row-major.
class DctEncoder {
 public:
  DctEncoder(FrameShape frame, std::size_t feature_dim);

  std::size_t feature_dim() const { return side_ * side_; }
  FrameShape frame_shape() const { return frame_; }
  StateVec encode(const FrameStack& stack) const;
  // Same block taken from an arbitrary 2H x 2W image.
  StateVec encode_image(const Frame& tiled) const;

 private:
  FrameShape frame_;
  std::size_t side_;
  // side_ x N basis rows; row k holds the k-th orthonormal cosine.
  std::vector<double> row_basis_;  // over tile columns (2W)
  std::vector<double> col_basis_;  // over tile rows (2H)
};

StateVec dct_features(const FrameStack& stack, std::size_t feature_dim);

// D_in x F matrix with entries in {+sqrt(s), 0, -sqrt(s)}.
class ProjectionMatrix {
 public:
  ProjectionMatrix(std::size_t input_dim, std::size_t feature_dim, double sparsity,
                   std::uint64_t seed);
  // Explicit entries, row-major D_in x F. Entries are taken as is.
  ProjectionMatrix(std::size_t input_dim, std::size_t feature_dim, std::vector<double> entries);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t feature_dim() const { return feature_dim_; }
  double sparsity() const { return sparsity_; }
  std::uint64_t seed() const { return seed_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * feature_dim_ + j]; }
  std::span<const double> entries() const { return entries_; }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * feature_dim_, feature_dim_};
  }

 private:
  std::size_t input_dim_;
  std::size_t feature_dim_;
  double sparsity_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<double> entries_;
};

ProjectionMatrix make_projection(std::size_t input_dim, std::size_t feature_dim, double sparsity,
                                 std::uint64_t seed);

// x R for a flattened frame stack x.
StateVec project(std::span<const double> x, const ProjectionMatrix& r);

}  // namespace nait
