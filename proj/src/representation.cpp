#include "nait/representation.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <string>
#include <utility>

#include "nait/error.hpp"
#include "nait/random.hpp"
#include "nait/simd.hpp"

namespace nait {

Frame::Frame(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), pixels_(height * width, fill) {}

Frame::Frame(std::size_t height, std::size_t width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (pixels_.size() != height * width) {
    throw InvalidInput("frame pixel count " + std::to_string(pixels_.size()) + " != " +
                       std::to_string(height) + "x" + std::to_string(width));
  }
}

double Frame::energy() const {
  double e = 0.0;
  for (double p : pixels_) e += p * p;
  return e;
}

FrameStack::FrameStack(const Frame& first) { reset(first); }

FrameStack::FrameStack(Frame newest, Frame prev1, Frame prev2, Frame prev3)
    : frames_{std::move(newest), std::move(prev1), std::move(prev2), std::move(prev3)} {}

void FrameStack::reset(const Frame& first) { frames_.fill(first); }

void FrameStack::push(Frame newest) {
  for (std::size_t i = kDepth - 1; i > 0; --i) frames_[i] = std::move(frames_[i - 1]);
  frames_[0] = std::move(newest);
}

std::vector<double> FrameStack::flatten() const {
  std::vector<double> out;
  out.reserve(kDepth * frames_[0].size());
  for (const auto& f : frames_) out.insert(out.end(), f.pixels().begin(), f.pixels().end());
  return out;
}

Frame tile_2x2(const FrameStack& stack) {
  const std::size_t h = stack[0].height();
  const std::size_t w = stack[0].width();
  for (std::size_t i = 1; i < FrameStack::kDepth; ++i) {
    if (stack[i].shape() != stack[0].shape()) {
      throw InvalidInput("frame stack holds frames of different sizes");
    }
  }
  Frame out(2 * h, 2 * w);
  for (std::size_t q = 0; q < FrameStack::kDepth; ++q) {
    const std::size_t r0 = (q / 2) * h;
    const std::size_t c0 = (q % 2) * w;
    for (std::size_t r = 0; r < h; ++r) {
      const auto src = stack[q].row(r);
      std::copy(src.begin(), src.end(), out.row(r0 + r).begin() + static_cast<std::ptrdiff_t>(c0));
    }
  }
  return out;
}

namespace {

// FFTW's planner is not thread-safe; plans are created once per shape under a
// lock and then executed concurrently through the new-array interface.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t h, std::size_t w, bool inverse) {
    const Key key{h, w, inverse};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(h * w);
    double* out = fftw_alloc_real(h * w);
    const fftw_r2r_kind kind = inverse ? FFTW_REDFT01 : FFTW_REDFT10;
    fftw_plan plan = fftw_plan_r2r_2d(static_cast<int>(h), static_cast<int>(w), in, out, kind,
                                      kind, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, bool>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_real(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

double ortho_scale(std::size_t k, std::size_t n) {
  return k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
}

void check_finite(const Frame& f) {
  for (double p : f.pixels()) {
    if (!std::isfinite(p)) throw InvalidInput("frame contains a non-finite intensity");
  }
}

// side x n matrix of orthonormal DCT-II basis rows.
std::vector<double> truncated_basis(std::size_t side, std::size_t n) {
  std::vector<double> basis(side * n);
  for (std::size_t k = 0; k < side; ++k) {
    const double s = ortho_scale(k, n);
    for (std::size_t i = 0; i < n; ++i) {
      basis[k * n + i] = s * std::cos(std::numbers::pi / static_cast<double>(n) *
                                      (static_cast<double>(i) + 0.5) * static_cast<double>(k));
    }
  }
  return basis;
}

}  // namespace

Frame dct2(const Frame& image) {
  if (image.size() == 0) throw InvalidInput("dct2 of an empty frame");
  check_finite(image);
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  fftw_plan plan = PlanCache::instance().get(h, w, false);
  FftwBuffer in(h * w);
  FftwBuffer out(h * w);
  std::copy(image.pixels().begin(), image.pixels().end(), in.data);
  fftw_execute_r2r(plan, in.data, out.data);
  // REDFT10 is 2 * sum(...) per axis.
  Frame result(h, w);
  for (std::size_t u = 0; u < h; ++u) {
    const double su = 0.5 * ortho_scale(u, h);
    for (std::size_t v = 0; v < w; ++v) {
      result.at(u, v) = out.data[u * w + v] * su * 0.5 * ortho_scale(v, w);
    }
  }
  return result;
}

Frame idct2(const Frame& coeffs) {
  if (coeffs.size() == 0) throw InvalidInput("idct2 of an empty frame");
  const std::size_t h = coeffs.height();
  const std::size_t w = coeffs.width();
  fftw_plan plan = PlanCache::instance().get(h, w, true);
  FftwBuffer in(h * w);
  FftwBuffer out(h * w);
  // REDFT01: y_n = x_0 + 2 sum_{k>0} x_k cos(...); fold the orthonormal scale in.
  for (std::size_t u = 0; u < h; ++u) {
    const double su = ortho_scale(u, h) * (u == 0 ? 1.0 : 0.5);
    for (std::size_t v = 0; v < w; ++v) {
      const double sv = ortho_scale(v, w) * (v == 0 ? 1.0 : 0.5);
      in.data[u * w + v] = coeffs.at(u, v) * su * sv;
    }
  }
  fftw_execute_r2r(plan, in.data, out.data);
  return Frame(h, w, std::vector<double>(out.data, out.data + h * w));
}

DctEncoder::DctEncoder(FrameShape frame, std::size_t feature_dim) : frame_(frame), side_(0) {
  if (frame.height == 0 || frame.width == 0) throw ConfigError("frame shape must be non-empty");
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(feature_dim))));
  if (feature_dim == 0 || side * side != feature_dim) {
    throw ConfigError("DCT feature dimension " + std::to_string(feature_dim) +
                      " is not a positive perfect square");
  }
  if (side > 2 * frame.height || side > 2 * frame.width) {
    throw ConfigError("DCT block " + std::to_string(side) + "x" + std::to_string(side) +
                      " exceeds the tiled image " + std::to_string(2 * frame.height) + "x" +
                      std::to_string(2 * frame.width));
  }
  side_ = side;
  row_basis_ = truncated_basis(side_, 2 * frame.width);
  col_basis_ = truncated_basis(side_, 2 * frame.height);
}

StateVec DctEncoder::encode(const FrameStack& stack) const {
  if (stack.shape() != frame_) throw InvalidInput("frame stack shape does not match encoder");
  return encode_image(tile_2x2(stack));
}

StateVec DctEncoder::encode_image(const Frame& tiled) const {
  const std::size_t rows = 2 * frame_.height;
  const std::size_t cols = 2 * frame_.width;
  if (tiled.height() != rows || tiled.width() != cols) {
    throw InvalidInput("tiled image shape does not match encoder");
  }
  check_finite(tiled);
  const auto& k = simd::active();
  // Transform along rows: partial[r][v] = <image row r, basis v>.
  std::vector<double> partial(rows * side_);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = tiled.row(r).data();
    for (std::size_t v = 0; v < side_; ++v) {
      partial[r * side_ + v] = k.dot_f64(row, row_basis_.data() + v * cols, cols);
    }
  }
  // Then along columns: block[u] = sum_r basis_u[r] * partial[r].
  std::vector<double> block(side_ * side_, 0.0);
  for (std::size_t u = 0; u < side_; ++u) {
    const double* basis = col_basis_.data() + u * rows;
    double* out = block.data() + u * side_;
    for (std::size_t r = 0; r < rows; ++r) k.axpy_f64(basis[r], partial.data() + r * side_, out, side_);
  }
  return StateVec(block.begin(), block.end());
}

StateVec dct_features(const FrameStack& stack, std::size_t feature_dim) {
  return DctEncoder(stack.shape(), feature_dim).encode(stack);
}

ProjectionMatrix::ProjectionMatrix(std::size_t input_dim, std::size_t feature_dim, double sparsity,
                                   std::uint64_t seed)
    : input_dim_(input_dim), feature_dim_(feature_dim), sparsity_(sparsity), seed_(seed) {
  if (input_dim == 0 || feature_dim == 0) throw ConfigError("projection dimensions must be >= 1");
  if (!(sparsity >= 1.0) || !std::isfinite(sparsity)) {
    throw ConfigError("projection sparsity s must be >= 1");
  }
  const double magnitude = std::sqrt(sparsity);
  const double half = 1.0 / (2.0 * sparsity);
  Rng rng(seed);
  entries_.resize(input_dim * feature_dim);
  for (double& e : entries_) {
    const double u = uniform01(rng);
    e = u < half ? magnitude : (u < 2.0 * half ? -magnitude : 0.0);
  }
}

ProjectionMatrix::ProjectionMatrix(std::size_t input_dim, std::size_t feature_dim,
                                   std::vector<double> entries)
    : input_dim_(input_dim), feature_dim_(feature_dim), entries_(std::move(entries)) {
  if (entries_.size() != input_dim * feature_dim) {
    throw InvalidInput("projection entry count does not match D_in x F");
  }
}

ProjectionMatrix make_projection(std::size_t input_dim, std::size_t feature_dim, double sparsity,
                                 std::uint64_t seed) {
  return ProjectionMatrix(input_dim, feature_dim, sparsity, seed);
}

StateVec project(std::span<const double> x, const ProjectionMatrix& r) {
  if (x.size() != r.input_dim()) {
    throw InvalidInput("projection input length " + std::to_string(x.size()) + " != D_in " +
                       std::to_string(r.input_dim()));
  }
  const auto& k = simd::active();
  std::vector<double> acc(r.feature_dim(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) k.axpy_f64(x[i], r.row(i).data(), acc.data(), acc.size());
  }
  return StateVec(acc.begin(), acc.end());
}

}  // namespace nait
