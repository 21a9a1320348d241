#include "redattack/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "redattack/error.hpp"

namespace redattack {

std::string Shape::str() const {
  return "(" + std::to_string(height) + "," + std::to_string(width) + "," +
         std::to_string(channels) + ")";
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> pixels, double range)
    : shape_(shape), range_(range), pixels_(std::move(pixels)) {
  if (!(range_ > 0.0) || !std::isfinite(range_)) {
    throw std::invalid_argument("dynamic range must be positive and finite");
  }
  if (pixels_.size() != shape_.size()) {
    throw ShapeMismatch("pixel count " + std::to_string(pixels_.size()) +
                        " does not match shape " + shape_.str());
  }
}

ImageTensor ImageTensor::zeros(Shape shape, double range) {
  return filled(shape, 0.0, range);
}

ImageTensor ImageTensor::filled(Shape shape, double value, double range) {
  return ImageTensor(shape, std::vector<double>(shape.size(), value), range);
}

ImageTensor ImageTensor::row(std::vector<double> pixels, double range) {
  Shape s{1, pixels.size(), 1};
  return ImageTensor(s, std::move(pixels), range);
}

double ImageTensor::at(std::size_t h, std::size_t w, std::size_t c) const {
  return pixels_[(h * shape_.width + w) * shape_.channels + c];
}

void require_compatible(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(what) + ": shape " + a.shape().str() + " vs " +
                        b.shape().str());
  }
  if (a.range() != b.range()) {
    throw ShapeMismatch(std::string(what) + ": dynamic range " + std::to_string(a.range()) +
                        " vs " + std::to_string(b.range()));
  }
}

// --- RandomSource ---------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  if (stream == 0) return seed;
  return splitmix64(seed ^ splitmix64(stream));
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomSource RandomSource::split(std::uint64_t stream) const {
  return RandomSource(derive_seed(seed_, stream));
}

std::size_t RandomSource::uniform_index(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index bound must be positive");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t b = bound;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(phi);
  has_spare_normal_ = true;
  return r * std::cos(phi);
}

// --- elementwise ops ------------------------------------------------------

ImageTensor midpoint(const ImageTensor& a, const ImageTensor& b) {
  require_compatible(a, b, "midpoint");
  std::vector<double> out(a.size());
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (pa[i] + pb[i]);
  return ImageTensor(a.shape(), std::move(out), a.range());
}

double l2_sq_dist(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("l2_sq_dist: shape " + a.shape().str() + " vs " + b.shape().str());
  }
  auto pa = a.pixels();
  auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  return acc;
}

double linf_dist(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("linf_dist: shape " + a.shape().str() + " vs " + b.shape().str());
  }
  auto pa = a.pixels();
  auto pb = b.pixels();
  double m = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::abs(pa[i] - pb[i]));
  return m;
}

ImageTensor add_scaled_clipped(const ImageTensor& base, const ImageTensor& delta, double scale) {
  if (base.shape() != delta.shape()) {
    throw ShapeMismatch("add_scaled_clipped: shape " + base.shape().str() + " vs " +
                        delta.shape().str());
  }
  const double hi = base.range();
  std::vector<double> out(base.size());
  auto pb = base.pixels();
  auto pd = delta.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(pb[i] + scale * pd[i], 0.0, hi);
  }
  return ImageTensor(base.shape(), std::move(out), hi);
}

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b) {
  require_compatible(a, b, "subtract");
  std::vector<double> out(a.size());
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] - pb[i];
  return ImageTensor(a.shape(), std::move(out), a.range());
}

ImageTensor sparse_mask(Shape shape, std::size_t n, RandomSource& rng, double range) {
  const std::size_t total = shape.size();
  if (n == 0 || n > total) {
    throw NTooLarge("sparse_mask: n=" + std::to_string(n) + " outside [1, " +
                    std::to_string(total) + "]");
  }
  // Partial Fisher-Yates: the first n slots end up a uniform sample
  // without replacement.
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(total - i);
    std::swap(idx[i], idx[j]);
  }
  auto mask = ImageTensor::zeros(shape, range);
  for (std::size_t i = 0; i < n; ++i) mask[idx[i]] = range;
  return mask;
}

std::size_t count_nonzero(const ImageTensor& img) {
  auto p = img.pixels();
  return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](double v) { return v != 0.0; }));
}

}  // namespace redattack
