#ifndef REDATTACK_TENSOR_HPP
#define REDATTACK_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace redattack {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const { return height * width * channels; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense H x W x C image, row-major with the channel index innermost.
// Pixels are real-valued; `range` is the largest legal pixel value L.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(Shape shape, std::vector<double> pixels, double range = 1.0);

  static ImageTensor zeros(Shape shape, double range = 1.0);
  static ImageTensor filled(Shape shape, double value, double range = 1.0);
  // Convenience for tests and tiny oracles: a 1 x N x 1 image.
  static ImageTensor row(std::vector<double> pixels, double range = 1.0);

  const Shape& shape() const { return shape_; }
  double range() const { return range_; }
  std::size_t size() const { return pixels_.size(); }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> mutable_pixels() { return pixels_; }

  double operator[](std::size_t i) const { return pixels_[i]; }
  double& operator[](std::size_t i) { return pixels_[i]; }
  double at(std::size_t h, std::size_t w, std::size_t c) const;

  bool compatible_with(const ImageTensor& other) const {
    return shape_ == other.shape_ && range_ == other.range_;
  }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  Shape shape_{};
  double range_ = 1.0;
  std::vector<double> pixels_;
};

// Seeded, splittable random source. Uses mt19937_64 (output sequence fixed
// by the standard) with hand-written bounded/normal draws so traces are
// reproducible across standard library implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  // Independent child stream. split(0) of a source seeded s is seeded s
  // itself, so a single-run attack and restart 0 see the same draws.
  RandomSource split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform integer in [0, bound). bound must be > 0.
  std::size_t uniform_index(std::size_t bound);
  // Uniform real in [0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

ImageTensor midpoint(const ImageTensor& a, const ImageTensor& b);
double l2_sq_dist(const ImageTensor& a, const ImageTensor& b);
double linf_dist(const ImageTensor& a, const ImageTensor& b);
// base + scale * delta, clipped into [0, L].
ImageTensor add_scaled_clipped(const ImageTensor& base, const ImageTensor& delta, double scale);
ImageTensor subtract(const ImageTensor& a, const ImageTensor& b);
// Exactly n distinct pixels set to L, the rest 0.
ImageTensor sparse_mask(Shape shape, std::size_t n, RandomSource& rng, double range = 1.0);
std::size_t count_nonzero(const ImageTensor& img);

void require_compatible(const ImageTensor& a, const ImageTensor& b, const char* what);

}  // namespace redattack

#endif  // REDATTACK_TENSOR_HPP
