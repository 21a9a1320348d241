#include "redattack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "redattack/error.hpp"

namespace redattack {

double perturbation_norm(const ImageTensor& adversarial, const ImageTensor& clean) {
  return l2_sq_dist(adversarial, clean);
}

namespace {

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  std::vector<double> k(size);
  const double center = (static_cast<double>(size) - 1.0) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - center;
    k[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (auto& v : k) v /= total;
  return k;
}

// Separable "valid" filtering of one channel: output is
// (H - window + 1) x (W - window + 1).
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& kernel) {
  const std::size_t k = kernel.size();
  const std::size_t oh = h - k + 1;
  const std::size_t ow = w - k + 1;
  std::vector<double> tmp(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += kernel[i] * plane[y * w + x + i];
      tmp[y * ow + x] = s;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += kernel[i] * tmp[(y + i) * ow + x];
      out[y * ow + x] = s;
    }
  }
  return out;
}

std::vector<double> channel_plane(const ImageTensor& img, std::size_t c) {
  const Shape& s = img.shape();
  std::vector<double> plane(s.height * s.width);
  auto p = img.pixels();
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = p[i * s.channels + c];
  return plane;
}

}  // namespace

double ssim(const ImageTensor& a, const ImageTensor& b, const SsimOptions& options) {
  require_compatible(a, b, "ssim");
  const Shape& s = a.shape();
  if (options.window == 0 || s.height < options.window || s.width < options.window) {
    throw ImageTooSmall("ssim needs H, W >= " + std::to_string(options.window) + ", got " +
                        s.str());
  }
  const double L = a.range();
  const double c1 = (options.k1 * L) * (options.k1 * L);
  const double c2 = (options.k2 * L) * (options.k2 * L);
  const auto kernel = gaussian_kernel(options.window, options.sigma);

  double channel_sum = 0.0;
  for (std::size_t c = 0; c < s.channels; ++c) {
    const auto x = channel_plane(a, c);
    const auto y = channel_plane(b, c);
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mu_x = filter_valid(x, s.height, s.width, kernel);
    const auto mu_y = filter_valid(y, s.height, s.width, kernel);
    const auto e_xx = filter_valid(xx, s.height, s.width, kernel);
    const auto e_yy = filter_valid(yy, s.height, s.width, kernel);
    const auto e_xy = filter_valid(xy, s.height, s.width, kernel);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
      const double mx = mu_x[i];
      const double my = mu_y[i];
      const double vx = e_xx[i] - mx * mx;
      const double vy = e_yy[i] - my * my;
      const double cov = e_xy[i] - mx * my;
      const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      total += num / den;
    }
    channel_sum += total / static_cast<double>(mu_x.size());
  }
  return std::clamp(channel_sum / static_cast<double>(s.channels), -1.0, 1.0);
}

double correlation(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("correlation: shape " + a.shape().str() + " vs " + b.shape().str());
  }
  auto pa = a.pixels();
  auto pb = b.pixels();
  // Test constancy exactly; the centred sums below pick up rounding noise.
  auto constant = [](std::span<const double> p) {
    return std::adjacent_find(p.begin(), p.end(), std::not_equal_to<>()) == p.end();
  };
  if (constant(pa) || constant(pb)) {
    throw ZeroVariance("correlation of a constant image is undefined");
  }
  const double n = static_cast<double>(pa.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    ma += pa[i];
    mb += pb[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double da = pa[i] - ma;
    const double db = pb[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw ZeroVariance("correlation of a constant image is undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace redattack
