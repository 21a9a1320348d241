#ifndef REDATTACK_METRICS_HPP
#define REDATTACK_METRICS_HPP

#include <cstddef>

#include "redattack/tensor.hpp"

namespace redattack {

// Sum of squared pixel differences, in the tensor's own units squared.
double perturbation_norm(const ImageTensor& adversarial, const ImageTensor& clean);

struct SsimOptions {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean structural similarity over all fully-contained Gaussian windows,
// computed per channel and averaged. C1 = (k1 L)^2, C2 = (k2 L)^2 with L the
// tensors' dynamic range. Throws ImageTooSmall if H or W < window.
double ssim(const ImageTensor& a, const ImageTensor& b, const SsimOptions& options = {});

// Pearson correlation of the flattened pixels. Throws ZeroVariance if either
// image is constant.
double correlation(const ImageTensor& a, const ImageTensor& b);

}  // namespace redattack

#endif  // REDATTACK_METRICS_HPP
