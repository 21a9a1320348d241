#ifndef REDATTACK_GRADIENT_ESTIMATE_HPP
#define REDATTACK_GRADIENT_ESTIMATE_HPP

#include <cstddef>

#include "redattack/boundary_search.hpp"
#include "redattack/oracle.hpp"
#include "redattack/tensor.hpp"

namespace redattack {

struct GradientProbe {
  BoundarySample perturbed_boundary;  // noisy point projected back onto the boundary
  int sign = 0;                       // -1, 0 or +1
  ImageTensor direction;              // perturbed_boundary.image - current.image
  std::size_t queries_spent = 0;
};

struct ProbeOptions {
  std::size_t num_pixels = 20;  // n
  double theta = 0.0196;        // relative per-pixel perturbation; pixels move by theta * L
  double delta_min = 0.01;
};

// Zeroth-order sign of the source-distance cost along one random sparse
// direction.
//
// Adds theta * L to n random pixels of `current`, classifies the result
// and projects it back onto the boundary: toward the source if it is still
// adversarial, otherwise back toward `current`. The sign compares
// d1 = |current - source|^2 against d2 = |projected - source|^2:
// +1 if d2 < d1, -1 if d2 > d1, 0 if equal. A probe whose pixels are all
// clipped reproduces `current`; it costs one query and returns sign 0.
GradientProbe probe_gradient(const BoundarySample& current, const ImageTensor& source,
                             const AdversarialPredicate& pred, const ProbeOptions& options,
                             ClassifierOracle& oracle, RandomSource& rng);

}  // namespace redattack

#endif  // REDATTACK_GRADIENT_ESTIMATE_HPP
