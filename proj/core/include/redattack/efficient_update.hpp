#ifndef REDATTACK_EFFICIENT_UPDATE_HPP
#define REDATTACK_EFFICIENT_UPDATE_HPP

#include <cstddef>
#include <vector>

#include "redattack/boundary_search.hpp"
#include "redattack/gradient_estimate.hpp"

namespace redattack {

struct UpdateOptions {
  double max_jump = 1.0;         // j, in multiples of the probe direction
  std::size_t max_halvings = 10;
};

struct UpdateStep {
  ImageTensor image;
  Label label;
  bool accepted = false;  // false: image/label are `current` unchanged
  // The accepted point is the probe's boundary sample itself (no query was
  // spent and it needs no re-projection).
  bool on_boundary = false;
  std::size_t queries_spent = 0;
  // Every step size tried, in order: j, j/2, j/4, ...
  std::vector<double> lambdas;
};

// Adaptive half-interval step along sign * probe.direction.
//
// Tries current + lambda * delta (clipped) for lambda = j, j/2, ... up to
// max_halvings halvings and accepts the first trial that is strictly
// closer to the source and still adversarial. Trials that do not reduce
// the distance are rejected before querying, so only trials that could be
// accepted cost a query; so does a unit forward step, which reproduces the
// probe's already-classified boundary point. Reverts to `current` when
// nothing is accepted.
UpdateStep efficient_update(const BoundarySample& current, const GradientProbe& probe,
                            const ImageTensor& source, const AdversarialPredicate& pred,
                            const UpdateOptions& options, ClassifierOracle& oracle);

}  // namespace redattack

#endif  // REDATTACK_EFFICIENT_UPDATE_HPP
