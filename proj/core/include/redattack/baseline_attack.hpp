#ifndef REDATTACK_BASELINE_ATTACK_HPP
#define REDATTACK_BASELINE_ATTACK_HPP

#include <cstddef>
#include <cstdint>
#include <optional>

#include "redattack/attack.hpp"

namespace redattack {

struct BoundaryWalkConfig {
  std::size_t max_queries = 1000;
  std::uint64_t seed = 0;
  double step_orth = 0.01;  // orthogonal step, relative to the current distance
  double step_src = 0.01;   // contraction toward the source, relative
  std::size_t window = 10;  // attempts between step-size adaptations
  double grow = 1.1;
  double shrink = 0.9;
  AttackMode mode = AttackMode::kUntargeted;
  std::optional<Label> target;

  void validate() const;
};

// Simplified decision-based boundary walk used as the comparison baseline.
//
// Starts at the reference. Each round draws a Gaussian perturbation
// orthogonal to (source - x), scales it to step_orth * |source - x|, maps
// the result back onto the sphere of radius |source - x| around the source,
// and queries it. If it is adversarial, the sphere point is contracted
// toward the source by step_src and queried again; an adversarial
// contraction becomes the new iterate. Every `window` attempts each step
// grows by `grow` if more than half its attempts succeeded, else shrinks
// by `shrink`. Result and trace semantics match run_attack.
AttackResult run_boundary_attack(const ImageTensor& source, const ImageTensor& reference,
                                 ClassifierOracle& oracle, const BoundaryWalkConfig& config);

}  // namespace redattack

#endif  // REDATTACK_BASELINE_ATTACK_HPP
