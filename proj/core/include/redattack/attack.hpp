#ifndef REDATTACK_ATTACK_HPP
#define REDATTACK_ATTACK_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "redattack/boundary_search.hpp"
#include "redattack/oracle.hpp"
#include "redattack/tensor.hpp"

namespace redattack {

struct AttackConfig {
  double delta_min = 0.01;
  std::size_t num_pixels = 20;
  double theta = 0.0196;
  double max_jump = 1.0;
  std::size_t max_queries = 1000;
  std::uint64_t seed = 0;
  AttackMode mode = AttackMode::kUntargeted;
  // Targeted mode only. When unset the reference's label becomes the target.
  std::optional<Label> target;
  std::size_t max_halvings = 10;
  std::size_t restarts = 1;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct TracePoint {
  std::size_t query_index = 0;  // 1-based
  double best_l2_sq = 0.0;      // +inf until an adversarial point is known
};

struct AttackMetrics {
  double pert_norm = 0.0;
  std::optional<double> ssim;  // unset when the image is smaller than the SSIM window
  std::optional<double> cc;    // unset when either image is constant
};

struct AttackResult {
  ImageTensor best_adversarial;
  std::optional<Label> best_label;
  std::size_t queries_used = 0;
  std::vector<TracePoint> trace;
  AttackMetrics metrics;
  bool succeeded = false;
};

// Test instrumentation; every callback is optional.
struct AttackHooks {
  // Called with each boundary iterate before it is probed.
  std::function<void(const BoundarySample&)> on_iterate;
};

AttackMetrics compute_metrics(const ImageTensor& adversarial, const ImageTensor& source);

// Full RED loop under a hard query budget:
//   classify source and reference (both charged), half-interval search to
//   the boundary, then repeat { gradient-sign probe; if the sign is nonzero
//   take an adaptive step; project an accepted step back to the boundary }
//   until the budget runs out.
// Any adversarial point the oracle sees, including bisection midpoints,
// competes for best-so-far. The trace has one entry per oracle query.
// succeeded is false if the budget ends before the first boundary point.
AttackResult run_attack(const ImageTensor& source, const ImageTensor& reference,
                        ClassifierOracle& oracle, const AttackConfig& config,
                        const AttackHooks& hooks = {});

// Splits max_queries evenly over config.restarts runs. Run i attacks
// references[i % size] with rng stream i (stream 0 is the base seed).
// References that fail the mode's precondition are skipped; if every run
// is skipped the last InvalidReference is rethrown. Returns the best run:
// succeeded before failed, then lowest perturbation norm, then earliest.
AttackResult run_with_restarts(const ImageTensor& source, std::span<const ImageTensor> references,
                               ClassifierOracle& oracle, const AttackConfig& config);

}  // namespace redattack

#endif  // REDATTACK_ATTACK_HPP
