#ifndef REDATTACK_BOUNDARY_SEARCH_HPP
#define REDATTACK_BOUNDARY_SEARCH_HPP

#include <cstddef>
#include <optional>

#include "redattack/error.hpp"
#include "redattack/oracle.hpp"
#include "redattack/tensor.hpp"

namespace redattack {

enum class AttackMode { kUntargeted, kTargeted };

// Decides whether a label counts as a successful attack: any label other
// than the source's (untargeted) or exactly the target (targeted).
class AdversarialPredicate {
 public:
  static AdversarialPredicate untargeted(Label source);
  static AdversarialPredicate targeted(Label source, Label target);

  bool operator()(Label label) const;

  AttackMode mode() const { return mode_; }
  Label source_label() const { return source_; }
  std::optional<Label> target_label() const { return target_; }

 private:
  AdversarialPredicate(AttackMode mode, Label source, std::optional<Label> target)
      : mode_(mode), source_(source), target_(target) {}

  AttackMode mode_;
  Label source_;
  std::optional<Label> target_;
};

struct BoundarySample {
  ImageTensor image;  // adversarial-side bracket endpoint
  Label label;
  double bracket_gap = 0.0;  // linf distance between the final endpoints
  std::size_t queries_spent = 0;
  bool converged = true;  // false only inside BoundarySearchExhausted
};

// Budget ran out mid-search. Still a BudgetExhausted; additionally carries
// the adversarial endpoint reached so far (converged == false).
class BoundarySearchExhausted : public BudgetExhausted {
 public:
  explicit BoundarySearchExhausted(BoundarySample partial)
      : BudgetExhausted("query budget exhausted during boundary search"),
        partial_(std::move(partial)) {}

  const BoundarySample& partial() const { return partial_; }

 private:
  BoundarySample partial_;
};

// Half-interval search on the segment [non_adversarial, adversarial].
//
// The bracket {pred(low) false, pred(high) true} is kept after every step;
// the midpoint replaces whichever endpoint shares its side. The search
// stops once linf(low, high) <= delta_min and returns the high endpoint, so
// the result is adversarial without an extra query. For an initial gap g >
// delta_min this costs ceil(log2(g / delta_min)) queries (plus at most one
// for floating-point rounding).
//
// Both labels are supplied by the caller and are not re-queried. Throws
// InvalidReference if pred(adversarial_label) is false or
// pred(non_adversarial_label) is true.
BoundarySample estimate_boundary(const ImageTensor& non_adversarial, Label non_adversarial_label,
                                 const ImageTensor& adversarial, Label adversarial_label,
                                 const AdversarialPredicate& pred, double delta_min,
                                 ClassifierOracle& oracle);

}  // namespace redattack

#endif  // REDATTACK_BOUNDARY_SEARCH_HPP
