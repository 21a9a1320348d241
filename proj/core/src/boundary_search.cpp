#include "redattack/boundary_search.hpp"

#include <cmath>
#include <string>

namespace redattack {

AdversarialPredicate AdversarialPredicate::untargeted(Label source) {
  return AdversarialPredicate(AttackMode::kUntargeted, source, std::nullopt);
}

AdversarialPredicate AdversarialPredicate::targeted(Label source, Label target) {
  if (source == target) {
    throw InvalidReference("targeted attack needs a target label different from the source (" +
                           std::to_string(source.id) + ")");
  }
  return AdversarialPredicate(AttackMode::kTargeted, source, target);
}

bool AdversarialPredicate::operator()(Label label) const {
  if (mode_ == AttackMode::kTargeted) return label == *target_;
  return label != source_;
}

BoundarySample estimate_boundary(const ImageTensor& non_adversarial, Label non_adversarial_label,
                                 const ImageTensor& adversarial, Label adversarial_label,
                                 const AdversarialPredicate& pred, double delta_min,
                                 ClassifierOracle& oracle) {
  if (!(delta_min > 0.0) || !std::isfinite(delta_min)) {
    throw std::invalid_argument("delta_min must be positive and finite");
  }
  require_compatible(non_adversarial, adversarial, "estimate_boundary");
  if (!pred(adversarial_label)) {
    throw InvalidReference("reference label " + std::to_string(adversarial_label.id) +
                           " is not adversarial");
  }
  if (pred(non_adversarial_label)) {
    throw InvalidReference("source-side label " + std::to_string(non_adversarial_label.id) +
                           " is already adversarial");
  }

  ImageTensor low = non_adversarial;
  BoundarySample high{adversarial, adversarial_label, linf_dist(non_adversarial, adversarial), 0,
                      true};

  while (high.bracket_gap > delta_min) {
    ImageTensor mid = midpoint(low, high.image);
    Label label;
    try {
      label = oracle.classify(mid);
    } catch (const BudgetExhausted&) {
      high.converged = false;
      throw BoundarySearchExhausted(std::move(high));
    }
    ++high.queries_spent;
    if (pred(label)) {
      high.image = std::move(mid);
      high.label = label;
    } else {
      low = std::move(mid);
    }
    const double gap = linf_dist(low, high.image);
    // Rounding can stall the midpoint once the endpoints are adjacent
    // doubles; there is nothing left to bisect at that point.
    if (!(gap < high.bracket_gap)) {
      high.bracket_gap = gap;
      break;
    }
    high.bracket_gap = gap;
  }
  return high;
}

}  // namespace redattack
