#include "redattack/efficient_update.hpp"

#include <stdexcept>

namespace redattack {

UpdateStep efficient_update(const BoundarySample& current, const GradientProbe& probe,
                            const ImageTensor& source, const AdversarialPredicate& pred,
                            const UpdateOptions& options, ClassifierOracle& oracle) {
  if (!(options.max_jump > 0.0)) throw std::invalid_argument("max_jump must be positive");
  require_compatible(current.image, probe.direction, "efficient_update");
  require_compatible(current.image, source, "efficient_update");

  UpdateStep step;
  step.image = current.image;
  step.label = current.label;
  const double sign = static_cast<double>(probe.sign);
  const double d_current = l2_sq_dist(current.image, source);

  double lambda = options.max_jump;
  for (std::size_t trial = 0; trial <= options.max_halvings; ++trial, lambda *= 0.5) {
    step.lambdas.push_back(lambda);
    // A unit forward step lands on the probe's own boundary point, whose
    // label is already known.
    const bool reuse = sign * lambda == 1.0 && probe.perturbed_boundary.image.size() != 0;
    ImageTensor next = reuse ? probe.perturbed_boundary.image
                             : add_scaled_clipped(current.image, probe.direction, sign * lambda);
    if (!(l2_sq_dist(next, source) < d_current)) continue;
    if (reuse) {
      step.image = std::move(next);
      step.label = probe.perturbed_boundary.label;
      step.accepted = true;
      step.on_boundary = true;
      break;
    }
    const Label label = oracle.classify(next);
    ++step.queries_spent;
    if (pred(label)) {
      step.image = std::move(next);
      step.label = label;
      step.accepted = true;
      break;
    }
  }
  return step;
}

}  // namespace redattack
