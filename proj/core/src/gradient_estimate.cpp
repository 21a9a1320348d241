#include "redattack/gradient_estimate.hpp"

#include <cmath>

namespace redattack {

GradientProbe probe_gradient(const BoundarySample& current, const ImageTensor& source,
                             const AdversarialPredicate& pred, const ProbeOptions& options,
                             ClassifierOracle& oracle, RandomSource& rng) {
  if (options.num_pixels == 0) throw std::invalid_argument("probe needs n >= 1");
  if (!(options.theta > 0.0)) throw std::invalid_argument("probe needs theta > 0");
  require_compatible(current.image, source, "probe_gradient");

  const ImageTensor mask = sparse_mask(current.image.shape(), options.num_pixels, rng,
                                       current.image.range());
  ImageTensor candidate = add_scaled_clipped(current.image, mask, options.theta);
  const Label candidate_label = oracle.classify(candidate);

  GradientProbe probe;
  probe.queries_spent = 1;
  if (candidate == current.image) {
    probe.perturbed_boundary = current;
    probe.perturbed_boundary.queries_spent = 0;
    probe.direction = ImageTensor::zeros(current.image.shape(), current.image.range());
    probe.sign = 0;
    return probe;
  }

  if (pred(candidate_label)) {
    probe.perturbed_boundary = estimate_boundary(source, pred.source_label(), candidate,
                                                 candidate_label, pred, options.delta_min, oracle);
  } else {
    probe.perturbed_boundary = estimate_boundary(candidate, candidate_label, current.image,
                                                 current.label, pred, options.delta_min, oracle);
  }
  probe.queries_spent += probe.perturbed_boundary.queries_spent;
  probe.direction = subtract(probe.perturbed_boundary.image, current.image);

  const double d1 = l2_sq_dist(current.image, source);
  const double d2 = l2_sq_dist(probe.perturbed_boundary.image, source);
  probe.sign = (d2 > d1) ? -1 : (d2 < d1) ? 1 : 0;
  return probe;
}

}  // namespace redattack
