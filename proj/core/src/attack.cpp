#include "redattack/attack.hpp"

#include <stdexcept>
#include <string>

#include "redattack/efficient_update.hpp"
#include "redattack/gradient_estimate.hpp"
#include "redattack/metrics.hpp"
#include "tracker.hpp"

namespace redattack {

void AttackConfig::validate() const {
  if (!(delta_min > 0.0)) throw std::invalid_argument("delta_min must be > 0");
  if (num_pixels < 1) throw std::invalid_argument("num_pixels must be >= 1");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (!(max_jump > 0.0)) throw std::invalid_argument("max_jump must be > 0");
  if (max_queries < 1) throw std::invalid_argument("max_queries must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

AttackMetrics compute_metrics(const ImageTensor& adversarial, const ImageTensor& source) {
  AttackMetrics m;
  m.pert_norm = perturbation_norm(adversarial, source);
  try {
    m.ssim = ssim(adversarial, source);
  } catch (const ImageTooSmall&) {
  }
  try {
    m.cc = correlation(adversarial, source);
  } catch (const ZeroVariance&) {
  }
  return m;
}

namespace detail {

AdversarialPredicate make_predicate(const AttackConfig& config, Label source_label,
                                    Label reference_label) {
  if (config.mode == AttackMode::kUntargeted) {
    if (reference_label == source_label) {
      throw InvalidReference("reference has the source's label " +
                             std::to_string(source_label.id));
    }
    return AdversarialPredicate::untargeted(source_label);
  }
  const Label target = config.target.value_or(reference_label);
  if (reference_label != target) {
    throw InvalidReference("reference is labelled " + std::to_string(reference_label.id) +
                           ", not the target " + std::to_string(target.id));
  }
  return AdversarialPredicate::targeted(source_label, target);
}

}  // namespace detail

AttackResult run_attack(const ImageTensor& source, const ImageTensor& reference,
                        ClassifierOracle& oracle, const AttackConfig& config,
                        const AttackHooks& hooks) {
  config.validate();
  require_compatible(source, reference, "run_attack");

  BudgetedOracle budget(oracle, config.max_queries);
  detail::BestTracker tracker(source, reference);
  RandomSource rng(config.seed);
  const ProbeOptions probe_options{config.num_pixels, config.theta, config.delta_min};
  const UpdateOptions update_options{config.max_jump, config.max_halvings};

  bool succeeded = false;
  try {
    const Label source_label = budget.classify(source);
    tracker.record_blind(budget.queries_used());
    const Label reference_label = budget.classify(reference);
    const AdversarialPredicate pred =
        detail::make_predicate(config, source_label, reference_label);
    tracker.seed(reference, reference_label, budget.queries_used());
    tracker.attach(budget, pred);

    BoundarySample current = estimate_boundary(source, source_label, reference, reference_label,
                                               pred, config.delta_min, budget);
    succeeded = true;
    for (;;) {
      if (hooks.on_iterate) hooks.on_iterate(current);
      const GradientProbe probe =
          probe_gradient(current, source, pred, probe_options, budget, rng);
      // A zero sign carries no direction; draw a fresh mask instead.
      if (probe.sign == 0) continue;
      const UpdateStep step =
          efficient_update(current, probe, source, pred, update_options, budget);
      if (!step.accepted) continue;
      if (step.on_boundary) {
        current = probe.perturbed_boundary;
        continue;
      }
      current = estimate_boundary(source, source_label, step.image, step.label, pred,
                                  config.delta_min, budget);
    }
  } catch (const BudgetExhausted&) {
  }
  return std::move(tracker).finish(budget, succeeded);
}

namespace {

bool better(const AttackResult& a, const AttackResult& b) {
  if (a.succeeded != b.succeeded) return a.succeeded;
  return a.metrics.pert_norm < b.metrics.pert_norm;
}

}  // namespace

AttackResult run_with_restarts(const ImageTensor& source, std::span<const ImageTensor> references,
                               ClassifierOracle& oracle, const AttackConfig& config) {
  config.validate();
  if (references.empty()) throw std::invalid_argument("run_with_restarts needs a reference");
  const std::size_t runs = config.restarts;
  if (config.max_queries < runs) {
    throw std::invalid_argument("max_queries must cover at least one query per restart");
  }

  std::optional<AttackResult> best;
  std::optional<InvalidReference> last_error;
  for (std::size_t i = 0; i < runs; ++i) {
    AttackConfig run_config = config;
    run_config.restarts = 1;
    run_config.max_queries = config.max_queries / runs + (i < config.max_queries % runs ? 1 : 0);
    run_config.seed = derive_seed(config.seed, i);
    try {
      AttackResult r = run_attack(source, references[i % references.size()], oracle, run_config);
      if (!best || better(r, *best)) best = std::move(r);
    } catch (const InvalidReference& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return std::move(*best);
}

}  // namespace redattack
