#include "redattack/baseline_attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tracker.hpp"

namespace redattack {

void BoundaryWalkConfig::validate() const {
  if (max_queries < 1) throw std::invalid_argument("max_queries must be >= 1");
  if (!(step_orth >= 0.0)) throw std::invalid_argument("step_orth must be >= 0");
  if (!(step_src >= 0.0 && step_src < 1.0)) throw std::invalid_argument("step_src must be in [0, 1)");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

namespace {

class SuccessWindow {
 public:
  explicit SuccessWindow(std::size_t size) : size_(size) {}

  // Returns the multiplier to apply once the window is full, 1.0 otherwise.
  double push(bool success, double grow, double shrink) {
    ++count_;
    if (success) ++hits_;
    if (count_ < size_) return 1.0;
    const bool mostly = 2 * hits_ > count_;
    count_ = hits_ = 0;
    return mostly ? grow : shrink;
  }

 private:
  std::size_t size_;
  std::size_t count_ = 0;
  std::size_t hits_ = 0;
};

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

AttackResult run_boundary_attack(const ImageTensor& source, const ImageTensor& reference,
                                 ClassifierOracle& oracle, const BoundaryWalkConfig& config) {
  config.validate();
  require_compatible(source, reference, "run_boundary_attack");

  BudgetedOracle budget(oracle, config.max_queries);
  detail::BestTracker tracker(source, reference);
  RandomSource rng(config.seed);

  AttackConfig mode_config;
  mode_config.mode = config.mode;
  mode_config.target = config.target;

  bool succeeded = false;
  try {
    const Label source_label = budget.classify(source);
    tracker.record_blind(budget.queries_used());
    const Label reference_label = budget.classify(reference);
    const AdversarialPredicate pred =
        detail::make_predicate(mode_config, source_label, reference_label);
    tracker.seed(reference, reference_label, budget.queries_used());
    tracker.attach(budget, pred);
    succeeded = true;

    const std::size_t n = source.size();
    const double hi = source.range();
    auto src = source.pixels();
    ImageTensor x = reference;
    double step_orth = config.step_orth;
    double step_src = config.step_src;
    SuccessWindow orth_window(config.window);
    SuccessWindow src_window(config.window);
    std::vector<double> diff(n), eta(n);

    for (;;) {
      auto px = x.pixels();
      for (std::size_t i = 0; i < n; ++i) diff[i] = src[i] - px[i];
      const double dist = norm(diff);
      if (dist == 0.0) break;

      // Gaussian direction with its component along diff removed.
      for (auto& e : eta) e = rng.normal();
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += eta[i] * diff[i];
      for (std::size_t i = 0; i < n; ++i) eta[i] -= dot / (dist * dist) * diff[i];
      const double eta_norm = norm(eta);
      if (eta_norm > 0.0) {
        for (auto& e : eta) e *= step_orth * dist / eta_norm;
      }

      // Back onto the sphere of radius dist around the source.
      std::vector<double> dir(n);
      for (std::size_t i = 0; i < n; ++i) dir[i] = diff[i] - eta[i];
      const double dir_norm = norm(dir);
      std::vector<double> sphere(n);
      for (std::size_t i = 0; i < n; ++i) {
        sphere[i] = std::clamp(src[i] - dir[i] / dir_norm * dist, 0.0, hi);
      }
      ImageTensor sphere_img(source.shape(), sphere, hi);
      const bool orth_ok = pred(budget.classify(sphere_img));
      step_orth *= orth_window.push(orth_ok, config.grow, config.shrink);
      if (!orth_ok) continue;

      std::vector<double> contracted(n);
      for (std::size_t i = 0; i < n; ++i) {
        contracted[i] = std::clamp(sphere[i] + step_src * (src[i] - sphere[i]), 0.0, hi);
      }
      ImageTensor candidate(source.shape(), std::move(contracted), hi);
      const bool src_ok = pred(budget.classify(candidate));
      step_src = std::min(step_src * src_window.push(src_ok, config.grow, config.shrink), 0.5);
      if (src_ok) x = std::move(candidate);
    }
  } catch (const BudgetExhausted&) {
  }
  return std::move(tracker).finish(budget, succeeded);
}

}  // namespace redattack
