#ifndef REDATTACK_SRC_TRACKER_HPP
#define REDATTACK_SRC_TRACKER_HPP

#include <limits>
#include <optional>
#include <vector>

#include "redattack/attack.hpp"

namespace redattack::detail {

// Best-so-far bookkeeping shared by the RED driver and the boundary walk.
// Installed as the BudgetedOracle observer so every query, however deep in
// a sub-procedure, both extends the trace and competes for best.
class BestTracker {
 public:
  BestTracker(const ImageTensor& source, const ImageTensor& fallback)
      : source_(source), best_(fallback) {}

  // Trace entry for a query made before the predicate is known.
  void record_blind(std::size_t query_index) { trace_.push_back({query_index, best_l2_}); }

  void seed(const ImageTensor& image, Label label, std::size_t query_index) {
    offer(image, label);
    trace_.back().query_index = query_index;
  }

  void attach(BudgetedOracle& oracle, const AdversarialPredicate& pred) {
    oracle.set_observer([this, pred](std::size_t q, const ImageTensor& img, Label label) {
      if (pred(label)) {
        offer(img, label);
        trace_.back().query_index = q;
      } else {
        trace_.push_back({q, best_l2_});
      }
    });
  }

  AttackResult finish(const BudgetedOracle& oracle, bool succeeded) && {
    AttackResult r;
    r.best_adversarial = std::move(best_);
    r.best_label = best_label_;
    r.queries_used = oracle.queries_used();
    r.trace = std::move(trace_);
    r.metrics = compute_metrics(r.best_adversarial, source_);
    r.succeeded = succeeded;
    return r;
  }

 private:
  void offer(const ImageTensor& image, Label label) {
    const double d = l2_sq_dist(image, source_);
    if (d < best_l2_) {
      best_l2_ = d;
      best_ = image;
      best_label_ = label;
    }
    trace_.push_back({0, best_l2_});
  }

  const ImageTensor& source_;
  ImageTensor best_;
  std::optional<Label> best_label_;
  double best_l2_ = std::numeric_limits<double>::infinity();
  std::vector<TracePoint> trace_;
};

AdversarialPredicate make_predicate(const AttackConfig& config, Label source_label,
                                    Label reference_label);

}  // namespace redattack::detail

#endif  // REDATTACK_SRC_TRACKER_HPP
