#ifndef QTRACK_ALLOCATION_HPP
#define QTRACK_ALLOCATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtrack/accuracy.hpp"
#include "qtrack/queue_sim.hpp"

namespace qtrack {

struct QueueEntry {
  std::string id;
  QueueSpec spec;
};

// Budgeted instrumentation problem: pick at most `budget` queues to
// instrument (accuracy 1 there) so the summed effective accuracy is
// maximized. Accuracy estimates are required only for the optimal strategy.
struct AllocationProblem {
  std::vector<QueueEntry> queues;
  int budget = 0;
  std::optional<std::vector<AccuracyEstimate>> accuracies;
};

struct AllocationResult {
  std::string strategy;
  std::vector<std::uint8_t> selected;  // indicator per queue
  // budget + sum of un-instrumented accuracies; NaN when no accuracy
  // vector was supplied.
  double objective = 0.0;
  std::vector<double> score;  // per-queue ranking score used
  // Set when the selection boundary is closer than one joint standard
  // error, i.e. the ranking is not statistically resolved.
  bool ambiguous = false;

  int selected_count() const;
  std::vector<int> selected_indices() const;
};

// Instruments the E queues with the lowest estimated accuracy.
AllocationResult optimal_allocation(const AllocationProblem& p);

// Instruments the E queues with the highest load factor.
AllocationResult load_factor_allocation(const AllocationProblem& p);

// Instruments the E queues with the lowest P[B = 1].
AllocationResult unit_batch_allocation(const AllocationProblem& p);

// Uniformly random E-subset baseline.
AllocationResult random_allocation(const AllocationProblem& p,
                                   std::uint64_t seed);

// |selected(a) & selected(b)| / E; 1 for two empty selections.
double overlap_fraction(const AllocationResult& a, const AllocationResult& b);

void write_allocation_csv(const std::string& path,
                          const std::string& config_hash, std::uint64_t seed,
                          const AllocationProblem& problem,
                          const std::vector<AllocationResult>& results,
                          const AllocationResult& reference);

}  // namespace qtrack

#endif  // QTRACK_ALLOCATION_HPP
