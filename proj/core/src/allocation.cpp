#include "qtrack/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/rng.hpp"

namespace qtrack {

namespace {

void validate(const AllocationProblem& p) {
  if (p.budget < 0 || p.budget > static_cast<int>(p.queues.size()))
    throw std::invalid_argument("budget must lie in [0, |queues|]");
  if (p.accuracies && p.accuracies->size() != p.queues.size())
    throw DimensionMismatchError("accuracy vector size != queue count");
}

double objective_value(const AllocationProblem& p,
                       const std::vector<std::uint8_t>& selected) {
  if (!p.accuracies) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  for (std::size_t k = 0; k < p.queues.size(); ++k)
    value += selected[k] ? 1.0 : (*p.accuracies)[k].point;
  return value;
}

// Selects the `budget` queues with the smallest score; ties go to the
// lowest index.
AllocationResult select_by_score(const AllocationProblem& p,
                                 std::vector<double> score,
                                 const std::string& strategy) {
  const std::size_t n = p.queues.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return a < b;
  });
  AllocationResult r;
  r.strategy = strategy;
  r.selected.assign(n, 0);
  for (int k = 0; k < p.budget; ++k) r.selected[order[k]] = 1;
  r.score = std::move(score);
  r.objective = objective_value(p, r.selected);
  return r;
}

}  // namespace

int AllocationResult::selected_count() const {
  int c = 0;
  for (auto z : selected) c += z;
  return c;
}

std::vector<int> AllocationResult::selected_indices() const {
  std::vector<int> idx;
  for (std::size_t k = 0; k < selected.size(); ++k)
    if (selected[k]) idx.push_back(static_cast<int>(k));
  return idx;
}

AllocationResult optimal_allocation(const AllocationProblem& p) {
  validate(p);
  if (!p.accuracies)
    throw MissingAccuraciesError(
        "optimal allocation requires per-queue accuracy estimates");
  std::vector<double> score(p.queues.size());
  for (std::size_t k = 0; k < score.size(); ++k)
    score[k] = (*p.accuracies)[k].point;
  AllocationResult r = select_by_score(p, std::move(score), "optimal");

  // Flag rankings whose selection boundary is inside estimator noise.
  if (p.budget > 0 && p.budget < static_cast<int>(p.queues.size())) {
    double worst_selected = -1.0;
    int worst_idx = -1;
    double best_rest = 2.0;
    int best_idx = -1;
    for (std::size_t k = 0; k < p.queues.size(); ++k) {
      const double pt = (*p.accuracies)[k].point;
      if (r.selected[k] && pt > worst_selected) {
        worst_selected = pt;
        worst_idx = static_cast<int>(k);
      }
      if (!r.selected[k] && pt < best_rest) {
        best_rest = pt;
        best_idx = static_cast<int>(k);
      }
    }
    const double se = joint_stderr((*p.accuracies)[worst_idx],
                                   (*p.accuracies)[best_idx]);
    r.ambiguous = (best_rest - worst_selected) < se;
  }
  return r;
}

AllocationResult load_factor_allocation(const AllocationProblem& p) {
  validate(p);
  std::vector<double> score(p.queues.size());
  for (std::size_t k = 0; k < score.size(); ++k)
    score[k] = -p.queues[k].spec.load_factor();  // highest load first
  return select_by_score(p, std::move(score), "load-factor");
}

AllocationResult unit_batch_allocation(const AllocationProblem& p) {
  validate(p);
  std::vector<double> score(p.queues.size());
  for (std::size_t k = 0; k < score.size(); ++k)
    score[k] = unit_batch_prob(p.queues[k].spec).value;
  return select_by_score(p, std::move(score), "unit-batch");
}

AllocationResult random_allocation(const AllocationProblem& p,
                                   std::uint64_t seed) {
  validate(p);
  const std::size_t n = p.queues.size();
  RandomSource rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: the first `budget` slots are a uniform subset.
  for (int k = 0; k < p.budget; ++k) {
    const std::size_t j = k + rng.below(n - k);
    std::swap(order[k], order[j]);
  }
  AllocationResult r;
  r.strategy = "random";
  r.selected.assign(n, 0);
  for (int k = 0; k < p.budget; ++k) r.selected[order[k]] = 1;
  r.score.assign(n, 0.0);
  r.objective = objective_value(p, r.selected);
  return r;
}

double overlap_fraction(const AllocationResult& a, const AllocationResult& b) {
  if (a.selected.size() != b.selected.size())
    throw DimensionMismatchError("overlap: result sizes differ");
  const int ea = a.selected_count();
  const int eb = b.selected_count();
  if (ea != eb)
    throw DimensionMismatchError("overlap: selection sizes differ");
  if (ea == 0) return 1.0;  // two empty selections coincide
  int common = 0;
  for (std::size_t k = 0; k < a.selected.size(); ++k)
    common += a.selected[k] && b.selected[k];
  return static_cast<double>(common) / static_cast<double>(ea);
}

void write_allocation_csv(const std::string& path,
                          const std::string& config_hash, std::uint64_t seed,
                          const AllocationProblem& problem,
                          const std::vector<AllocationResult>& results,
                          const AllocationResult& reference) {
  CsvWriter csv(path);
  csv.row("config_hash", "seed", "strategy", "selected_ids", "objective",
          "overlap_with_optimal", "ambiguous");
  for (const AllocationResult& r : results) {
    std::string ids;
    for (int k : r.selected_indices()) {
      if (!ids.empty()) ids += ';';
      ids += problem.queues[k].id;
    }
    csv.row(config_hash, seed, r.strategy, ids, r.objective,
            overlap_fraction(r, reference), r.ambiguous ? 1 : 0);
  }
}

}  // namespace qtrack
