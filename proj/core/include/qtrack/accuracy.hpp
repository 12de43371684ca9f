#ifndef QTRACK_ACCURACY_HPP
#define QTRACK_ACCURACY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtrack/matching.hpp"
#include "qtrack/queue_sim.hpp"

namespace qtrack {

enum class Policy { Fifo, Random, Ml };

const char* policy_name(Policy p);
Policy policy_from_name(const std::string& name);

struct SizeStats {
  double success_sum = 0.0;
  long count = 0;
};

struct RunStats {
  double success_sum = 0.0;
  long periods = 0;
};

// Per-queue tracking accuracy: the probability that the policy matches a
// typical busy period completely. Periods are pooled across runs
// (period-weighted); the standard error uses between-run variance to
// respect dependence within a run.
struct AccuracyEstimate {
  Policy policy = Policy::Fifo;
  double point = 0.0;
  double standard_error = 0.0;
  long periods = 0;
  long oversized = 0;  // periods beyond the policy's cap, scored as failures
  std::map<int, SizeStats> by_size;
  std::vector<RunStats> runs;  // per-replication sums, for paired analysis

  double conditional_success(int size) const;
  double frequency(int size) const;
};

struct AccuracyOptions {
  int ml_cap = 12;
  int permanent_cap = 20;
  double eps = kSupportTolerance;
  // A trailing busy period is cut off by the transaction horizon and is
  // discarded from the statistics.
  bool drop_trailing_period = true;
  int jobs = 1;
};

// Evaluates several policies on shared simulated runs (common random
// numbers), so cross-policy differences are not inflated by simulation
// noise. Replications use seeds derived from (seed, run index).
std::vector<AccuracyEstimate> evaluate_policies(
    const QueueSpec& q, const std::vector<Policy>& policies, long transactions,
    int runs, std::uint64_t seed, const AccuracyOptions& options = {});

AccuracyEstimate estimate_accuracy(const QueueSpec& q, Policy policy,
                                   long transactions, int runs,
                                   std::uint64_t seed,
                                   const AccuracyOptions& options = {});

// Success under FIFO is simply an in-order true matching.
bool fifo_success_indicator(const BusyPeriod& bp);

// P[B = 1] = P(X > T): closed form where the pair admits one, otherwise a
// deterministic probability-transform quadrature. The method used is
// recorded alongside the value.
struct UnitBatchProb {
  double value = 0.0;
  enum class Method { ClosedForm, Quadrature, MonteCarlo } method =
      Method::ClosedForm;

  const char* method_name() const;
};

UnitBatchProb unit_batch_prob(const QueueSpec& q);

// Monte Carlo estimator over independent (X, T) pairs; kept as an
// independent cross-check of the analytic paths.
double unit_batch_prob_mc(const QueueSpec& q, long pairs, std::uint64_t seed);

double joint_stderr(const AccuracyEstimate& a, const AccuracyEstimate& b);

// Paired standard error of (a - b) computed from per-run sums on shared
// runs; requires both estimates to come from the same evaluate_policies
// call.
double paired_diff_stderr(const AccuracyEstimate& a, const AccuracyEstimate& b);

void write_accuracy_csv(
    const std::string& path, const std::string& config_hash,
    std::uint64_t seed,
    const std::vector<std::pair<std::string, AccuracyEstimate>>& entries);

}  // namespace qtrack

#endif  // QTRACK_ACCURACY_HPP
