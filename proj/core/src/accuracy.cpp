#include "qtrack/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/parallel.hpp"
#include "qtrack/quadrature.hpp"

namespace qtrack {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::Fifo: return "fifo";
    case Policy::Random: return "random";
    case Policy::Ml: return "ml";
  }
  return "?";
}

Policy policy_from_name(const std::string& name) {
  if (name == "fifo") return Policy::Fifo;
  if (name == "random" || name == "rand") return Policy::Random;
  if (name == "ml") return Policy::Ml;
  throw std::invalid_argument("unknown policy: " + name);
}

double AccuracyEstimate::conditional_success(int size) const {
  const auto it = by_size.find(size);
  if (it == by_size.end() || it->second.count == 0) return 0.0;
  return it->second.success_sum / static_cast<double>(it->second.count);
}

double AccuracyEstimate::frequency(int size) const {
  const auto it = by_size.find(size);
  if (it == by_size.end() || periods == 0) return 0.0;
  return static_cast<double>(it->second.count) / static_cast<double>(periods);
}

bool fifo_success_indicator(const BusyPeriod& bp) {
  for (int i = 0; i < bp.size(); ++i)
    if (bp.true_matching[i] != i) return false;
  return true;
}

namespace {

void check_policy_compatible(const QueueSpec& q, Policy policy) {
  if (policy != Policy::Ml) return;
  if (q.discipline == Discipline::ProcessorSharing)
    throw std::invalid_argument(
        "ml policy is undefined for processor sharing: per-transaction "
        "sojourn densities are not available");
  if (!q.service.has_density())
    throw DensityUndefinedError("ml policy requires a service density");
}

// Success value contributed by one busy period. FIFO is a pure permutation
// comparison and needs no cap; random uses the analytic reciprocal
// permanent (a variance-reduced estimator of the same quantity); ML
// recomputes the argmax matching.
double period_success(const BusyPeriod& bp, Policy policy, const QueueSpec& q,
                      const AccuracyOptions& opt, bool& oversized) {
  const int b = bp.size();
  switch (policy) {
    case Policy::Fifo:
      return fifo_success_indicator(bp) ? 1.0 : 0.0;
    case Policy::Ml: {
      if (b > opt.ml_cap) {
        oversized = true;
        return 0.0;
      }
      MatchingLimits limits;
      limits.enumeration_cap = opt.ml_cap;
      const Matching m = ml_match(bp, q.service, limits);
      return std::equal(m.begin(), m.end(), bp.true_matching.begin()) ? 1.0
                                                                      : 0.0;
    }
    case Policy::Random: {
      if (b > opt.permanent_cap) {
        oversized = true;
        return 0.0;
      }
      const BiadjacencyMatrix a = biadjacency(bp, matching_support(q), opt.eps);
      return 1.0 / static_cast<double>(permanent(a, opt.permanent_cap));
    }
  }
  return 0.0;
}

struct RunAccumulator {
  std::vector<RunStats> stats;            // per policy
  std::vector<long> oversized;            // per policy
  std::vector<std::map<int, SizeStats>> by_size;  // per policy
};

}  // namespace

std::vector<AccuracyEstimate> evaluate_policies(
    const QueueSpec& q, const std::vector<Policy>& policies, long transactions,
    int runs, std::uint64_t seed, const AccuracyOptions& options) {
  if (transactions < 1) throw std::invalid_argument("transactions must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  for (Policy p : policies) check_policy_compatible(q, p);

  const std::size_t np = policies.size();
  std::vector<RunAccumulator> per_run(runs);

  parallel_for(runs, options.jobs, [&](long r) {
    RunAccumulator acc;
    acc.stats.resize(np);
    acc.oversized.assign(np, 0);
    acc.by_size.resize(np);
    const Trace trace = simulate(q, transactions, derive_seed(seed, r));
    auto periods = busy_periods(trace);
    if (options.drop_trailing_period && !periods.empty()) periods.pop_back();
    for (const BusyPeriod& bp : periods) {
      for (std::size_t pi = 0; pi < np; ++pi) {
        bool over = false;
        const double s = period_success(bp, policies[pi], q, options, over);
        acc.stats[pi].success_sum += s;
        acc.stats[pi].periods += 1;
        if (over) acc.oversized[pi] += 1;
        auto& ss = acc.by_size[pi][bp.size()];
        ss.success_sum += s;
        ss.count += 1;
      }
    }
    per_run[r] = std::move(acc);
  });

  std::vector<AccuracyEstimate> out(np);
  for (std::size_t pi = 0; pi < np; ++pi) {
    AccuracyEstimate& est = out[pi];
    est.policy = policies[pi];
    double success = 0.0;
    for (int r = 0; r < runs; ++r) {
      const RunStats& rs = per_run[r].stats[pi];
      est.runs.push_back(rs);
      success += rs.success_sum;
      est.periods += rs.periods;
      est.oversized += per_run[r].oversized[pi];
      for (const auto& [b, ss] : per_run[r].by_size[pi]) {
        auto& tot = est.by_size[b];
        tot.success_sum += ss.success_sum;
        tot.count += ss.count;
      }
    }
    if (est.periods > 0) est.point = success / static_cast<double>(est.periods);
    // Ratio-of-sums cluster variance over runs.
    if (runs > 1 && est.periods > 0) {
      double ssq = 0.0;
      for (const RunStats& rs : est.runs) {
        const double dev = rs.success_sum - est.point * rs.periods;
        ssq += dev * dev;
      }
      const double n = static_cast<double>(est.periods);
      est.standard_error =
          std::sqrt(ssq * runs / (runs - 1.0)) / n;
    }
  }
  return out;
}

AccuracyEstimate estimate_accuracy(const QueueSpec& q, Policy policy,
                                   long transactions, int runs,
                                   std::uint64_t seed,
                                   const AccuracyOptions& options) {
  return evaluate_policies(q, {policy}, transactions, runs, seed, options)[0];
}

const char* UnitBatchProb::method_name() const {
  switch (method) {
    case Method::ClosedForm: return "closed-form";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

namespace {
double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }
}  // namespace

UnitBatchProb unit_batch_prob(const QueueSpec& q) {
  const Distribution& arrival = q.arrival;
  const Distribution& load = q.service;  // service times or job lengths
  using M = UnitBatchProb::Method;

  if (arrival.kind() == DistKind::Exponential) {
    // Poisson arrivals: P[B=1] = E[exp(-lambda T)].
    const double lam = arrival.rate();
    switch (load.kind()) {
      case DistKind::Exponential: {
        const double mu = load.rate();
        return {mu / (lam + mu), M::ClosedForm};
      }
      case DistKind::Deterministic:
        return {std::exp(-lam * load.value()), M::ClosedForm};
      case DistKind::Uniform: {
        const double a = load.lo(), b = load.hi();
        return {(std::exp(-lam * a) - std::exp(-lam * b)) / (lam * (b - a)),
                M::ClosedForm};
      }
      case DistKind::Weibull: {
        const double v = adaptive_simpson(
            [&](double u) { return std::exp(-lam * load.quantile(u)); }, 0.0,
            1.0);
        return {clamp01(v), M::Quadrature};
      }
    }
  }
  if (arrival.kind() == DistKind::Deterministic) {
    const double gap = arrival.value();
    if (load.kind() == DistKind::Deterministic)
      return {load.value() < gap ? 1.0 : 0.0, M::ClosedForm};
    return {load.cdf(gap), M::ClosedForm};  // P(T < gap), T continuous
  }
  if (load.kind() == DistKind::Deterministic)
    return {arrival.ccdf(load.value()), M::ClosedForm};
  // General continuous pair: P(X > T) = E_T[ccdf_X(T)].
  const double v = adaptive_simpson(
      [&](double u) { return arrival.ccdf(load.quantile(u)); }, 0.0, 1.0);
  return {clamp01(v), M::Quadrature};
}

double unit_batch_prob_mc(const QueueSpec& q, long pairs, std::uint64_t seed) {
  RandomSource rng(seed);
  long wins = 0;
  for (long i = 0; i < pairs; ++i) {
    const double x = q.arrival.sample(rng);
    const double t = q.service.sample(rng);
    if (x > t) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(pairs);
}

double joint_stderr(const AccuracyEstimate& a, const AccuracyEstimate& b) {
  return std::sqrt(a.standard_error * a.standard_error +
                   b.standard_error * b.standard_error);
}

double paired_diff_stderr(const AccuracyEstimate& a,
                          const AccuracyEstimate& b) {
  const std::size_t runs = a.runs.size();
  if (runs != b.runs.size() || runs < 2 || a.periods == 0 || b.periods == 0)
    return joint_stderr(a, b);
  // Cluster variance of the pooled difference estimator on shared runs.
  double ssq = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    const double da = a.runs[r].success_sum - a.point * a.runs[r].periods;
    const double db = b.runs[r].success_sum - b.point * b.runs[r].periods;
    const double dev = da / a.periods - db / b.periods;
    ssq += dev * dev;
  }
  return std::sqrt(ssq * runs / (runs - 1.0));
}

void write_accuracy_csv(
    const std::string& path, const std::string& config_hash,
    std::uint64_t seed,
    const std::vector<std::pair<std::string, AccuracyEstimate>>& entries) {
  CsvWriter csv(path);
  csv.row("config_hash", "seed", "queue_id", "policy", "scope", "estimate",
          "stderr", "count", "frequency", "oversized");
  for (const auto& [id, est] : entries) {
    csv.row(config_hash, seed, id, policy_name(est.policy), "overall",
            est.point, est.standard_error, est.periods, 1.0, est.oversized);
    for (const auto& [b, ss] : est.by_size) {
      csv.row(config_hash, seed, id, policy_name(est.policy),
              "b=" + std::to_string(b),
              ss.count ? ss.success_sum / ss.count : 0.0, "",
              ss.count, est.frequency(b), 0L);
    }
  }
}

}  // namespace qtrack
