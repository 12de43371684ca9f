#ifndef QTRACK_ORDERING_HPP
#define QTRACK_ORDERING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qtrack/accuracy.hpp"
#include "qtrack/queue_sim.hpp"

namespace qtrack {

enum class OrderRelation { StDominates, CxDominated, None, Inconclusive };

const char* relation_name(OrderRelation r);

struct OrderGridPoint {
  double x = 0.0;
  double lhs = 0.0;   // ccdf / stop-loss of the first sample set
  double rhs = 0.0;   // same for the second
  double band = 0.0;  // allowed noise at this point
};

// Three-valued verdict: Monte Carlo cannot certify a continuum inequality,
// so crossings inside the noise band stay inconclusive rather than flipping
// to a hard no.
struct OrderVerdict {
  OrderRelation relation = OrderRelation::Inconclusive;
  std::vector<OrderGridPoint> evidence;
  int grid_size = 0;
  double confidence = 0.0;
  std::string note;
};

// Empirical "samples1 >=st samples2": pointwise ccdf dominance on a quantile
// grid over the pooled range, with a DKW band at the stated confidence.
OrderVerdict st_dominates(std::span<const double> samples1,
                          std::span<const double> samples2,
                          int grid_size = 200, double confidence = 0.99);

// Empirical "samples1 <=cx samples2" via the stop-loss transform
// E[(Z - t)^+] plus mean equality.
OrderVerdict cx_dominated(std::span<const double> samples1,
                          std::span<const double> samples2,
                          int grid_size = 200, double confidence = 0.99);

// |T(1) - T(2)| over n independent service pairs; the signed difference is
// symmetric about zero.
std::vector<double> spread_samples(const Distribution& service, long n,
                                   std::uint64_t seed);

// st_dominates applied to simulated busy-period sizes of the two queues.
OrderVerdict busy_period_order_check(const QueueSpec& qa, const QueueSpec& qb,
                                     long transactions, std::uint64_t seed);

// --- analytic comparisons on the catalog -------------------------------

enum class CcdfOrder { Equal, FirstHigher, SecondHigher, Crossing };

// Exact ccdf comparison on a dense grid of closed-form evaluations; no
// sampling noise. FirstHigher means a >=st b.
CcdfOrder analytic_ccdf_order(const Distribution& a, const Distribution& b);

// a <=cx b for equal-mean catalog laws via the single-crossing cut
// criterion. Undetermined means the ccdfs cross more than once, where the
// cut criterion is silent; callers fall back to the empirical checker.
enum class CxOrder { Yes, Equal, No, Undetermined };
CxOrder analytic_cx_le(const Distribution& a, const Distribution& b);

// True when b's law equals a's up to a positive scale factor.
bool same_family_scaled(const Distribution& a, const Distribution& b);

// --- theorem certification ----------------------------------------------

struct PreconditionCheck {
  std::string name;
  std::string verdict;  // "analytic:holds", "empirical:stDominates", ...
  bool satisfied = false;
};

struct TheoremCertificate {
  std::string theorem;
  Policy policy = Policy::Fifo;
  std::vector<PreconditionCheck> preconditions;
  bool certified = false;
  // predicted_sign < 0 predicts acc(a) <= acc(b); > 0 the reverse;
  // 0 predicts equality.
  int predicted_sign = 0;
  std::string prediction;
  std::string notes;
};

struct MeasuredComparison {
  double acc_a = 0.0, acc_b = 0.0, stderr_joint = 0.0;
  bool available = false;
};

struct CertificationReport {
  std::string pair_label;
  Policy policy = Policy::Fifo;
  std::vector<TheoremCertificate> certificates;
  MeasuredComparison measured;
  std::string measured_summary;
};

struct OrderingOptions {
  long order_samples = 100000;   // empirical precondition sample size
  int grid_size = 200;
  double confidence = 0.99;
  long transactions = 1000;      // measured-accuracy confirmation
  int runs = 10;
  int jobs = 1;
  bool measure_accuracies = true;
};

// Evaluates every theorem whose queue-discipline pattern matches the pair,
// in both orientations, and reports which ones certify a predicted accuracy
// ordering. Certified predictions are then checked against measured
// accuracies under the given policy.
CertificationReport certify_heuristic_optimality(
    const QueueSpec& qa, const QueueSpec& qb, Policy policy,
    std::uint64_t seed, const OrderingOptions& options = {});

std::string format_certification_report(const CertificationReport& r);

}  // namespace qtrack

#endif  // QTRACK_ORDERING_HPP
