#ifndef QTRACK_MATCHING_HPP
#define QTRACK_MATCHING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtrack/queue_sim.hpp"

namespace qtrack {

// A matching is a permutation over a busy period's transactions:
// arrival i is paired with departure perm[i] (0-based).
using Matching = std::vector<std::int32_t>;

// Size caps for the combinatorial machinery. Oversized busy periods are
// scored as matching failures by the accuracy estimator and counted
// separately in diagnostics.
struct MatchingLimits {
  int permanent_cap = 20;    // Ryser permanent (exact in uint64 up to 20!)
  int enumeration_cap = 12;  // random/ML matching
};

// Duration interval accepted as a valid pairing. For infinite-server queues
// this is the service support; for processor sharing sojourns are bounded
// below by the job length but unbounded above.
struct SupportInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

SupportInterval matching_support(const QueueSpec& q);

// 0/1 validity structure: at(i, j) marks a feasible pairing of arrival i
// with departure j. Its permanent counts the valid matchings.
struct BiadjacencyMatrix {
  int n = 0;
  std::vector<std::uint32_t> rows;

  bool at(int i, int j) const { return (rows[i] >> j) & 1u; }
  std::string to_string() const;  // 0/1 grid for debugging
};

// True iff every implied duration departures[m[i]] - arrivals[i] lies in
// [lo - eps, hi + eps]. Throws DimensionMismatchError when |m| != size.
bool is_valid(const BusyPeriod& bp, const Matching& m,
              const SupportInterval& support,
              double eps = kSupportTolerance);
bool is_valid(const BusyPeriod& bp, const Matching& m,
              const Distribution& service, double eps = kSupportTolerance);

BiadjacencyMatrix biadjacency(const BusyPeriod& bp,
                              const SupportInterval& support,
                              double eps = kSupportTolerance);
BiadjacencyMatrix biadjacency(const BusyPeriod& bp,
                              const Distribution& service,
                              double eps = kSupportTolerance);

// Exact count of perfect matchings by Ryser inclusion-exclusion with Gray
// code. Throws BusyPeriodTooLargeError beyond the cap.
std::uint64_t permanent(const BiadjacencyMatrix& a, int cap = 20);

// Identity permutation: the distribution-free FIFO rule.
Matching fifo_match(const BusyPeriod& bp);

// Uniformly distributed valid matching. Sampling is sequential with
// conditional permanent counts, which reproduces the uniform law over all
// perfect matchings without materializing them.
Matching random_match(const BusyPeriod& bp, const SupportInterval& support,
                      RandomSource& rng, const MatchingLimits& limits = {});
Matching random_match(const BusyPeriod& bp, const Distribution& service,
                      RandomSource& rng, const MatchingLimits& limits = {});

// Maximum-likelihood matching: argmax over valid permutations of the summed
// log service densities of the implied durations. Ties are broken by the
// lexicographically smallest permutation, which coincides with FIFO in the
// fully tied exponential case.
Matching ml_match(const BusyPeriod& bp, const Distribution& service,
                  const MatchingLimits& limits = {});

// Log-likelihood of a matching under the given service law; -inf when some
// implied duration has zero density.
double matching_log_likelihood(const BusyPeriod& bp, const Matching& m,
                               const Distribution& service);

// Visits all perfect matchings in lexicographic order (test oracle and
// small-instance tooling). Returns the number visited.
std::uint64_t for_each_perfect_matching(
    const BiadjacencyMatrix& a,
    const std::function<void(const Matching&)>& visit);

}  // namespace qtrack

#endif  // QTRACK_MATCHING_HPP
