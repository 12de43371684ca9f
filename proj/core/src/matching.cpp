#include "qtrack/matching.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <numeric>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

constexpr double kForbiddenCost = 1e15;
constexpr double kInfeasible = 1e14;  // any real assignment stays far below

// Ryser inclusion-exclusion with Gray-code updates, O(2^m * m). Row sums
// stay small ints; the alternating accumulator needs 128 bits.
std::uint64_t ryser(const std::vector<std::uint32_t>& rows) {
  const int m = static_cast<int>(rows.size());
  if (m == 0) return 1;
  __int128 total = 0;
  std::vector<std::int32_t> rowsum(m, 0);
  std::uint32_t gray = 0;
  const std::uint32_t end = 1u << m;
  for (std::uint32_t k = 1; k < end; ++k) {
    const std::uint32_t g = k ^ (k >> 1);
    const std::uint32_t changed = g ^ gray;
    const int j = std::countr_zero(changed);
    const int delta = (g & changed) ? 1 : -1;
    gray = g;
    for (int i = 0; i < m; ++i)
      if ((rows[i] >> j) & 1u) rowsum[i] += delta;
    __int128 prod = 1;
    for (int i = 0; i < m; ++i) {
      if (rowsum[i] == 0) {
        prod = 0;
        break;
      }
      prod *= rowsum[i];
    }
    if (prod != 0)
      total += ((m - std::popcount(g)) & 1) ? -prod : prod;
  }
  return static_cast<std::uint64_t>(total);
}

// Compresses `bits` onto the positions selected by `mask`.
std::uint32_t compress_columns(std::uint32_t bits, std::uint32_t mask) {
  std::uint32_t out = 0;
  int k = 0;
  while (mask) {
    const int j = std::countr_zero(mask);
    if ((bits >> j) & 1u) out |= 1u << k;
    ++k;
    mask &= mask - 1;
  }
  return out;
}

// Permanent of the submatrix on rows [from_row, n) and the columns of
// col_mask.
std::uint64_t permanent_restricted(const BiadjacencyMatrix& a, int from_row,
                                   std::uint32_t col_mask) {
  const int m = a.n - from_row;
  assert(std::popcount(col_mask) == m);
  std::vector<std::uint32_t> rows(m);
  for (int i = 0; i < m; ++i)
    rows[i] = compress_columns(a.rows[from_row + i], col_mask);
  return ryser(rows);
}

// Min-cost perfect assignment (Jonker-Volgenant style potentials, O(n^3)).
// row_to_col receives the argmin. Forbidden edges carry kForbiddenCost; a
// returned total >= kInfeasible means no admissible assignment exists.
double solve_assignment(const std::vector<double>& cost, int n,
                        std::vector<int>& row_to_col) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  row_to_col.assign(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] == 0) continue;
    row_to_col[p[j] - 1] = j - 1;
    total += cost[(p[j] - 1) * n + (j - 1)];
  }
  return total;
}

bool in_support(double d, const SupportInterval& s, double eps) {
  return d >= s.lo - eps && d <= s.hi + eps;
}

}  // namespace

SupportInterval matching_support(const QueueSpec& q) {
  if (q.discipline == Discipline::ProcessorSharing) {
    // Sojourns are bounded below by the job length but share no finite
    // upper bound.
    return {q.service.support_lo(),
            std::numeric_limits<double>::infinity()};
  }
  return {q.service.support_lo(), q.service.support_hi()};
}

std::string BiadjacencyMatrix::to_string() const {
  std::string s;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += at(i, j) ? '1' : '0';
    s += '\n';
  }
  return s;
}

bool is_valid(const BusyPeriod& bp, const Matching& m,
              const SupportInterval& support, double eps) {
  if (static_cast<int>(m.size()) != bp.size())
    throw DimensionMismatchError("matching size " + std::to_string(m.size()) +
                                 " != busy period size " +
                                 std::to_string(bp.size()));
  for (int i = 0; i < bp.size(); ++i) {
    const double d = bp.departures[m[i]] - bp.arrivals[i];
    if (!in_support(d, support, eps)) return false;
  }
  return true;
}

bool is_valid(const BusyPeriod& bp, const Matching& m,
              const Distribution& service, double eps) {
  return is_valid(bp, m,
                  SupportInterval{service.support_lo(), service.support_hi()},
                  eps);
}

BiadjacencyMatrix biadjacency(const BusyPeriod& bp,
                              const SupportInterval& support, double eps) {
  const int n = bp.size();
  if (n < 1) throw std::invalid_argument("biadjacency: empty busy period");
  if (n > 31) throw BusyPeriodTooLargeError(n, 31);
  BiadjacencyMatrix a;
  a.n = n;
  a.rows.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (in_support(bp.departures[j] - bp.arrivals[i], support, eps))
        a.rows[i] |= 1u << j;
  return a;
}

BiadjacencyMatrix biadjacency(const BusyPeriod& bp,
                              const Distribution& service, double eps) {
  return biadjacency(
      bp, SupportInterval{service.support_lo(), service.support_hi()}, eps);
}

std::uint64_t permanent(const BiadjacencyMatrix& a, int cap) {
  const int hard_cap = std::min(cap, 20);
  if (a.n > hard_cap) throw BusyPeriodTooLargeError(a.n, hard_cap);
  return ryser(a.rows);
}

Matching fifo_match(const BusyPeriod& bp) {
  Matching m(bp.size());
  std::iota(m.begin(), m.end(), 0);
  return m;
}

Matching random_match(const BusyPeriod& bp, const SupportInterval& support,
                      RandomSource& rng, const MatchingLimits& limits) {
  const int n = bp.size();
  if (n > limits.enumeration_cap)
    throw BusyPeriodTooLargeError(n, limits.enumeration_cap);
  const BiadjacencyMatrix a = biadjacency(bp, support);
  Matching perm(n);
  std::uint32_t avail = n == 31 ? 0x7fffffffu : ((1u << n) - 1u);
  for (int i = 0; i < n; ++i) {
    // Each column choice is weighted by the number of completions, which
    // makes every full matching equally likely (probability 1/perm).
    std::uint32_t candidates = a.rows[i] & avail;
    std::uint64_t total = 0;
    std::vector<std::pair<int, std::uint64_t>> counts;
    while (candidates) {
      const int j = std::countr_zero(candidates);
      candidates &= candidates - 1;
      const std::uint64_t c =
          i + 1 == n ? 1 : permanent_restricted(a, i + 1, avail & ~(1u << j));
      if (c > 0) {
        counts.emplace_back(j, c);
        total += c;
      }
    }
    if (total == 0)
      throw Error("random_match: no valid matching (truth should be valid)");
    std::uint64_t r = rng.below(total);
    for (const auto& [j, c] : counts) {
      if (r < c) {
        perm[i] = j;
        avail &= ~(1u << j);
        break;
      }
      r -= c;
    }
  }
  return perm;
}

Matching random_match(const BusyPeriod& bp, const Distribution& service,
                      RandomSource& rng, const MatchingLimits& limits) {
  return random_match(
      bp, SupportInterval{service.support_lo(), service.support_hi()}, rng,
      limits);
}

double matching_log_likelihood(const BusyPeriod& bp, const Matching& m,
                               const Distribution& service) {
  if (static_cast<int>(m.size()) != bp.size())
    throw DimensionMismatchError("matching size mismatch");
  double total = 0.0;
  for (int i = 0; i < bp.size(); ++i) {
    const double d = bp.departures[m[i]] - bp.arrivals[i];
    const double f = d >= 0 ? service.pdf(d) : 0.0;
    if (f <= 0) return -std::numeric_limits<double>::infinity();
    total += std::log(f);
  }
  return total;
}

Matching ml_match(const BusyPeriod& bp, const Distribution& service,
                  const MatchingLimits& limits) {
  const int n = bp.size();
  if (n > limits.enumeration_cap)
    throw BusyPeriodTooLargeError(n, limits.enumeration_cap);
  if (!service.has_density())
    throw DensityUndefinedError(
        "ml_match requires a service density; use support-based policies "
        "for deterministic services");
  if (n == 1) return Matching{0};

  const SupportInterval support{service.support_lo(), service.support_hi()};
  std::vector<double> cost(n * n, kForbiddenCost);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = bp.departures[j] - bp.arrivals[i];
      if (!in_support(d, support, kSupportTolerance)) continue;
      const double f = service.pdf(std::max(d, 0.0));
      if (f <= 0 || !std::isfinite(f)) continue;
      cost[i * n + j] = -std::log(f);
    }
  }

  std::vector<int> assignment;
  const double best_cost = solve_assignment(cost, n, assignment);
  if (best_cost >= kInfeasible)
    throw Error("ml_match: no matching with positive likelihood");
  const double best_value = -best_cost;
  const double tol = 1e-9 * (1.0 + std::fabs(best_value));

  // Lexicographic refinement: fix the smallest departure index per arrival
  // that still admits an optimal completion. Returns the lex-smallest
  // argmax, so fully tied instances (exponential service) resolve to FIFO.
  Matching result(n);
  std::vector<int> free_cols(n);
  std::iota(free_cols.begin(), free_cols.end(), 0);
  double prefix = 0.0;
  for (int i = 0; i < n; ++i) {
    const int m = n - i - 1;
    bool fixed = false;
    for (std::size_t idx = 0; idx < free_cols.size() && !fixed; ++idx) {
      const int j = free_cols[idx];
      if (cost[i * n + j] >= kInfeasible) continue;
      double completion = 0.0;
      if (m > 0) {
        std::vector<double> sub(m * m);
        for (int r = 0; r < m; ++r) {
          int cc = 0;
          for (int c = 0; c < m + 1; ++c) {
            const int col = free_cols[c];
            if (col == j) continue;
            sub[r * m + cc] = cost[(i + 1 + r) * n + col];
            ++cc;
          }
        }
        std::vector<int> sub_assign;
        const double sub_cost = solve_assignment(sub, m, sub_assign);
        if (sub_cost >= kInfeasible) continue;
        completion = -sub_cost;
      }
      const double value = prefix + (-cost[i * n + j]) + completion;
      if (value >= best_value - tol) {
        result[i] = j;
        prefix += -cost[i * n + j];
        free_cols.erase(free_cols.begin() + idx);
        fixed = true;
      }
    }
    if (!fixed) throw Error("ml_match: internal refinement failure");
  }
  return result;
}

std::uint64_t for_each_perfect_matching(
    const BiadjacencyMatrix& a,
    const std::function<void(const Matching&)>& visit) {
  const int n = a.n;
  Matching perm(n);
  std::uint64_t count = 0;
  // Lexicographic DFS; exponential in the worst case, test-scale only.
  std::function<void(int, std::uint32_t)> rec = [&](int i, std::uint32_t avail) {
    if (i == n) {
      ++count;
      if (visit) visit(perm);
      return;
    }
    std::uint32_t bits = a.rows[i] & avail;
    while (bits) {
      const int j = std::countr_zero(bits);
      bits &= bits - 1;
      perm[i] = j;
      rec(i + 1, avail & ~(1u << j));
    }
  };
  rec(0, n >= 31 ? 0x7fffffffu : ((1u << n) - 1u));
  return count;
}

}  // namespace qtrack
