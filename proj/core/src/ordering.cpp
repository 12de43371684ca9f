#include "qtrack/ordering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/rng.hpp"

namespace qtrack {

const char* relation_name(OrderRelation r) {
  switch (r) {
    case OrderRelation::StDominates: return "stDominates";
    case OrderRelation::CxDominated: return "cxDominated";
    case OrderRelation::None: return "none";
    case OrderRelation::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

double sample_mean(std::span<const double> s) {
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

double sample_variance(std::span<const double> s, double mean) {
  if (s.size() < 2) return 0.0;
  double ssq = 0.0;
  for (double v : s) ssq += (v - mean) * (v - mean);
  return ssq / static_cast<double>(s.size() - 1);
}

// Inverse standard normal cdf (Acklam's rational approximation).
double norm_ppf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Quantile grid over the pooled sample range (deduplicated).
std::vector<double> quantile_grid(std::span<const double> s1,
                                  std::span<const double> s2, int grid_size) {
  std::vector<double> pooled;
  pooled.reserve(s1.size() + s2.size());
  pooled.insert(pooled.end(), s1.begin(), s1.end());
  pooled.insert(pooled.end(), s2.begin(), s2.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> grid;
  grid.reserve(grid_size);
  const std::size_t n = pooled.size();
  for (int k = 0; k < grid_size; ++k) {
    const std::size_t idx =
        static_cast<std::size_t>(static_cast<double>(k) * (n - 1) /
                                 std::max(1, grid_size - 1));
    grid.push_back(pooled[idx]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double empirical_ccdf(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(sorted.end() - it) /
         static_cast<double>(sorted.size());
}

std::vector<double> draw_samples(const Distribution& d, long n,
                                 std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) out[i] = d.sample(rng);
  return out;
}

}  // namespace

OrderVerdict st_dominates(std::span<const double> samples1,
                          std::span<const double> samples2, int grid_size,
                          double confidence) {
  if (samples1.empty() || samples2.empty())
    throw std::invalid_argument("st_dominates: sample sets must be nonempty");
  std::vector<double> s1(samples1.begin(), samples1.end());
  std::vector<double> s2(samples2.begin(), samples2.end());
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());

  const double delta = 1.0 - confidence;
  const double band =
      std::sqrt(std::log(2.0 / delta) / (2.0 * s1.size())) +
      std::sqrt(std::log(2.0 / delta) / (2.0 * s2.size()));

  OrderVerdict v;
  v.grid_size = grid_size;
  v.confidence = confidence;
  double min_diff = 0.0;
  for (double x : quantile_grid(samples1, samples2, grid_size)) {
    const double lhs = empirical_ccdf(s1, x);
    const double rhs = empirical_ccdf(s2, x);
    v.evidence.push_back({x, lhs, rhs, band});
    min_diff = std::min(min_diff, lhs - rhs);
  }
  if (min_diff < -band) {
    v.relation = OrderRelation::None;
    v.note = "ccdf violation beyond the DKW band";
  } else if (min_diff >= 0.0) {
    v.relation = OrderRelation::StDominates;
  } else {
    v.relation = OrderRelation::Inconclusive;
    v.note = "ccdf crossing within the noise band";
  }
  return v;
}

OrderVerdict cx_dominated(std::span<const double> samples1,
                          std::span<const double> samples2, int grid_size,
                          double confidence) {
  if (samples1.empty() || samples2.empty())
    throw std::invalid_argument("cx_dominated: sample sets must be nonempty");
  const double z = norm_ppf(1.0 - 0.5 * (1.0 - confidence));

  OrderVerdict v;
  v.grid_size = grid_size;
  v.confidence = confidence;

  const double m1 = sample_mean(samples1);
  const double m2 = sample_mean(samples2);
  const double var1 = sample_variance(samples1, m1);
  const double var2 = sample_variance(samples2, m2);
  const double mean_band =
      z * std::sqrt(var1 / samples1.size() + var2 / samples2.size()) + 1e-12;
  if (std::fabs(m1 - m2) > mean_band) {
    v.relation = OrderRelation::None;
    v.note = "means differ beyond tolerance (cx requires equal means)";
    return v;
  }

  // Stop-loss transform comparison: E[(Z - t)^+] pointwise.
  auto stop_loss = [](std::span<const double> s, double t, double& se) {
    double sum = 0.0, ssq = 0.0;
    for (double x : s) {
      const double y = x > t ? x - t : 0.0;
      sum += y;
      ssq += y * y;
    }
    const double n = static_cast<double>(s.size());
    const double mean = sum / n;
    const double var = std::max(0.0, ssq / n - mean * mean);
    se = std::sqrt(var / n);
    return mean;
  };

  double max_excess = -std::numeric_limits<double>::infinity();
  bool all_nonpositive = true;
  for (double t : quantile_grid(samples1, samples2, grid_size)) {
    double se1 = 0.0, se2 = 0.0;
    const double lhs = stop_loss(samples1, t, se1);
    const double rhs = stop_loss(samples2, t, se2);
    const double band = z * std::sqrt(se1 * se1 + se2 * se2) + 1e-12;
    v.evidence.push_back({t, lhs, rhs, band});
    const double diff = lhs - rhs;
    max_excess = std::max(max_excess, diff - band);
    if (diff > 0) all_nonpositive = false;
  }
  if (max_excess > 0) {
    v.relation = OrderRelation::None;
    v.note = "stop-loss violation beyond the noise band";
  } else if (all_nonpositive) {
    v.relation = OrderRelation::CxDominated;
  } else {
    v.relation = OrderRelation::Inconclusive;
    v.note = "stop-loss crossing within the noise band";
  }
  return v;
}

std::vector<double> spread_samples(const Distribution& service, long n,
                                   std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) {
    const double t1 = service.sample(rng);
    const double t2 = service.sample(rng);
    out[i] = std::fabs(t1 - t2);
  }
  return out;
}

OrderVerdict busy_period_order_check(const QueueSpec& qa, const QueueSpec& qb,
                                     long transactions, std::uint64_t seed) {
  const Trace ta = simulate(qa, transactions, derive_seed(seed, 1));
  const Trace tb = simulate(qb, transactions, derive_seed(seed, 2));
  const std::vector<int> sa = busy_period_sizes(ta, true);
  const std::vector<int> sb = busy_period_sizes(tb, true);
  std::vector<double> da(sa.begin(), sa.end());
  std::vector<double> db(sb.begin(), sb.end());
  return st_dominates(da, db);
}

// --- analytic comparisons -------------------------------------------------

namespace {

std::vector<double> comparison_grid(const Distribution& a,
                                    const Distribution& b) {
  std::vector<double> pts;
  auto add = [&pts](const Distribution& d) {
    for (int k = 0; k < 600; ++k)
      pts.push_back(d.quantile((k + 0.5) / 600.0));
    for (double p : {0.999, 0.9999, 0.99999, 0.999999, 1 - 1e-8, 1 - 1e-10}) {
      const double q = d.quantile(p);
      if (std::isfinite(q)) pts.push_back(q);
    }
    for (double s : {d.support_lo(), d.support_hi()}) {
      if (!std::isfinite(s)) continue;
      const double eps = 1e-9 * (1.0 + std::fabs(s));
      pts.push_back(s - eps);
      pts.push_back(s);
      pts.push_back(s + eps);
    }
  };
  add(a);
  add(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  while (!pts.empty() && pts.front() < 0) pts.erase(pts.begin());
  return pts;
}

constexpr double kCcdfTol = 1e-12;

}  // namespace

CcdfOrder analytic_ccdf_order(const Distribution& a, const Distribution& b) {
  if (a == b) return CcdfOrder::Equal;
  bool has_pos = false, has_neg = false;
  for (double x : comparison_grid(a, b)) {
    const double d = a.ccdf(x) - b.ccdf(x);
    if (d > kCcdfTol) has_pos = true;
    if (d < -kCcdfTol) has_neg = true;
    if (has_pos && has_neg) return CcdfOrder::Crossing;
  }
  if (has_pos) return CcdfOrder::FirstHigher;
  if (has_neg) return CcdfOrder::SecondHigher;
  return CcdfOrder::Equal;
}

CxOrder analytic_cx_le(const Distribution& a, const Distribution& b) {
  const double ma = a.mean(), mb = b.mean();
  if (std::fabs(ma - mb) > 1e-9 * std::max(1.0, std::fabs(ma)))
    return CxOrder::No;
  if (a == b) return CxOrder::Equal;
  if (a.kind() == DistKind::Deterministic) return CxOrder::Yes;
  if (b.kind() == DistKind::Deterministic) return CxOrder::No;

  // Cut criterion: with equal means, a single ccdf crossing from above to
  // below implies the convex order.
  int sign = 0, changes = 0;
  int first_sign = 0;
  for (double x : comparison_grid(a, b)) {
    const double d = a.ccdf(x) - b.ccdf(x);
    const int s = d > kCcdfTol ? 1 : (d < -kCcdfTol ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) first_sign = s;
    if (sign != 0 && s != sign) ++changes;
    sign = s;
  }
  if (changes == 0 && first_sign == 0) return CxOrder::Equal;
  if (changes == 1 && first_sign == 1) return CxOrder::Yes;
  if (changes == 1 && first_sign == -1) return CxOrder::No;
  if (changes == 0) return CxOrder::No;  // one-sided with equal means
  return CxOrder::Undetermined;
}

bool same_family_scaled(const Distribution& a, const Distribution& b) {
  auto family = [](const Distribution& d) {
    // exponential is weibull with shape 1
    if (d.kind() == DistKind::Exponential) return std::pair<int, double>{0, 1.0};
    if (d.kind() == DistKind::Weibull) return std::pair<int, double>{0, d.shape()};
    if (d.kind() == DistKind::Uniform) return std::pair<int, double>{1, 0.0};
    return std::pair<int, double>{2, 0.0};  // deterministic
  };
  const auto [fa, pa] = family(a);
  const auto [fb, pb] = family(b);
  if (fa != fb) return false;
  if (fa == 0) return std::fabs(pa - pb) <= 1e-12 * std::max(1.0, pa);
  if (fa == 2) return true;  // point masses scale onto each other
  // uniform: intervals must be proportional
  const double cross1 = a.lo() * b.hi();
  const double cross2 = b.lo() * a.hi();
  return std::fabs(cross1 - cross2) <=
         1e-12 * std::max({1.0, std::fabs(cross1), std::fabs(cross2)});
}

// --- theorem certification -------------------------------------------------

namespace {

PreconditionCheck check_st(const std::string& name, const Distribution& lhs,
                           const Distribution& rhs, bool want_lhs_smaller) {
  PreconditionCheck c;
  c.name = name;
  const CcdfOrder order = analytic_ccdf_order(lhs, rhs);
  switch (order) {
    case CcdfOrder::Equal:
      c.verdict = "analytic:equal";
      c.satisfied = true;
      break;
    case CcdfOrder::SecondHigher:
      c.verdict = want_lhs_smaller ? "analytic:holds" : "analytic:reversed";
      c.satisfied = want_lhs_smaller;
      break;
    case CcdfOrder::FirstHigher:
      c.verdict = want_lhs_smaller ? "analytic:reversed" : "analytic:holds";
      c.satisfied = !want_lhs_smaller;
      break;
    case CcdfOrder::Crossing:
      c.verdict = "analytic:crossing";
      c.satisfied = false;
      break;
  }
  return c;
}

PreconditionCheck check_spread_ge(const Distribution& sa,
                                  const Distribution& sb,
                                  const OrderingOptions& opt,
                                  std::uint64_t seed) {
  PreconditionCheck c;
  c.name = "|V(a)| >=st |V(b)|";
  if (sb.kind() == DistKind::Deterministic) {
    c.verdict = "analytic:degenerate-zero";  // |V(b)| == 0
    c.satisfied = true;
    return c;
  }
  if (sa.kind() == DistKind::Deterministic) {
    c.verdict = "analytic:reversed";  // |V(a)| == 0 < |V(b)|
    c.satisfied = false;
    return c;
  }
  if (same_family_scaled(sa, sb)) {
    // |V| scales with the distribution.
    c.satisfied = sa.mean() >= sb.mean() * (1.0 - 1e-12);
    c.verdict = c.satisfied ? "analytic:scaled" : "analytic:reversed";
    return c;
  }
  const auto va = spread_samples(sa, opt.order_samples, derive_seed(seed, 11));
  const auto vb = spread_samples(sb, opt.order_samples, derive_seed(seed, 12));
  const OrderVerdict v = st_dominates(va, vb, opt.grid_size, opt.confidence);
  c.verdict = std::string("empirical:") + relation_name(v.relation);
  c.satisfied = v.relation == OrderRelation::StDominates;
  return c;
}

PreconditionCheck check_poisson(const std::string& name,
                                const Distribution& arrival) {
  PreconditionCheck c;
  c.name = name;
  c.satisfied = arrival.kind() == DistKind::Exponential;
  c.verdict = c.satisfied ? "analytic:holds" : "analytic:not-poisson";
  return c;
}

PreconditionCheck check_cx_le(const std::string& name, const Distribution& lhs,
                              const Distribution& rhs,
                              const OrderingOptions& opt, std::uint64_t seed) {
  PreconditionCheck c;
  c.name = name;
  switch (analytic_cx_le(lhs, rhs)) {
    case CxOrder::Yes:
      c.verdict = "analytic:holds";
      c.satisfied = true;
      return c;
    case CxOrder::Equal:
      c.verdict = "analytic:equal";
      c.satisfied = true;
      return c;
    case CxOrder::No:
      c.verdict = "analytic:fails";
      c.satisfied = false;
      return c;
    case CxOrder::Undetermined:
      break;  // multiple ccdf crossings: decide empirically
  }
  const auto sa = draw_samples(lhs, opt.order_samples, derive_seed(seed, 21));
  const auto sb = draw_samples(rhs, opt.order_samples, derive_seed(seed, 22));
  const OrderVerdict v = cx_dominated(sa, sb, opt.grid_size, opt.confidence);
  c.verdict = std::string("empirical:") + relation_name(v.relation);
  c.satisfied = v.relation == OrderRelation::CxDominated;
  return c;
}

PreconditionCheck check_support_lo(const std::string& name,
                                   const Distribution& lhs,
                                   const Distribution& rhs) {
  PreconditionCheck c;
  c.name = name;
  c.satisfied = lhs.support_lo() <= rhs.support_lo() + kSupportTolerance;
  c.verdict = c.satisfied ? "analytic:holds" : "analytic:violated";
  return c;
}

bool all_satisfied(const std::vector<PreconditionCheck>& checks) {
  for (const auto& c : checks)
    if (!c.satisfied) return false;
  return true;
}

// One orientation of a theorem: qa plays the lower-accuracy role.
using BundleFn = std::vector<PreconditionCheck> (*)(const QueueSpec&,
                                                    const QueueSpec&,
                                                    const OrderingOptions&,
                                                    std::uint64_t);

std::vector<PreconditionCheck> bundle_thm_fifo(const QueueSpec& a,
                                               const QueueSpec& b,
                                               const OrderingOptions& opt,
                                               std::uint64_t seed) {
  return {check_st("X(a) <=st X(b)", a.arrival, b.arrival, true),
          check_st("T(a) >=st T(b)", a.service, b.service, false),
          check_spread_ge(a.service, b.service, opt, seed)};
}

std::vector<PreconditionCheck> bundle_thm_rand(const QueueSpec& a,
                                               const QueueSpec& b,
                                               const OrderingOptions& opt,
                                               std::uint64_t seed) {
  (void)opt;
  (void)seed;
  return {check_st("X(a) <=st X(b)", a.arrival, b.arrival, true),
          check_st("T(a) >=st T(b)", a.service, b.service, false),
          check_support_lo("alpha(a) <= alpha(b)", a.service, b.service)};
}

std::vector<PreconditionCheck> bundle_thm_convex(const QueueSpec& a,
                                                 const QueueSpec& b,
                                                 const OrderingOptions& opt,
                                                 std::uint64_t seed) {
  std::vector<PreconditionCheck> checks{
      check_poisson("arrivals(a) Poisson", a.arrival),
      check_poisson("arrivals(b) Poisson", b.arrival)};
  if (checks[0].satisfied && checks[1].satisfied) {
    checks.push_back(check_cx_le(
        "lambda(a)*T(a) <=cx lambda(b)*T(b)",
        a.service.scaled(a.arrival_rate()), b.service.scaled(b.arrival_rate()),
        opt, seed));
  } else {
    checks.push_back({"lambda(a)*T(a) <=cx lambda(b)*T(b)", "skipped", false});
  }
  return checks;
}

std::vector<PreconditionCheck> bundle_corollary(const QueueSpec& a,
                                                const QueueSpec& b,
                                                const OrderingOptions&,
                                                std::uint64_t) {
  PreconditionCheck services;
  services.name = "services same family (linear scalings)";
  services.satisfied = same_family_scaled(a.service, b.service);
  services.verdict = services.satisfied ? "analytic:holds" : "analytic:fails";
  PreconditionCheck arrivals;
  arrivals.name = "arrivals same family (linear scalings)";
  arrivals.satisfied = same_family_scaled(a.arrival, b.arrival);
  arrivals.verdict = arrivals.satisfied ? "analytic:holds" : "analytic:fails";
  PreconditionCheck rho;
  rho.name = "rho(a) >= rho(b)";
  rho.satisfied = a.load_factor() >= b.load_factor() * (1.0 - 1e-12);
  rho.verdict = rho.satisfied ? "analytic:holds" : "analytic:reversed";
  return {services, arrivals, rho};
}

std::vector<PreconditionCheck> bundle_thm_ps(const QueueSpec& a,
                                             const QueueSpec& b,
                                             const OrderingOptions&,
                                             std::uint64_t) {
  return {check_st("X(a) <=st X(b)", a.arrival, b.arrival, true),
          check_st("J(a) >=st J(b)", a.service, b.service, false),
          check_support_lo("alpha(a) <= alpha(b)", a.service, b.service)};
}

// a must be the processor-sharing queue, b the infinite-server queue.
std::vector<PreconditionCheck> bundle_thm_mixed(const QueueSpec& a,
                                                const QueueSpec& b,
                                                const OrderingOptions&,
                                                std::uint64_t) {
  return {check_st("X(ps) <=st X(is)", a.arrival, b.arrival, true),
          check_st("J(ps) >=st T(is)", a.service, b.service, false),
          check_support_lo("alpha(ps) <= alpha(is)", a.service, b.service)};
}

struct TheoremSpec {
  const char* name;
  Policy policy;
  BundleFn bundle;
  const char* notes;
};

TheoremCertificate evaluate_theorem(const TheoremSpec& spec,
                                    const QueueSpec& qa, const QueueSpec& qb,
                                    int sign_when_a_is_k,
                                    const OrderingOptions& opt,
                                    std::uint64_t seed) {
  TheoremCertificate cert;
  cert.theorem = spec.name;
  cert.policy = spec.policy;
  cert.notes = spec.notes;

  auto forward = spec.bundle(qa, qb, opt, seed);
  if (all_satisfied(forward)) {
    cert.preconditions = std::move(forward);
    cert.certified = true;
    cert.predicted_sign = sign_when_a_is_k;
  } else {
    auto backward = spec.bundle(qb, qa, opt, derive_seed(seed, 7));
    if (all_satisfied(backward)) {
      // Orientation with the roles swapped holds; rename for the report.
      for (auto& c : backward) c.name += " [orientation b,a]";
      cert.preconditions = std::move(backward);
      cert.certified = true;
      cert.predicted_sign = -sign_when_a_is_k;
    } else {
      cert.preconditions = std::move(forward);
      cert.certified = false;
      cert.predicted_sign = 0;
    }
  }
  if (cert.certified) {
    const char* pol = policy_name(spec.policy);
    if (cert.predicted_sign < 0)
      cert.prediction = std::string("P^") + pol + "(a) <= P^" + pol + "(b)";
    else if (cert.predicted_sign > 0)
      cert.prediction = std::string("P^") + pol + "(a) >= P^" + pol + "(b)";
    else
      cert.prediction = std::string("P^") + pol + "(a) == P^" + pol + "(b)";
  } else {
    cert.prediction = "no certificate";
  }
  return cert;
}

}  // namespace

CertificationReport certify_heuristic_optimality(const QueueSpec& qa,
                                                 const QueueSpec& qb,
                                                 Policy policy,
                                                 std::uint64_t seed,
                                                 const OrderingOptions& opt) {
  CertificationReport report;
  report.policy = policy;
  report.pair_label = "a={" + qa.arrival.describe() + "," +
                      qa.service.describe() +
                      (qa.discipline == Discipline::ProcessorSharing ? ",ps"
                                                                     : ",is") +
                      "} b={" + qb.arrival.describe() + "," +
                      qb.service.describe() +
                      (qb.discipline == Discipline::ProcessorSharing ? ",ps"
                                                                     : ",is") +
                      "}";

  const bool a_ps = qa.discipline == Discipline::ProcessorSharing;
  const bool b_ps = qb.discipline == Discipline::ProcessorSharing;

  std::vector<TheoremSpec> theorems;
  if (!a_ps && !b_ps) {
    theorems.push_back({"theorem-1 load-factor under fifo", Policy::Fifo,
                        &bundle_thm_fifo, ""});
    theorems.push_back({"theorem-2 load-factor under random", Policy::Random,
                        &bundle_thm_rand, ""});
    theorems.push_back(
        {"theorem-3 unit-batch under stochastic order",
         policy == Policy::Random ? Policy::Random : Policy::Fifo,
         policy == Policy::Random ? &bundle_thm_rand : &bundle_thm_fifo,
         "also orders P[B=1] the same way"});
    theorems.push_back(
        {"theorem-4 unit-batch under convex order (fifo)", Policy::Fifo,
         &bundle_thm_convex,
         "accuracy ordering only; the unit-batch score P[B=1] can rank "
         "against it (deterministic-vs-exponential instance)"});
    theorems.push_back({"corollary-1 same distribution family",
                        policy, &bundle_corollary, ""});
  } else if (a_ps && b_ps) {
    theorems.push_back({"theorem-5 processor sharing under random",
                        Policy::Random, &bundle_thm_ps,
                        "interpreted as: stochastically larger jobs give the "
                        "larger busy periods and the lower accuracy"});
  } else {
    // Normalize so the processor-sharing queue plays role a.
    if (a_ps) {
      theorems.push_back({"theorem-6 product-form network under random",
                          Policy::Random, &bundle_thm_mixed, ""});
    }
  }

  for (const TheoremSpec& t : theorems) {
    // Theorem 4's conclusion favors the cx-smaller queue, so the certified
    // orientation predicts acc(a) >= acc(b); all others predict acc(a) <=
    // acc(b) when qa satisfies the "worse" role.
    const int sign = t.bundle == &bundle_thm_convex ? +1 : -1;
    report.certificates.push_back(
        evaluate_theorem(t, qa, qb, sign, opt, derive_seed(seed, 3)));
  }
  if (!a_ps && b_ps) {
    // Mixed pair given as (is, ps): evaluate theorem 6 with roles swapped.
    TheoremSpec t{"theorem-6 product-form network under random",
                  Policy::Random, &bundle_thm_mixed, ""};
    TheoremCertificate cert =
        evaluate_theorem(t, qb, qa, -1, opt, derive_seed(seed, 3));
    if (cert.certified) cert.predicted_sign = -cert.predicted_sign;
    if (cert.predicted_sign < 0)
      cert.prediction = "P^random(a) <= P^random(b)";
    else if (cert.predicted_sign > 0)
      cert.prediction = "P^random(a) >= P^random(b)";
    report.certificates.push_back(std::move(cert));
  }

  if (opt.measure_accuracies) {
    const AccuracyOptions acc_opt{.jobs = opt.jobs};
    const AccuracyEstimate ea = estimate_accuracy(
        qa, policy, opt.transactions, opt.runs, derive_seed(seed, 101), acc_opt);
    const AccuracyEstimate eb = estimate_accuracy(
        qb, policy, opt.transactions, opt.runs, derive_seed(seed, 102), acc_opt);
    report.measured.acc_a = ea.point;
    report.measured.acc_b = eb.point;
    report.measured.stderr_joint = joint_stderr(ea, eb);
    report.measured.available = true;
    report.measured_summary =
        std::string("measured P^") + policy_name(policy) + "(a)=" +
        format_double(ea.point) + " P^" + policy_name(policy) + "(b)=" +
        format_double(eb.point) + " joint-se=" +
        format_double(report.measured.stderr_joint);
  }
  return report;
}

std::string format_certification_report(const CertificationReport& r) {
  std::string out = "pair: " + r.pair_label + "\n";
  out += std::string("policy: ") + policy_name(r.policy) + "\n";
  for (const TheoremCertificate& c : r.certificates) {
    out += "  " + c.theorem + ": " +
           (c.certified ? "CERTIFIED -> " + c.prediction : "no certificate") +
           "\n";
    for (const PreconditionCheck& p : c.preconditions)
      out += "    - " + p.name + ": " + p.verdict + "\n";
    if (!c.notes.empty()) out += "    note: " + c.notes + "\n";
  }
  if (r.measured.available) out += "  " + r.measured_summary + "\n";
  return out;
}

}  // namespace qtrack
