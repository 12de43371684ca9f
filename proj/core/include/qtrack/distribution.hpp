#ifndef QTRACK_DISTRIBUTION_HPP
#define QTRACK_DISTRIBUTION_HPP

#include <limits>
#include <string>

#include "qtrack/rng.hpp"

namespace qtrack {

// Absolute tolerance for support-boundary classification. Shared by the
// matching validity test so there is a single source of truth.
inline constexpr double kSupportTolerance = 1e-9;

enum class DistKind { Exponential, Weibull, Uniform, Deterministic };

// Parametric catalog of the arrival/service/job-length laws used throughout:
// exponential(rate), weibull(shape, scale), uniform(lo, hi) and a
// deterministic point mass. All specs have finite positive mean.
class Distribution {
 public:
  // Placeholder default (unit-rate exponential) so specs can live in
  // aggregates; overwritten on construction everywhere.
  Distribution() : Distribution(DistKind::Exponential, 1.0, 0.0) {}

  static Distribution exponential(double rate);
  static Distribution weibull(double shape, double scale);
  static Distribution uniform(double lo, double hi);
  static Distribution deterministic(double value);

  DistKind kind() const { return kind_; }
  bool has_density() const { return kind_ != DistKind::Deterministic; }

  double mean() const;
  double variance() const;

  // Density; 0 outside the support. Throws DensityUndefinedError for the
  // deterministic kind.
  double pdf(double x) const;

  // P(X > x). Monotone nonincreasing, 1 below the support, 0 at and beyond
  // the upper end (point masses handled as a step).
  double ccdf(double x) const;
  double cdf(double x) const { return 1.0 - ccdf(x); }

  // Inverse cdf; p in [0, 1]. quantile(1) is +inf for unbounded laws.
  double quantile(double p) const;

  // Inversion sampling: exponential/weibull use -log(U) with U in (0,1],
  // so streams are exact and reproducible for a given seed.
  double sample(RandomSource& rng) const;

  double support_lo() const;
  double support_hi() const;

  // Law of s*X; the catalog is closed under positive scaling.
  Distribution scaled(double s) const;

  // Accessors for kind-specific parameters.
  double rate() const;        // exponential
  double shape() const;       // weibull
  double scale() const;       // weibull
  double lo() const;          // uniform
  double hi() const;          // uniform
  double value() const;       // deterministic

  bool operator==(const Distribution& o) const {
    return kind_ == o.kind_ && a_ == o.a_ && b_ == o.b_;
  }

  std::string describe() const;

 private:
  Distribution(DistKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  DistKind kind_;
  double a_;  // rate | shape | lo | value
  double b_;  // unused | scale | hi | unused
};

}  // namespace qtrack

#endif  // QTRACK_DISTRIBUTION_HPP
