#include "qtrack/distribution.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

Distribution Distribution::exponential(double rate) {
  require(std::isfinite(rate) && rate > 0, "exponential: rate must be > 0");
  return Distribution(DistKind::Exponential, rate, 0.0);
}

Distribution Distribution::weibull(double shape, double scale) {
  require(std::isfinite(shape) && shape > 0, "weibull: shape must be > 0");
  require(std::isfinite(scale) && scale > 0, "weibull: scale must be > 0");
  return Distribution(DistKind::Weibull, shape, scale);
}

Distribution Distribution::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi), "uniform: bounds must be finite");
  require(lo >= 0, "uniform: lower bound must be >= 0");
  require(hi > lo, "uniform: upper bound must exceed lower bound");
  require(lo + hi > 0, "uniform: mean must be positive");
  return Distribution(DistKind::Uniform, lo, hi);
}

Distribution Distribution::deterministic(double value) {
  require(std::isfinite(value) && value > 0, "deterministic: value must be > 0");
  return Distribution(DistKind::Deterministic, value, 0.0);
}

double Distribution::mean() const {
  switch (kind_) {
    case DistKind::Exponential: return 1.0 / a_;
    case DistKind::Weibull: return b_ * std::tgamma(1.0 + 1.0 / a_);
    case DistKind::Uniform: return 0.5 * (a_ + b_);
    case DistKind::Deterministic: return a_;
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind_) {
    case DistKind::Exponential: return 1.0 / (a_ * a_);
    case DistKind::Weibull: {
      const double g1 = std::tgamma(1.0 + 1.0 / a_);
      const double g2 = std::tgamma(1.0 + 2.0 / a_);
      return b_ * b_ * (g2 - g1 * g1);
    }
    case DistKind::Uniform: {
      const double w = b_ - a_;
      return w * w / 12.0;
    }
    case DistKind::Deterministic: return 0.0;
  }
  return 0.0;
}

double Distribution::pdf(double x) const {
  switch (kind_) {
    case DistKind::Exponential:
      return x < 0 ? 0.0 : a_ * std::exp(-a_ * x);
    case DistKind::Weibull: {
      if (x < 0) return 0.0;
      if (x == 0) {
        if (a_ > 1) return 0.0;
        if (a_ == 1) return 1.0 / b_;
        return kInf;  // shape < 1: density diverges at the origin
      }
      const double z = x / b_;
      return (a_ / b_) * std::pow(z, a_ - 1.0) * std::exp(-std::pow(z, a_));
    }
    case DistKind::Uniform:
      return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case DistKind::Deterministic:
      throw DensityUndefinedError("deterministic law has no density");
  }
  return 0.0;
}

double Distribution::ccdf(double x) const {
  switch (kind_) {
    case DistKind::Exponential:
      return x <= 0 ? 1.0 : std::exp(-a_ * x);
    case DistKind::Weibull:
      return x <= 0 ? 1.0 : std::exp(-std::pow(x / b_, a_));
    case DistKind::Uniform:
      if (x < a_) return 1.0;
      if (x >= b_) return 0.0;
      return (b_ - x) / (b_ - a_);
    case DistKind::Deterministic:
      return x < a_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double Distribution::quantile(double p) const {
  require(p >= 0 && p <= 1, "quantile: p must lie in [0, 1]");
  switch (kind_) {
    case DistKind::Exponential:
      return p == 1 ? kInf : -std::log1p(-p) / a_;
    case DistKind::Weibull:
      return p == 1 ? kInf : b_ * std::pow(-std::log1p(-p), 1.0 / a_);
    case DistKind::Uniform:
      return a_ + (b_ - a_) * p;
    case DistKind::Deterministic:
      return a_;
  }
  return 0.0;
}

double Distribution::sample(RandomSource& rng) const {
  switch (kind_) {
    case DistKind::Exponential:
      return -std::log(rng.open01()) / a_;
    case DistKind::Weibull:
      return b_ * std::pow(-std::log(rng.open01()), 1.0 / a_);
    case DistKind::Uniform:
      return a_ + (b_ - a_) * rng.uniform01();
    case DistKind::Deterministic:
      return a_;
  }
  return 0.0;
}

double Distribution::support_lo() const {
  switch (kind_) {
    case DistKind::Exponential:
    case DistKind::Weibull: return 0.0;
    case DistKind::Uniform: return a_;
    case DistKind::Deterministic: return a_;
  }
  return 0.0;
}

double Distribution::support_hi() const {
  switch (kind_) {
    case DistKind::Exponential:
    case DistKind::Weibull: return kInf;
    case DistKind::Uniform: return b_;
    case DistKind::Deterministic: return a_;
  }
  return 0.0;
}

Distribution Distribution::scaled(double s) const {
  require(std::isfinite(s) && s > 0, "scaled: factor must be > 0");
  switch (kind_) {
    case DistKind::Exponential: return exponential(a_ / s);
    case DistKind::Weibull: return weibull(a_, b_ * s);
    case DistKind::Uniform: return uniform(a_ * s, b_ * s);
    case DistKind::Deterministic: return deterministic(a_ * s);
  }
  return *this;
}

double Distribution::rate() const {
  require(kind_ == DistKind::Exponential, "rate(): not exponential");
  return a_;
}
double Distribution::shape() const {
  require(kind_ == DistKind::Weibull, "shape(): not weibull");
  return a_;
}
double Distribution::scale() const {
  require(kind_ == DistKind::Weibull, "scale(): not weibull");
  return b_;
}
double Distribution::lo() const {
  require(kind_ == DistKind::Uniform, "lo(): not uniform");
  return a_;
}
double Distribution::hi() const {
  require(kind_ == DistKind::Uniform, "hi(): not uniform");
  return b_;
}
double Distribution::value() const {
  require(kind_ == DistKind::Deterministic, "value(): not deterministic");
  return a_;
}

std::string Distribution::describe() const {
  char buf[96];
  switch (kind_) {
    case DistKind::Exponential:
      std::snprintf(buf, sizeof buf, "exponential(rate=%.6g)", a_);
      break;
    case DistKind::Weibull:
      std::snprintf(buf, sizeof buf, "weibull(shape=%.6g,scale=%.6g)", a_, b_);
      break;
    case DistKind::Uniform:
      std::snprintf(buf, sizeof buf, "uniform(%.6g,%.6g)", a_, b_);
      break;
    case DistKind::Deterministic:
      std::snprintf(buf, sizeof buf, "deterministic(%.6g)", a_);
      break;
  }
  return buf;
}

}  // namespace qtrack
