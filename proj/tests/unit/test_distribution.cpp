#include <doctest.h>

#include <cmath>
#include <vector>

#include "qtrack/distribution.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/quadrature.hpp"
#include "qtrack/rng.hpp"

using namespace qtrack;

namespace {

double sample_mean(const Distribution& d, long n, std::uint64_t seed) {
  RandomSource rng(seed);
  double sum = 0;
  for (long i = 0; i < n; ++i) sum += d.sample(rng);
  return sum / n;
}

}  // namespace

TEST_CASE("deterministic samples are the point mass") {
  const auto d = Distribution::deterministic(1.0);
  RandomSource rng(42);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 1.0);
  CHECK(d.mean() == 1.0);
  CHECK(d.support_lo() == 1.0);
  CHECK(d.support_hi() == 1.0);
}

TEST_CASE("weibull shape 1 is exponential: sample mean over 1e6 draws") {
  const double m = sample_mean(Distribution::weibull(1.0, 1.0), 1000000, 7);
  CHECK(m == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform(0,2) sample mean over 1e6 draws") {
  const double m = sample_mean(Distribution::uniform(0.0, 2.0), 1000000, 8);
  CHECK(m == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("pdf values") {
  // Weibull density at x=1 for shape 2, scale 1: 2*exp(-1).
  CHECK(Distribution::weibull(2.0, 1.0).pdf(1.0) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(Distribution::exponential(1.0).pdf(0.0) == 1.0);
  CHECK(Distribution::uniform(0.0, 2.0).pdf(3.0) == 0.0);
  CHECK(Distribution::uniform(0.0, 2.0).pdf(1.0) == 0.5);
  CHECK_THROWS_AS(Distribution::deterministic(1.0).pdf(1.0),
                  DensityUndefinedError);
}

TEST_CASE("ccdf values") {
  CHECK(Distribution::exponential(2.0).ccdf(1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  const auto det = Distribution::deterministic(1.0);
  CHECK(det.ccdf(0.5) == 1.0);
  CHECK(det.ccdf(1.5) == 0.0);
  CHECK(det.ccdf(1.0) == 0.0);
  CHECK(Distribution::weibull(2.0, 1.0).ccdf(1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("ccdf endpoints and monotonicity") {
  const std::vector<Distribution> catalog{
      Distribution::exponential(1.3), Distribution::weibull(0.7, 2.0),
      Distribution::uniform(0.5, 2.5), Distribution::deterministic(1.7)};
  for (const auto& d : catalog) {
    CHECK(d.ccdf(d.support_lo() - 1e-6) == 1.0);
    if (std::isfinite(d.support_hi())) CHECK(d.ccdf(d.support_hi()) == 0.0);
    double prev = 1.0;
    for (double x = 0.0; x < 6.0; x += 0.01) {
      const double c = d.ccdf(x);
      CHECK(c <= prev + 1e-15);
      prev = c;
    }
  }
}

TEST_CASE("means: closed forms and a sampled cross-check") {
  CHECK(Distribution::exponential(2.0).mean() == 0.5);
  CHECK(Distribution::deterministic(3.0).mean() == 3.0);
  // Weibull mean c*Gamma(1+1/w); for w=2, c=1 that is Gamma(1.5).
  const double expected = std::tgamma(1.5);
  CHECK(Distribution::weibull(2.0, 1.0).mean() ==
        doctest::Approx(expected).epsilon(1e-12));
  const double sampled = sample_mean(Distribution::weibull(2.0, 1.0), 1000000, 9);
  CHECK(sampled == doctest::Approx(expected).epsilon(0.005));
}

TEST_CASE("mean matches sample mean within 3 standard errors") {
  const long n = 1000000;
  int stream = 100;
  for (const auto& d :
       {Distribution::exponential(0.7), Distribution::weibull(1.5, 2.0),
        Distribution::weibull(0.5, 1.0), Distribution::uniform(1.0, 4.0)}) {
    const double m = sample_mean(d, n, stream++);
    const double se = std::sqrt(d.variance() / n);
    CHECK(std::fabs(m - d.mean()) <= 3.0 * se);
  }
}

TEST_CASE("pdf integrates to cdf differences and to one") {
  int idx = 0;
  for (const auto& d :
       {Distribution::exponential(1.0), Distribution::weibull(2.0, 1.0),
        Distribution::weibull(0.5, 1.0), Distribution::uniform(0.5, 2.0)}) {
    ++idx;
    CAPTURE(idx);
    // Piecewise check of d/dx cdf = pdf on the bulk of the support.
    const double x0 = d.quantile(0.05), x1 = d.quantile(0.5),
                 x2 = d.quantile(0.95);
    const double seg1 =
        adaptive_simpson([&](double x) { return d.pdf(x); }, x0, x1, 1e-10);
    const double seg2 =
        adaptive_simpson([&](double x) { return d.pdf(x); }, x1, x2, 1e-10);
    CHECK(seg1 == doctest::Approx(d.cdf(x1) - d.cdf(x0)).epsilon(1e-7));
    CHECK(seg2 == doctest::Approx(d.cdf(x2) - d.cdf(x1)).epsilon(1e-7));
    // Total mass: substitute x = u^4 so the heavy-tail density's origin
    // singularity becomes a smooth integrand, then add the analytic tail.
    const double hi = d.quantile(1.0 - 1e-10);
    const double bulk = adaptive_simpson(
        [&](double u) { return d.pdf(u * u * u * u) * 4.0 * u * u * u; }, 0.0,
        std::pow(hi, 0.25), 1e-10);
    const double total = bulk + d.ccdf(hi);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("empirical ccdf stays inside the DKW band at 99% confidence") {
  const long n = 100000;
  const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  int stream = 500;
  for (const auto& d :
       {Distribution::exponential(1.0), Distribution::weibull(1.5, 1.0),
        Distribution::weibull(0.5, 1.0), Distribution::uniform(0.0, 2.0),
        Distribution::deterministic(1.0)}) {
    RandomSource rng(stream++);
    std::vector<double> samples(n);
    for (auto& s : samples) s = d.sample(rng);
    std::sort(samples.begin(), samples.end());
    // Evaluate the empirical ccdf at a grid of quantiles.
    for (int k = 1; k < 40; ++k) {
      const double x = d.quantile(k / 40.0);
      const auto it = std::upper_bound(samples.begin(), samples.end(), x);
      const double emp = static_cast<double>(samples.end() - it) / n;
      CHECK(std::fabs(emp - d.ccdf(x)) <= band);
    }
  }
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const auto d = Distribution::weibull(1.5, 2.0);
  RandomSource a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(d.sample(a) == d.sample(b));
}

TEST_CASE("scaled laws") {
  const auto d = Distribution::uniform(1.0, 3.0).scaled(2.0);
  CHECK(d.lo() == 2.0);
  CHECK(d.hi() == 6.0);
  const auto e = Distribution::exponential(2.0).scaled(0.5);
  CHECK(e.mean() == doctest::Approx(0.25));
  const auto w = Distribution::weibull(2.0, 1.0).scaled(3.0);
  CHECK(w.shape() == 2.0);
  CHECK(w.scale() == 3.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(Distribution::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::weibull(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::deterministic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::uniform(-1.0, 1.0), std::invalid_argument);
}
