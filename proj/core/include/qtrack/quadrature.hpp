#ifndef QTRACK_QUADRATURE_HPP
#define QTRACK_QUADRATURE_HPP

#include <cmath>
#include <functional>

namespace qtrack {

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a, b]. Non-finite endpoint evaluations are treated
// as 0 (integrands here vanish at such points).
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-10,
                               int max_depth = 48) {
  auto safe = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };
  std::function<double(double)> g = safe;
  const double m = 0.5 * (a + b);
  const double fa = safe(a), fb = safe(b), fm = safe(m);
  const double whole = detail::simpson(g, a, fa, b, fb, m, fm);
  return detail::adaptive_step(g, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace qtrack

#endif  // QTRACK_QUADRATURE_HPP
