#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nlgp::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (61 points); infinite limits go through Boost's variable map.
template <class F>
Result integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 18)
{
  Result r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      std::forward<F>(f), a, b, max_depth, tol, &r.error);
  return r;
}

// Gauss-Kronrod against an absolute error target, bisecting until each piece meets its share.
template <class F>
double integrate_abs(const F& f, double a, double b, double abs_tol, unsigned depth = 20)
{
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (err <= std::max(abs_tol, 64.0 * std::numeric_limits<double>::epsilon() * l1) || depth == 0)
    return v;
  const double m = 0.5 * (a + b);
  return integrate_abs(f, a, m, 0.5 * abs_tol, depth - 1) + integrate_abs(f, m, b, 0.5 * abs_tol, depth - 1);
}

// Smallest R >= 1 (doubling) with |f(x)| negligible beyond it, capped at r_max.
inline double effective_extent(const std::function<double(double)>& f, double r_max = 1e6)
{
  const double f0 = std::max({std::abs(f(0.0)), std::abs(f(0.5)), std::abs(f(1.0))});
  double r = 1.0;
  while (r < r_max) {
    const double tail = std::max(std::abs(f(r)), std::abs(f(1.5 * r)));
    if (tail <= 1e-18 * std::max(f0, std::numeric_limits<double>::min()))
      break;
    r *= 2.0;
  }
  return std::min(r, r_max);
}

// 2 * int_0^inf f(x) cos(s x) dx for even f. Compact support: Gauss-Kronrod panels holding
// a few periods each. Unbounded support: Ooura's double-exponential Fourier rule for s > 0.
inline double cosine_transform(const std::function<double(double)>& f, double s,
                               double support = std::numeric_limits<double>::infinity())
{
  s = std::abs(s);
  if (!std::isfinite(support)) {
    if (s == 0.0) {
      // tail through x = 1/t, where power-law decay becomes a weak endpoint singularity
      thread_local boost::math::quadrature::tanh_sinh<double> ts;
      const double tail = ts.integrate(
          [&](double t) {
            const double v = f(1.0 / t) / (t * t);
            return std::isfinite(v) ? v : 0.0;
          },
          0.0, 1.0);
      return 2.0 * (integrate(f, 0.0, 1.0).value + tail);
    }
    thread_local boost::math::quadrature::ooura_fourier_cos<double> rule;
    return 2.0 * rule.integrate(f, s).first;
  }
  const double width = s > 0.0 ? std::min(support, 8.0 * 3.141592653589793 / s) : support;
  const auto panels = static_cast<long>(std::min(20000.0, std::ceil(support / width)));
  const double h = support / static_cast<double>(panels);
  auto g = [&](double x) { return f(x) * std::cos(s * x); };
  const double mass = integrate([&](double x) { return std::abs(f(x)); }, 0.0, support).value;
  const double abs_tol = 1e-14 * std::max(mass, std::numeric_limits<double>::min());
  double sum = 0.0;
  for (long p = 0; p < panels; ++p)
    sum += integrate_abs(g, p * h, (p + 1) * h, abs_tol);
  return 2.0 * sum;
}

} // namespace nlgp::quad
