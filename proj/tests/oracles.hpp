#pragma once

// Reference computations for the tests. Nothing here calls into the library's
// transform, quadrature or eigen code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// c_j = int_0^T f(x) conj(e_j(x)) dx with e_j = exp(-2 pi i j x / T)/sqrt(T),
// rectangle rule on the uniform grid, O(N^2)
inline cplx dft_coefficient(const std::vector<cplx>& samples, double T, int j)
{
  const auto n = samples.size();
  cplx sum = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double x = T * static_cast<double>(m) / static_cast<double>(n);
    sum += samples[m] * std::polar(1.0, 2.0 * pi * j * x / T);
  }
  return sum * std::sqrt(T) / static_cast<double>(n);
}

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(fa) + std::abs(fm) + std::abs(fb)) * (b - a);
  if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, noise))
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// adaptive Simpson with Richardson correction
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-13, int depth = 30)
{
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// int f over [a, b] in equal panels, each by adaptive Simpson
inline double simpson_panels(const std::function<double(double)>& f, double a, double b, int panels,
                             double tol = 1e-14)
{
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    sum += simpson(f, a + p * h, a + (p + 1) * h, tol / panels);
  return sum;
}

// zhat(s) = int zeta(x) cos(s x) dx for a kernel negligible beyond |x| > cut
inline double cosine_transform(const std::function<double(double)>& zeta, double s, double cut)
{
  const int panels = 8 + static_cast<int>(std::ceil(std::abs(s) * cut / pi));
  return 2.0 * simpson_panels([&](double x) { return zeta(x) * std::cos(s * x); }, 0.0, cut, panels);
}

// Plane wave sqrt(B) e^{ikx} with V = 0, alpha = 1: perturbations at wavenumber k s
// (s = m - mu) decouple into 2x2 blocks with
//   lambda = i k^2 s +- (i/2) k |s| sqrt(k^2 s^2 + 4 B rhat(k s)).
inline std::vector<cplx> plane_wave_pair(double k, double B, double s, double rhat)
{
  const double disc = k * k * s * s + 4.0 * B * rhat;
  const cplx i(0.0, 1.0);
  const cplx drift = i * k * k * s;
  if (disc >= 0.0) {
    const double w = 0.5 * k * std::abs(s) * std::sqrt(disc);
    return {drift + i * w, drift - i * w};
  }
  const double w = 0.5 * k * std::abs(s) * std::sqrt(-disc);
  return {drift + w, drift - w};
}

// centred fourth-order difference
inline double fd_derivative(const std::function<double(double)>& f, double x, double h = 1e-3)
{
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline std::vector<cplx> random_band_limited(std::size_t n, double T, int band, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> amp(2 * band + 1);
  for (auto& a : amp)
    a = cplx(g(rng), g(rng));
  std::vector<cplx> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = T * static_cast<double>(m) / static_cast<double>(n);
    for (int j = -band; j <= band; ++j)
      out[m] += amp[j + band] * std::polar(1.0, 2.0 * pi * j * x / T);
  }
  return out;
}

} // namespace oracle
