#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "nlgp/error.hpp"
#include "nlgp/kernels.hpp"
#include "nlgp/spectral.hpp"

namespace nlgp {

// Parameters of phi(x) = sqrt(B) cos(kx) + i sqrt(B+A) sin(kx) with V = V0 sin^2(kx).
struct SolutionParams {
  double B = 1.0;
  double V0 = 0.0;
  double k = 1.0;
  int alpha = 1;
  ScaledKernel kernel{KernelSpec::gaussian_normalized(), 0.0};

  double beta = 1.0;
  double A = 0.0;
  std::optional<double> D;
  double omega = 0.0;
  double kernel_mass = 1.0; // zhat(0)

  static SolutionParams make(double B, double V0, double k, int alpha, ScaledKernel kernel)
  {
    if (alpha != 1 && alpha != -1)
      throw error(errc::invalid_argument, "alpha must be +1 or -1");
    if (!(k > 0.0) || !std::isfinite(k))
      throw error(errc::invalid_argument, "wavenumber k must be positive");
    if (!std::isfinite(B) || !std::isfinite(V0))
      throw error(errc::invalid_argument, "B and V0 must be finite");

    SolutionParams p;
    p.B = B;
    p.V0 = V0;
    p.k = k;
    p.alpha = alpha;
    p.kernel = std::move(kernel);
    p.beta = nlgp::beta(p.kernel, k);
    p.kernel_mass = p.kernel.multiplier(0.0);
    if (!std::isfinite(p.beta) || (p.beta == 0.0 && V0 != 0.0))
      throw error(errc::beta_zero, "beta(k; eps) vanishes");
    p.A = V0 == 0.0 ? 0.0 : -V0 / (alpha * p.beta);
    if (!std::isfinite(p.A))
      throw error(errc::beta_zero, "A = -V0/(alpha beta) is not finite");

    const double floor = std::max(-p.A, 0.0);
    if (B < floor - 1e-14 * std::max(1.0, std::abs(p.A)))
      throw error(errc::offset_too_small,
                  "B = " + std::to_string(B) + " is below max(-A, 0) = " + std::to_string(floor));
    if (B > 0.0)
      p.D = std::sqrt(std::max(0.0, 1.0 + p.A / B));
    // R * |phi|^2 = zhat(0)(B + A/2) - (A beta / 2) cos(2kx); reduces to
    // (V0 + k^2)/2 + alpha B - V0/(2 beta) when zhat(0) = 1
    p.omega = 0.5 * k * k + alpha * (p.kernel_mass * (B + 0.5 * p.A) - 0.5 * p.A * p.beta);
    return p;
  }

  double cos_amplitude() const { return std::sqrt(B); }
  double sin_amplitude() const { return std::sqrt(std::max(0.0, B + A)); }

  // A for the unit-mass rescaling of the kernel (psi -> zhat(0)^{1/2} psi)
  double normalized_A() const { return A * kernel_mass; }

  double potential(double x) const
  {
    const double s = std::sin(k * x);
    return V0 * s * s;
  }
};

struct StationaryState {
  SolutionParams params;
  WaveField field;
};

inline void check_period(const PeriodicGrid& grid, double base_period, const char* what)
{
  const double ratio = grid.period() / base_period;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw error(errc::period_mismatch,
                std::string("grid period is not a multiple of ") + what);
}

// theta(x) with tan(theta) = sqrt(1 + A/B) tan(kx)
inline double solution_phase(const SolutionParams& p, double x)
{
  return std::atan2(p.sin_amplitude() * std::sin(p.k * x), p.cos_amplitude() * std::cos(p.k * x));
}

inline StationaryState build_solution(const SolutionParams& params, const PeriodicGrid& grid)
{
  check_period(grid, 2.0 * pi / params.k, "2 pi / k");
  const double a = params.cos_amplitude(), b = params.sin_amplitude();
  auto field = WaveField::sample(grid, [&](double x) {
    return cplx(a * std::cos(params.k * x), b * std::sin(params.k * x));
  });
  return {params, std::move(field)};
}

inline StationaryState build_solution(double B, double V0, double k, int alpha,
                                      const ScaledKernel& kernel, const PeriodicGrid& grid)
{
  return build_solution(SolutionParams::make(B, V0, k, alpha, kernel), grid);
}

// || -phi''/2 + alpha phi (R * |phi|^2) + V phi - omega phi ||_2, pseudo-spectral, no filter
inline double stationary_residual(const WaveField& phi, const SolutionParams& p, double omega)
{
  const auto& grid = phi.grid();
  const std::size_t n = grid.size();
  std::vector<cplx> rho(n);
  for (std::size_t m = 0; m < n; ++m)
    rho[m] = std::norm(phi[m]);
  const WaveField conv = convolve_periodic(p.kernel, WaveField(grid, std::move(rho)));
  const WaveField lap = derivative(phi, 2);
  std::vector<cplx> r(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double V = p.potential(grid.point(m));
    r[m] = -0.5 * lap[m] + (p.alpha * conv[m].real() + V - omega) * phi[m];
  }
  return l2_norm(WaveField(grid, std::move(r)));
}

inline double stationary_residual(const StationaryState& s)
{
  return stationary_residual(s.field, s.params, s.params.omega);
}

} // namespace nlgp
