#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "nlgp/error.hpp"
#include "nlgp/fft.hpp"

namespace nlgp {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

class PeriodicGrid {
public:
  PeriodicGrid(double period, std::size_t num_points) : period_(period), n_(num_points)
  {
    if (!(period > 0.0) || !std::isfinite(period))
      throw error(errc::invalid_argument, "grid period must be positive and finite");
    if (num_points < 4 || num_points % 2 != 0)
      throw error(errc::invalid_argument, "grid size must be even and at least 4");
  }

  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return period_ / static_cast<double>(n_); }
  double point(std::size_t m) const noexcept
  {
    return static_cast<double>(m) * period_ / static_cast<double>(n_);
  }
  std::vector<double> points() const
  {
    std::vector<double> x(n_);
    for (std::size_t m = 0; m < n_; ++m)
      x[m] = point(m);
    return x;
  }

  int min_mode() const noexcept { return -static_cast<int>(n_ / 2); }
  int max_mode() const noexcept { return static_cast<int>(n_ / 2) - 1; }

  // e_j(x) oscillates like exp(-i wavenumber(j) x)
  double wavenumber(int j) const noexcept { return 2.0 * pi * j / period_; }

  // storage slot of mode j in FFT order
  std::size_t slot(int j) const noexcept
  {
    return j >= 0 ? static_cast<std::size_t>(j) : static_cast<std::size_t>(j + static_cast<int>(n_));
  }
  int mode(std::size_t slot) const noexcept
  {
    return slot < n_ / 2 ? static_cast<int>(slot) : static_cast<int>(slot) - static_cast<int>(n_);
  }
  std::size_t nyquist_slot() const noexcept { return n_ / 2; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

private:
  double period_;
  std::size_t n_;
};

namespace spectral {

// c_j = (sqrt(T)/N) sum_m f_m exp(2 pi i j m / N), stored in FFT order.
inline void samples_to_coeffs(const PeriodicGrid& grid, std::span<const cplx> samples,
                              std::span<cplx> coeffs)
{
  fft::execute(samples, coeffs, fft::direction::backward);
  const double scale = std::sqrt(grid.period()) / static_cast<double>(grid.size());
  for (auto& c : coeffs)
    c *= scale;
}

// f_m = (1/sqrt(T)) sum_j c_j exp(-2 pi i j m / N)
inline void coeffs_to_samples(const PeriodicGrid& grid, std::span<const cplx> coeffs,
                              std::span<cplx> samples)
{
  fft::execute(coeffs, samples, fft::direction::forward);
  const double scale = 1.0 / std::sqrt(grid.period());
  for (auto& f : samples)
    f *= scale;
}

} // namespace spectral

// Coefficients on the orthonormal basis e_j(x) = exp(-2 pi i j x / T) / sqrt(T),
// j = -N/2 .. N/2-1.
class FourierCoefficients {
public:
  explicit FourierCoefficients(const PeriodicGrid& grid) : grid_(grid), values_(grid.size()) {}
  FourierCoefficients(const PeriodicGrid& grid, std::vector<cplx> fft_ordered)
      : grid_(grid), values_(std::move(fft_ordered))
  {
    if (values_.size() != grid_.size())
      throw error(errc::invalid_argument, "coefficient count does not match grid");
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  int min_mode() const noexcept { return grid_.min_mode(); }
  int max_mode() const noexcept { return grid_.max_mode(); }

  cplx operator[](int j) const { return values_[checked_slot(j)]; }
  cplx& operator[](int j) { return values_[checked_slot(j)]; }

  std::span<const cplx> fft_ordered() const noexcept { return values_; }
  std::span<cplx> fft_ordered() noexcept { return values_; }

private:
  std::size_t checked_slot(int j) const
  {
    if (j < min_mode() || j > max_mode())
      throw error(errc::invalid_argument, "mode index out of range");
    return grid_.slot(j);
  }

  PeriodicGrid grid_;
  std::vector<cplx> values_;
};

class WaveField {
public:
  WaveField(const PeriodicGrid& grid, std::vector<cplx> samples)
      : grid_(grid), samples_(std::move(samples)), coeffs_(grid)
  {
    if (samples_.size() != grid_.size())
      throw error(errc::invalid_argument, "sample count does not match grid");
    spectral::samples_to_coeffs(grid_, samples_, coeffs_.fft_ordered());
  }

  explicit WaveField(FourierCoefficients coeffs)
      : grid_(coeffs.grid()), samples_(coeffs.size()), coeffs_(std::move(coeffs))
  {
    spectral::coeffs_to_samples(grid_, coeffs_.fft_ordered(), samples_);
  }

  static WaveField zero(const PeriodicGrid& grid)
  {
    return WaveField(grid, std::vector<cplx>(grid.size()));
  }

  template <class F>
  static WaveField sample(const PeriodicGrid& grid, F&& f)
  {
    std::vector<cplx> s(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m)
      s[m] = cplx(f(grid.point(m)));
    return WaveField(grid, std::move(s));
  }

  static WaveField basis(const PeriodicGrid& grid, int j)
  {
    FourierCoefficients c(grid);
    c[j] = 1.0;
    return WaveField(std::move(c));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const cplx> samples() const noexcept { return samples_; }
  cplx operator[](std::size_t m) const { return samples_[m]; }
  const FourierCoefficients& coeffs() const noexcept { return coeffs_; }

  friend WaveField operator+(const WaveField& a, const WaveField& b)
  {
    return combine(a, b, [](cplx x, cplx y) { return x + y; });
  }
  friend WaveField operator-(const WaveField& a, const WaveField& b)
  {
    return combine(a, b, [](cplx x, cplx y) { return x - y; });
  }
  friend WaveField operator*(cplx s, const WaveField& a)
  {
    std::vector<cplx> out(a.samples_);
    for (auto& v : out)
      v *= s;
    return WaveField(a.grid_, std::move(out));
  }

private:
  template <class Op>
  static WaveField combine(const WaveField& a, const WaveField& b, Op op)
  {
    if (!(a.grid_ == b.grid_))
      throw error(errc::invalid_argument, "fields live on different grids");
    std::vector<cplx> out(a.size());
    for (std::size_t m = 0; m < out.size(); ++m)
      out[m] = op(a.samples_[m], b.samples_[m]);
    return WaveField(a.grid_, std::move(out));
  }

  PeriodicGrid grid_;
  std::vector<cplx> samples_;
  FourierCoefficients coeffs_;
};

inline FourierCoefficients to_coeffs(const WaveField& f) { return f.coeffs(); }
inline WaveField to_samples(const FourierCoefficients& c) { return WaveField(c); }

struct FilterSpec {
  double alpha = std::log(std::numeric_limits<double>::epsilon());
  int gamma = 4;

  void validate() const
  {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
      throw error(errc::invalid_argument, "filter alpha must be negative");
    if (gamma <= 0)
      throw error(errc::invalid_argument, "filter gamma must be positive");
  }

  // sigma(|j| / (N/2))
  double factor(int j, std::size_t n) const
  {
    const double x = std::abs(static_cast<double>(j)) / (static_cast<double>(n) / 2.0);
    return std::exp(alpha * std::pow(x, 2 * gamma));
  }
};

inline WaveField apply_filter(const WaveField& f, const FilterSpec& spec)
{
  spec.validate();
  FourierCoefficients c = f.coeffs();
  auto data = c.fft_ordered();
  const auto& grid = f.grid();
  for (std::size_t s = 0; s < data.size(); ++s)
    data[s] *= spec.factor(grid.mode(s), grid.size());
  return WaveField(std::move(c));
}

enum class NormKind { L2, Linf, Hs };

inline double l2_norm(const WaveField& f)
{
  double sum = 0.0;
  for (const auto& c : f.coeffs().fft_ordered())
    sum += std::norm(c);
  return std::sqrt(sum);
}

// grid functional: no sub-grid refinement
inline double linf_norm(const WaveField& f)
{
  double m = 0.0;
  for (const auto& v : f.samples())
    m = std::max(m, std::abs(v));
  return m;
}

inline double hs_norm(const WaveField& f, double s)
{
  if (!(s >= 0.0))
    throw error(errc::invalid_argument, "Sobolev index must be nonnegative");
  const auto& grid = f.grid();
  const auto data = f.coeffs().fft_ordered();
  const double T = grid.period();
  double sum = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double j = grid.mode(k);
    const double weight = 1.0 + 4.0 * pi * pi * j * j / (T * T);
    sum += std::pow(weight, s) * std::norm(data[k]);
  }
  return std::sqrt(sum);
}

inline double norm(const WaveField& f, NormKind kind, double s = 0.0)
{
  switch (kind) {
  case NormKind::L2: return l2_norm(f);
  case NormKind::Linf: return linf_norm(f);
  case NormKind::Hs: return hs_norm(f, s);
  }
  return 0.0;
}

// d^order/dx^order; the unmatched -N/2 mode is dropped for odd orders
inline WaveField derivative(const WaveField& f, int order = 1)
{
  if (order < 0)
    throw error(errc::invalid_argument, "derivative order must be nonnegative");
  const auto& grid = f.grid();
  FourierCoefficients c = f.coeffs();
  auto data = c.fft_ordered();
  for (std::size_t s = 0; s < data.size(); ++s) {
    const cplx symbol(0.0, -grid.wavenumber(grid.mode(s)));
    data[s] *= std::pow(symbol, order);
  }
  if (order % 2 == 1)
    data[grid.nyquist_slot()] = 0.0;
  return WaveField(std::move(c));
}

} // namespace nlgp
