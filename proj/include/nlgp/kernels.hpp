#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlgp/error.hpp"
#include "nlgp/quadrature.hpp"
#include "nlgp/spectral.hpp"

namespace nlgp {

enum class KernelFamily { gaussian_normalized, gaussian_raw, algebraic_decay, custom };

// Even interaction kernel zeta and its transform zhat(s) = int zeta(x) exp(-i s x) dx.
class KernelSpec {
public:
  static KernelSpec gaussian_normalized()
  {
    Impl k;
    k.family = KernelFamily::gaussian_normalized;
    k.name = "gaussian-normalized";
    k.zeta = [](double x) { return std::exp(-x * x) / std::sqrt(pi); };
    k.zeta_hat = [](double s) { return std::exp(-s * s / 4.0); };
    k.l1 = 1.0;
    k.first_moment = 1.0 / std::sqrt(pi);
    k.analytic_hat = true;
    return KernelSpec(std::move(k));
  }

  // e^{-x^2} as written for the reference simulations: mass sqrt(pi)
  static KernelSpec gaussian_raw()
  {
    Impl k;
    k.family = KernelFamily::gaussian_raw;
    k.name = "gaussian-raw";
    k.zeta = [](double x) { return std::exp(-x * x); };
    k.zeta_hat = [](double s) { return std::sqrt(pi) * std::exp(-s * s / 4.0); };
    k.l1 = std::sqrt(pi);
    k.first_moment = 1.0;
    k.analytic_hat = true;
    return KernelSpec(std::move(k));
  }

  // c_p (1 + x^2)^{-p/2}, unit mass; zhat = 2 (|s|/2)^nu K_nu(|s|) / Gamma(nu), nu = (p-1)/2
  static KernelSpec algebraic_decay(double p)
  {
    if (!(p > 1.0) || !std::isfinite(p))
      throw error(errc::invalid_argument, "algebraic kernel needs exponent p > 1");
    const double nu = 0.5 * (p - 1.0);
    const double c = std::tgamma(0.5 * p) / (std::sqrt(pi) * std::tgamma(nu));
    Impl k;
    k.family = KernelFamily::algebraic_decay;
    k.name = "algebraic:" + format_number(p);
    k.parameter = p;
    k.zeta = [c, p](double x) { return c * std::pow(1.0 + x * x, -0.5 * p); };
    const double lgnu = std::lgamma(nu);
    k.zeta_hat = [nu, lgnu](double s) {
      const double a = std::abs(s);
      if (a < 1e-12)
        return 1.0;
      if (a > 700.0)
        return 0.0;
      const double kv = std::cyl_bessel_k(nu, a);
      return 2.0 * std::exp(nu * std::log(0.5 * a) - lgnu) * kv;
    };
    k.l1 = 1.0;
    k.first_moment = p > 2.0 ? 2.0 * c / (p - 2.0) : std::numeric_limits<double>::infinity();
    k.analytic_hat = true;
    return KernelSpec(std::move(k));
  }

  // User kernel given in physical space; zhat by quadrature unless supplied.
  static KernelSpec custom(std::string label, std::function<double(double)> zeta,
                           double support_radius = std::numeric_limits<double>::infinity(),
                           std::function<double(double)> zeta_hat = {})
  {
    if (!zeta)
      throw error(errc::invalid_argument, "custom kernel needs zeta");
    Impl k;
    k.family = KernelFamily::custom;
    k.name = "custom:" + label;
    k.support = support_radius;
    k.zeta = zeta;
    if (zeta_hat) {
      k.zeta_hat = std::move(zeta_hat);
      k.analytic_hat = true;
    } else {
      k.zeta_hat = [zeta, support_radius](double s) {
        return quad::cosine_transform(zeta, s, support_radius);
      };
    }
    const double extent = std::isfinite(support_radius) ? support_radius
                                                       : quad::effective_extent(zeta);
    auto abs_zeta = [&](double x) { return std::abs(zeta(x)); };
    auto x_zeta = [&](double x) { return x * std::abs(zeta(x)); };
    k.l1 = 2.0 * quad::integrate(abs_zeta, 0.0, extent).value;
    if (extent < 1e6) {
      k.first_moment = 2.0 * quad::integrate(x_zeta, 0.0, extent).value;
    } else {
      const auto r = quad::integrate(x_zeta, 0.0, std::numeric_limits<double>::infinity());
      k.first_moment = (std::isfinite(r.value) && r.error < 1e-6 * std::abs(r.value))
                           ? 2.0 * r.value
                           : std::numeric_limits<double>::infinity();
    }
    return KernelSpec(std::move(k));
  }

  // zeta(x) = exp(-1/(1-x^2)) on |x| < 1, normalized; its transform changes sign.
  static KernelSpec smooth_bump()
  {
    auto raw = [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
    const double mass = 2.0 * quad::integrate(raw, 0.0, 1.0).value;
    return custom(
        "bump", [raw, mass](double x) { return raw(x) / mass; }, 1.0);
  }

  // Tabulated (s, zhat(s)) for s >= 0, linear in between, zero past the last node.
  // zeta follows from the exact inverse cosine transform of the interpolant.
  static KernelSpec tabulated(std::string label, std::vector<std::pair<double, double>> table)
  {
    if (table.size() < 2)
      throw error(errc::invalid_argument, "kernel table needs at least two rows");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!std::isfinite(table[i].first) || !std::isfinite(table[i].second) || table[i].first < 0.0)
        throw error(errc::invalid_argument, "kernel table entries must be finite with s >= 0");
      if (i > 0 && !(table[i].first > table[i - 1].first))
        throw error(errc::invalid_argument, "kernel table abscissae must increase");
    }
    if (table.front().first > 0.0)
      table.insert(table.begin(), {0.0, table.front().second});
    auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(table));
    Impl k;
    k.family = KernelFamily::custom;
    k.name = "custom:" + label;
    k.analytic_hat = true;
    k.tabulated = true;
    k.zeta_hat = [shared](double s) { return interpolate(*shared, std::abs(s)); };
    k.zeta = [shared](double x) { return inverse_cosine(*shared, x); };
    k.l1 = shared->front().second;
    k.first_moment = std::numeric_limits<double>::infinity();
    return KernelSpec(std::move(k));
  }

  static KernelSpec from_csv(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in)
      throw error(errc::io, "cannot open kernel table " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      double s, v;
      if (!(ss >> s))
        continue; // header or blank
      if (!(ss >> v))
        throw error(errc::config, "kernel table row needs two columns: " + line);
      rows.emplace_back(s, v);
    }
    return tabulated(path.string(), std::move(rows));
  }

  static KernelSpec parse(std::string_view spec)
  {
    if (spec == "gaussian-normalized")
      return gaussian_normalized();
    if (spec == "gaussian-raw")
      return gaussian_raw();
    if (spec.starts_with("algebraic:")) {
      const std::string arg(spec.substr(10));
      std::size_t used = 0;
      double p = 0.0;
      try {
        p = std::stod(arg, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != arg.size())
        throw error(errc::config, "bad algebraic exponent '" + arg + "'");
      return algebraic_decay(p);
    }
    if (spec.starts_with("custom:"))
      return from_csv(std::filesystem::path(std::string(spec.substr(7))));
    throw error(errc::config, "unknown kernel '" + std::string(spec) + "'");
  }

  KernelFamily family() const noexcept { return impl_->family; }
  const std::string& name() const noexcept { return impl_->name; }
  double parameter() const noexcept { return impl_->parameter; }
  double zeta(double x) const { return impl_->zeta(x); }
  double zeta_hat(double s) const { return impl_->zeta_hat(s); }
  double l1_norm() const noexcept { return impl_->l1; }
  // || x zeta ||_1, infinite when not integrable
  double first_moment() const noexcept { return impl_->first_moment; }
  double support_radius() const noexcept { return impl_->support; }
  bool zeta_hat_is_closed_form() const noexcept { return impl_->analytic_hat; }
  bool is_tabulated() const noexcept { return impl_->tabulated; }

  // quadrature route for zhat regardless of any closed form
  double zeta_hat_quadrature(double s) const
  {
    return quad::cosine_transform(impl_->zeta, s, impl_->support);
  }

  friend bool operator==(const KernelSpec& a, const KernelSpec& b)
  {
    return a.impl_ == b.impl_ || a.name() == b.name();
  }

private:
  struct Impl {
    KernelFamily family = KernelFamily::custom;
    std::string name;
    double parameter = 0.0;
    std::function<double(double)> zeta;
    std::function<double(double)> zeta_hat;
    double l1 = 1.0;
    double first_moment = 0.0;
    double support = std::numeric_limits<double>::infinity();
    bool analytic_hat = false;
    bool tabulated = false;
  };

  explicit KernelSpec(Impl impl) : impl_(std::make_shared<const Impl>(std::move(impl))) {}

  static std::string format_number(double v)
  {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

  static double interpolate(const std::vector<std::pair<double, double>>& t, double s)
  {
    if (s > t.back().first)
      return 0.0;
    auto it = std::upper_bound(t.begin(), t.end(), s,
                               [](double v, const auto& row) { return v < row.first; });
    if (it == t.begin())
      return t.front().second;
    if (it == t.end())
      return t.back().second;
    const auto& [s1, v1] = *it;
    const auto& [s0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (s - s0) / (s1 - s0);
  }

  // (1/pi) int_0^smax zhat(s) cos(s x) ds, segment by segment
  static double inverse_cosine(const std::vector<std::pair<double, double>>& t, double x)
  {
    x = std::abs(x);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const auto [a, va] = t[i];
      const auto [b, vb] = t[i + 1];
      const double q = (vb - va) / (b - a);
      const double p = va - q * a;
      if (x * (b - a) <= 1.0) {
        auto f = [&](double s) { return (p + q * s) * std::cos(s * x); };
        sum += boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
      } else {
        auto F = [&](double s) {
          return (p + q * s) * std::sin(s * x) / x + q * std::cos(s * x) / (x * x);
        };
        sum += F(b) - F(a);
      }
    }
    return sum / pi;
  }

  std::shared_ptr<const Impl> impl_;
};

// R(x; eps) = zeta(x/eps)/eps, acting through its multiplier zhat(eps s).
class ScaledKernel {
public:
  ScaledKernel(KernelSpec base, double epsilon) : base_(std::move(base)), epsilon_(epsilon)
  {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
      throw error(errc::invalid_argument, "nonlocality parameter must be nonnegative");
  }

  const KernelSpec& base() const noexcept { return base_; }
  double epsilon() const noexcept { return epsilon_; }
  double multiplier(double s) const { return base_.zeta_hat(epsilon_ * s); }

private:
  KernelSpec base_;
  double epsilon_;
};

inline double multiplier(const ScaledKernel& kern, double s) { return kern.multiplier(s); }

inline WaveField convolve_periodic(const ScaledKernel& kern, const WaveField& f)
{
  const auto& grid = f.grid();
  FourierCoefficients c = f.coeffs();
  auto data = c.fft_ordered();
  for (std::size_t s = 0; s < data.size(); ++s)
    data[s] *= kern.multiplier(grid.wavenumber(grid.mode(s)));
  return WaveField(std::move(c));
}

inline double beta(const ScaledKernel& kern, double k)
{
  if (!(k > 0.0))
    throw error(errc::invalid_argument, "wavenumber k must be positive");
  return kern.multiplier(2.0 * k);
}

inline double lipschitz_gap(const ScaledKernel& a, const ScaledKernel& b, double s)
{
  if (!(a.base() == b.base()))
    throw error(errc::mismatched_kernel, a.base().name() + " vs " + b.base().name());
  return std::abs(a.multiplier(s) - b.multiplier(s));
}

enum class HypothesisSet { H, Hprime };

struct HypothesisCheck {
  std::string id;
  std::string description;
  bool passed = false;
  double measured = 0.0;
};

struct ValidationReport {
  std::string kernel;
  HypothesisSet set = HypothesisSet::H;
  std::vector<HypothesisCheck> checks;

  bool all_passed() const
  {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const HypothesisCheck* find(std::string_view id) const
  {
    for (const auto& c : checks)
      if (c.id == id)
        return &c;
    return nullptr;
  }
};

namespace kernel_checks {

inline std::vector<double> logspace(double lo, double hi, int n)
{
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return v;
}

// least-squares slope of log y against log x over the positive samples
inline std::pair<double, int> loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > std::numeric_limits<double>::min()))
      continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n < 2)
    return {-std::numeric_limits<double>::infinity(), n};
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, n};
}

inline double lattice_extent(const KernelSpec& k)
{
  return std::min(20.0, k.support_radius());
}

inline HypothesisCheck nonnegative(const KernelSpec& k, std::string id)
{
  const double X = lattice_extent(k);
  double peak = 0.0, worst = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double z = k.zeta(X * i / 2000.0);
    peak = std::max(peak, std::abs(z));
    worst = std::min(worst, z);
  }
  return {std::move(id), "zeta(x) >= 0 on the sampling lattice",
          worst >= -1e-14 * std::max(peak, 1.0), worst};
}

inline HypothesisCheck even(const KernelSpec& k, std::string id)
{
  const double X = lattice_extent(k);
  double peak = 0.0, gap = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = X * i / 2000.0;
    const double a = k.zeta(x), b = k.zeta(-x);
    peak = std::max(peak, std::abs(a));
    gap = std::max(gap, std::abs(a - b));
  }
  return {std::move(id), "zeta(x) = zeta(-x) on the sampling lattice",
          gap <= 1e-12 * std::max(peak, 1.0), gap};
}

inline double total_mass(const KernelSpec& k)
{
  if (k.is_tabulated())
    return k.zeta_hat(0.0); // int zeta = zhat(0) exactly for the interpolant
  return k.zeta_hat_quadrature(0.0);
}

inline HypothesisCheck unit_mass(const KernelSpec& k, std::string id)
{
  const double m = total_mass(k);
  return {std::move(id), "int zeta dx = 1", std::abs(m - 1.0) <= 1e-8, m};
}

inline HypothesisCheck first_moment(const KernelSpec& k, std::string id)
{
  const auto x = logspace(1e2, 1e4, 17);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] * std::abs(k.zeta(x[i]));
  const auto [slope, used] = loglog_slope(x, y);
  // fewer than two representable samples: faster than any power
  const bool ok = used < 2 || slope < -1.0 - 1e-3;
  return {std::move(id), "x zeta(x) integrable (tail slope of |x zeta| below -1)", ok, slope};
}

inline HypothesisCheck decay_envelope(const KernelSpec& k, std::string id)
{
  const auto s = logspace(1.0, 1e3, 33);
  std::vector<double> y(s.size()), x1(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = std::abs(k.zeta_hat(s[i]));
    x1[i] = 1.0 + s[i];
  }
  const auto [slope, used] = loglog_slope(x1, y);
  const double exponent = used < 2 ? std::numeric_limits<double>::infinity() : -slope;
  return {std::move(id), "|zhat(s)| decays faster than (1+|s|)^(-1/2)", exponent > 0.5 + 1e-3,
          exponent};
}

inline HypothesisCheck positive_transform(const KernelSpec& k, std::string id)
{
  const double z0 = std::abs(k.zeta_hat(0.0));
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i)
    worst = std::min(worst, k.zeta_hat(50.0 * i / 2000.0));
  // values within roundoff of zero are underflow, not sign changes
  return {std::move(id), "zhat(s) > 0", worst > -1e-14 * std::max(z0, 1.0) && k.zeta_hat(0.0) > 0.0,
          worst};
}

} // namespace kernel_checks

inline ValidationReport validate_hypotheses(const ScaledKernel& kern, HypothesisSet which)
{
  using namespace kernel_checks;
  const KernelSpec& k = kern.base();
  ValidationReport r;
  r.kernel = k.name();
  r.set = which;
  if (which == HypothesisSet::H) {
    r.checks.push_back(nonnegative(k, "H2"));
    r.checks.push_back(unit_mass(k, "H3"));
    r.checks.push_back(first_moment(k, "H4"));
    r.checks.push_back(decay_envelope(k, "H5"));
  } else {
    auto nn = nonnegative(k, "H2'");
    auto ev = even(k, "H2'");
    auto um = unit_mass(k, "H2'");
    HypothesisCheck h2p{"H2'", "zeta >= 0, even, unit mass", nn.passed && ev.passed && um.passed,
                        um.measured};
    r.checks.push_back(h2p);
    r.checks.push_back(positive_transform(k, "H3'"));
    r.checks.push_back(decay_envelope(k, "H4'"));
  }
  return r;
}

} // namespace nlgp
