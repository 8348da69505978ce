#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "nlgp/error.hpp"
#include "nlgp/exact_solution.hpp"
#include "nlgp/kernels.hpp"
#include "nlgp/spectral.hpp"

namespace nlgp {

struct SineSquaredPotential {
  double V0 = 0.0;
  double k = 1.0;
};

// potential sampled on the evolution grid
struct TabulatedPotential {
  std::vector<double> values;
};

using Potential = std::variant<SineSquaredPotential, TabulatedPotential>;

struct LocalInteraction {};
using Interaction = std::variant<LocalInteraction, ScaledKernel>;

struct AdaptiveRK45 {
  double rtol = 1e-10;
  double atol = 1e-10;
};

struct FixedRK4 {
  double dt = 1e-3;
};

using Stepper = std::variant<AdaptiveRK45, FixedRK4>;

// where the spectral filter acts: on the pointwise product term of each RHS call, or nowhere
enum class FilterPlacement { per_rhs, off };

struct EvolutionConfig {
  PeriodicGrid grid;
  Interaction interaction = LocalInteraction{};
  Potential potential = SineSquaredPotential{};
  int alpha = 1;
  double time_horizon = 30.0;
  Stepper stepper = AdaptiveRK45{};
  FilterSpec filter{};
  FilterPlacement filter_placement = FilterPlacement::per_rhs;
  double record_every = 0.1;
  bool integrating_factor = false;

  void validate() const
  {
    if (alpha != 1 && alpha != -1)
      throw error(errc::invalid_argument, "alpha must be +1 or -1");
    if (!(time_horizon > 0.0) || !std::isfinite(time_horizon))
      throw error(errc::invalid_argument, "time horizon must be positive");
    if (!(record_every > 0.0) || !std::isfinite(record_every))
      throw error(errc::invalid_argument, "record interval must be positive");
    if (const auto* a = std::get_if<AdaptiveRK45>(&stepper)) {
      if (!(a->rtol > 0.0) || !(a->atol > 0.0))
        throw error(errc::invalid_argument, "rtol and atol must be positive");
    } else if (!(std::get<FixedRK4>(stepper).dt > 0.0)) {
      throw error(errc::invalid_argument, "time step must be positive");
    }
    filter.validate();
    if (const auto* v = std::get_if<SineSquaredPotential>(&potential)) {
      if (!(v->k > 0.0))
        throw error(errc::invalid_argument, "potential wavenumber must be positive");
      if (v->V0 != 0.0)
        check_period(grid, pi / v->k, "the potential period pi / k");
    } else {
      const auto& t = std::get<TabulatedPotential>(potential);
      if (t.values.size() != grid.size())
        throw error(errc::invalid_argument, "tabulated potential does not match the grid");
      for (double v : t.values)
        if (!std::isfinite(v))
          throw error(errc::invalid_argument, "tabulated potential has non-finite values");
    }
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WaveField> states;
  std::vector<double> mass;
  std::vector<double> energy;

  double mass_drift() const { return relative_drift(mass); }
  double energy_drift() const { return relative_drift(energy); }

private:
  static double relative_drift(const std::vector<double>& q)
  {
    if (q.empty())
      return 0.0;
    double worst = 0.0;
    for (double v : q)
      worst = std::max(worst, std::abs(v - q.front()));
    return q.front() != 0.0 ? worst / std::abs(q.front()) : worst;
  }
};

// Carries the trajectory recorded before a non-finite value appeared.
class BlowUp : public error {
public:
  BlowUp(double t, Trajectory partial)
      : error(errc::non_finite, "non-finite field at t = " + std::to_string(t)), time(t),
        partial(std::move(partial))
  {}
  double time;
  Trajectory partial;
};

struct Conserved {
  double mass = 0.0;
  double energy = 0.0;
};

namespace detail {

using state_type = std::vector<cplx>;

// Right-hand side on coefficients (FFT order):
// dc/dt = -i [ kappa^2/2 c + sigma * F(alpha psi (R * |psi|^2) + V psi) ]
class GpOperator {
public:
  explicit GpOperator(const EvolutionConfig& cfg)
      : grid_(cfg.grid), alpha_(cfg.alpha), n_(cfg.grid.size()), kinetic_(n_), sigma_(n_, 1.0),
        potential_(n_), psi_(n_), work_(n_), prod_(n_)
  {
    for (std::size_t s = 0; s < n_; ++s) {
      const double kappa = grid_.wavenumber(grid_.mode(s));
      kinetic_[s] = 0.5 * kappa * kappa;
      if (cfg.filter_placement == FilterPlacement::per_rhs)
        sigma_[s] = cfg.filter.factor(grid_.mode(s), n_);
    }
    sigma_[grid_.nyquist_slot()] = 0.0;
    if (const auto* kern = std::get_if<ScaledKernel>(&cfg.interaction)) {
      multiplier_.resize(n_);
      for (std::size_t s = 0; s < n_; ++s)
        multiplier_[s] = kern->multiplier(grid_.wavenumber(grid_.mode(s)));
    }
    if (const auto* v = std::get_if<SineSquaredPotential>(&cfg.potential)) {
      for (std::size_t m = 0; m < n_; ++m) {
        const double s = std::sin(v->k * grid_.point(m));
        potential_[m] = v->V0 * s * s;
      }
    } else {
      potential_ = std::get<TabulatedPotential>(cfg.potential).values;
    }
  }

  std::size_t size() const noexcept { return n_; }
  const std::vector<double>& kinetic() const noexcept { return kinetic_; }

  void operator()(const state_type& c, state_type& dcdt)
  {
    spectral::coeffs_to_samples(grid_, c, psi_);
    interaction_field(psi_);
    for (std::size_t m = 0; m < n_; ++m)
      prod_[m] = (alpha_ * work_[m].real() + potential_[m]) * psi_[m];
    spectral::samples_to_coeffs(grid_, prod_, work_);
    const cplx minus_i(0.0, -1.0);
    for (std::size_t s = 0; s < n_; ++s)
      dcdt[s] = minus_i * (kinetic_[s] * c[s] + sigma_[s] * work_[s]);
    dcdt[grid_.nyquist_slot()] = 0.0;
  }

  Conserved conserved(std::span<const cplx> c)
  {
    Conserved q;
    double kin = 0.0;
    for (std::size_t s = 0; s < n_; ++s) {
      q.mass += std::norm(c[s]);
      kin += 2.0 * kinetic_[s] * std::norm(c[s]);
    }
    spectral::coeffs_to_samples(grid_, c, psi_);
    interaction_field(psi_);
    double pot = 0.0, inter = 0.0;
    for (std::size_t m = 0; m < n_; ++m) {
      const double rho = std::norm(psi_[m]);
      pot += potential_[m] * rho;
      inter += rho * work_[m].real();
    }
    const double h = grid_.spacing();
    q.energy = 0.5 * (kin + 2.0 * h * pot + alpha_ * h * inter);
    return q;
  }

private:
  // work_ <- R * |psi|^2 (or |psi|^2 in the local model)
  void interaction_field(const std::vector<cplx>& psi)
  {
    for (std::size_t m = 0; m < n_; ++m)
      prod_[m] = std::norm(psi[m]);
    if (multiplier_.empty()) {
      work_ = prod_;
      return;
    }
    spectral::samples_to_coeffs(grid_, prod_, work_);
    for (std::size_t s = 0; s < n_; ++s)
      work_[s] *= multiplier_[s];
    spectral::coeffs_to_samples(grid_, work_, prod_);
    work_ = prod_;
  }

  PeriodicGrid grid_;
  int alpha_;
  std::size_t n_;
  std::vector<double> kinetic_;
  std::vector<double> sigma_;
  std::vector<double> multiplier_;
  std::vector<double> potential_;
  state_type psi_, work_, prod_;
};

inline bool all_finite(const state_type& c)
{
  return std::all_of(c.begin(), c.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

inline std::vector<double> record_times(double horizon, double every)
{
  std::vector<double> t;
  const auto steps = static_cast<long>(std::floor(horizon / every + 1e-9));
  for (long i = 0; i <= steps; ++i)
    t.push_back(std::min(horizon, i * every));
  if (horizon - t.back() > 1e-12 * horizon)
    t.push_back(horizon);
  return t;
}

} // namespace detail

inline WaveField rhs(const WaveField& psi, const EvolutionConfig& cfg)
{
  if (!(psi.grid() == cfg.grid))
    throw error(errc::invalid_argument, "field is not on the configured grid");
  detail::GpOperator op(cfg);
  const auto c = psi.coeffs().fft_ordered();
  detail::state_type in(c.begin(), c.end()), out(in.size());
  op(in, out);
  return WaveField(FourierCoefficients(cfg.grid, std::move(out)));
}

inline Conserved conserved_quantities(const WaveField& psi, const EvolutionConfig& cfg)
{
  detail::GpOperator op(cfg);
  return op.conserved(psi.coeffs().fft_ordered());
}

inline Trajectory evolve(const WaveField& psi0, const EvolutionConfig& cfg)
{
  namespace ode = boost::numeric::odeint;
  using detail::state_type;

  cfg.validate();
  if (!(psi0.grid() == cfg.grid))
    throw error(errc::invalid_argument, "initial field is not on the configured grid");

  detail::GpOperator op(cfg);
  const auto& grid = cfg.grid;
  const std::size_t n = grid.size();
  const auto c0 = psi0.coeffs().fft_ordered();
  state_type x(c0.begin(), c0.end());
  x[grid.nyquist_slot()] = 0.0;

  const bool twisted = cfg.integrating_factor;
  const auto& kin = op.kinetic();
  state_type scratch(n);

  // with the integrating factor the state is w = exp(i kappa^2 t / 2) c
  auto untwist = [&](const state_type& w, double t, state_type& c) {
    for (std::size_t s = 0; s < n; ++s)
      c[s] = w[s] * std::polar(1.0, -kin[s] * t);
  };

  auto system = [&](const state_type& w, state_type& dwdt, double t) {
    if (!twisted) {
      op(w, dwdt);
      return;
    }
    untwist(w, t, scratch);
    op(scratch, dwdt);
    for (std::size_t s = 0; s < n; ++s)
      dwdt[s] = (dwdt[s] + cplx(0.0, kin[s]) * scratch[s]) * std::polar(1.0, kin[s] * t);
  };

  Trajectory traj;
  state_type c(n);
  auto observer = [&](const state_type& w, double t) {
    if (twisted)
      untwist(w, t, c);
    else
      c = w;
    if (!detail::all_finite(c))
      throw BlowUp(t, std::move(traj));
    const Conserved q = op.conserved(c);
    if (!std::isfinite(q.mass) || !std::isfinite(q.energy))
      throw BlowUp(t, std::move(traj));
    traj.times.push_back(t);
    traj.states.emplace_back(FourierCoefficients(grid, c));
    traj.mass.push_back(q.mass);
    traj.energy.push_back(q.energy);
  };

  const auto times = detail::record_times(cfg.time_horizon, cfg.record_every);
  try {
    if (const auto* a = std::get_if<AdaptiveRK45>(&cfg.stepper)) {
      auto stepper = ode::make_dense_output(a->atol, a->rtol, ode::runge_kutta_dopri5<state_type>());
      ode::integrate_times(stepper, system, x, times.begin(), times.end(), 1e-3, observer,
                           ode::max_step_checker(10'000'000));
    } else {
      ode::runge_kutta4<state_type> stepper;
      ode::integrate_times(stepper, system, x, times.begin(), times.end(),
                           std::get<FixedRK4>(cfg.stepper).dt, observer);
    }
  } catch (const ode::step_adjustment_error& e) {
    throw error(errc::step_size_underflow, e.what());
  } catch (const ode::no_progress_error& e) {
    throw error(errc::step_size_underflow, e.what());
  }
  return traj;
}

struct PerturbationSpec {
  double nu = 0.01;
  std::uint64_t seed = 1;
  int mode_cutoff = 16;
};

// Real band-limited m(x) with unit L2 norm, from seeded normal coefficients.
inline WaveField random_profile(const PeriodicGrid& grid, std::uint64_t seed, int mode_cutoff)
{
  if (mode_cutoff < 1)
    throw error(errc::invalid_argument, "perturbation mode cutoff must be positive");
  const int top = std::min(mode_cutoff, grid.max_mode());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourierCoefficients c(grid);
  c[0] = gauss(rng);
  for (int j = 1; j <= top; ++j) {
    const double re = gauss(rng), im = gauss(rng);
    c[j] = cplx(re, im);
    c[-j] = cplx(re, -im);
  }
  double sum = 0.0;
  for (const auto& v : c.fft_ordered())
    sum += std::norm(v);
  const double scale = 1.0 / std::sqrt(sum);
  for (auto& v : c.fft_ordered())
    v *= scale;
  WaveField m(std::move(c));
  std::vector<cplx> real(m.samples().begin(), m.samples().end());
  for (auto& v : real)
    v = v.real();
  return WaveField(grid, std::move(real));
}

// phi + nu m(x) exp(i theta(x))
inline WaveField perturbed_initial(const StationaryState& state, const PerturbationSpec& spec)
{
  if (!(spec.nu >= 0.0) || !std::isfinite(spec.nu))
    throw error(errc::invalid_argument, "perturbation amplitude must be nonnegative");
  if (spec.nu == 0.0)
    return state.field;
  const auto& grid = state.field.grid();
  const WaveField m = random_profile(grid, spec.seed, spec.mode_cutoff);
  std::vector<cplx> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double theta = solution_phase(state.params, grid.point(i));
    out[i] = state.field[i] + spec.nu * m[i].real() * std::polar(1.0, theta);
  }
  return WaveField(grid, std::move(out));
}

// sup over grid points of | |psi| - |phi| |
inline double modulus_deviation(const WaveField& psi, const WaveField& phi)
{
  double d = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m)
    d = std::max(d, std::abs(std::abs(psi[m]) - std::abs(phi[m])));
  return d;
}

} // namespace nlgp
