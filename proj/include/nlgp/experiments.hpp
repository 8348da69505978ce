#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlgp/bloch.hpp"
#include "nlgp/evolution.hpp"
#include "nlgp/exact_solution.hpp"
#include "nlgp/kernels.hpp"
#include "nlgp/parallel.hpp"

namespace nlgp {

// ---- asymptotic equivalence sweep -------------------------------------------

struct AesPlan {
  double B = 1.0;
  double V0 = -1.0;
  double k = 1.0;
  int alpha = 1;
  KernelSpec kernel = KernelSpec::gaussian_normalized();
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  double period = 8.0 * pi;
  std::size_t modes = 128;
  double horizon = 5.0;
  double record_every = 0.05;
  Stepper stepper = AdaptiveRK45{};
  FilterSpec filter{};
  FilterPlacement filter_placement = FilterPlacement::per_rhs;
  PerturbationSpec perturbation{0.01, 1, 16};
  int threads = 1;
};

struct AesRow {
  double epsilon = 0.0;
  double sup_error_linf = 0.0;
  double sup_error_h1 = 0.0;
};

struct AesResult {
  std::vector<AesRow> rows; // ascending epsilon, the eps = 0 control first
  std::vector<double> orders; // log(E(e1)/E(e2)) / log(e1/e2) for neighbouring positive eps
  bool strictly_decreasing = false;
  double min_order = 0.0;
};

inline EvolutionConfig aes_config(const AesPlan& plan, Interaction interaction)
{
  EvolutionConfig cfg{.grid = PeriodicGrid(plan.period, plan.modes)};
  cfg.interaction = std::move(interaction);
  cfg.potential = SineSquaredPotential{plan.V0, plan.k};
  cfg.alpha = plan.alpha;
  cfg.time_horizon = plan.horizon;
  cfg.stepper = plan.stepper;
  cfg.filter = plan.filter;
  cfg.filter_placement = plan.filter_placement;
  cfg.record_every = plan.record_every;
  return cfg;
}

inline AesResult run_aes_sweep(const AesPlan& plan)
{
  if (plan.epsilons.empty())
    throw error(errc::config, "AES sweep needs at least one epsilon");
  for (std::size_t i = 0; i < plan.epsilons.size(); ++i) {
    if (!(plan.epsilons[i] > 0.0) || !std::isfinite(plan.epsilons[i]))
      throw error(errc::config, "AES epsilons must be positive");
    if (i > 0 && !(plan.epsilons[i] < plan.epsilons[i - 1]))
      throw error(errc::config, "AES epsilons must decrease");
  }

  // shared initial data: the local-equation solution, perturbed
  const PeriodicGrid grid(plan.period, plan.modes);
  const auto local_params = SolutionParams::make(
      plan.B, plan.V0, plan.k, plan.alpha, ScaledKernel(KernelSpec::gaussian_normalized(), 0.0));
  const auto state = build_solution(local_params, grid);
  const WaveField psi0 = perturbed_initial(state, plan.perturbation);

  // run 0 is the local equation, run 1 the nonlocal one at eps = 0, then the sweep
  std::vector<double> eps{0.0};
  eps.insert(eps.end(), plan.epsilons.begin(), plan.epsilons.end());
  auto runs = parallel_map(eps.size() + 1, plan.threads, [&](std::size_t i) {
    if (i == 0)
      return evolve(psi0, aes_config(plan, LocalInteraction{}));
    return evolve(psi0, aes_config(plan, ScaledKernel(plan.kernel, eps[i - 1])));
  });

  const Trajectory& ref = runs.front();
  AesResult res;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Trajectory& tr = runs[i + 1];
    AesRow row{eps[i], 0.0, 0.0};
    for (std::size_t t = 0; t < std::min(tr.states.size(), ref.states.size()); ++t) {
      const WaveField diff = tr.states[t] - ref.states[t];
      row.sup_error_linf = std::max(row.sup_error_linf, linf_norm(diff));
      row.sup_error_h1 = std::max(row.sup_error_h1, hs_norm(diff, 1.0));
    }
    res.rows.push_back(row);
  }

  res.strictly_decreasing = true;
  res.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i < res.rows.size(); ++i) {
    const AesRow& big = res.rows[i - 1];
    const AesRow& small = res.rows[i];
    if (!(small.sup_error_linf < big.sup_error_linf))
      res.strictly_decreasing = false;
    const double order = std::log(big.sup_error_linf / small.sup_error_linf) /
                         std::log(big.epsilon / small.epsilon);
    res.orders.push_back(order);
    res.min_order = std::min(res.min_order, order);
  }
  std::sort(res.rows.begin(), res.rows.end(),
            [](const AesRow& a, const AesRow& b) { return a.epsilon < b.epsilon; });
  return res;
}

// ---- figure regimes -------------------------------------------------------------

enum class FigureRegime { fig1a, fig1b, fig2a, fig2b };

struct RegimeParameters {
  double B = 0.0;
  double V0 = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
};

inline RegimeParameters regime_parameters(FigureRegime r)
{
  switch (r) {
  case FigureRegime::fig1a: return {0.01, -2.46, 0.0, 0.01};
  case FigureRegime::fig1b: return {1.0, -0.01, 0.01, 0.01};
  case FigureRegime::fig2a: return {1.0, -1.0, 0.01, 0.01};
  case FigureRegime::fig2b: return {1.0, -1.0, 0.01, 0.1};
  }
  return {};
}

inline const char* to_string(FigureRegime r)
{
  switch (r) {
  case FigureRegime::fig1a: return "1a";
  case FigureRegime::fig1b: return "1b";
  case FigureRegime::fig2a: return "2a";
  case FigureRegime::fig2b: return "2b";
  }
  return "?";
}

inline FigureRegime parse_regime(const std::string& s)
{
  if (s == "1a") return FigureRegime::fig1a;
  if (s == "1b") return FigureRegime::fig1b;
  if (s == "2a") return FigureRegime::fig2a;
  if (s == "2b") return FigureRegime::fig2b;
  throw error(errc::config, "unknown figure regime '" + s + "'");
}

struct FigureOptions {
  KernelSpec kernel = KernelSpec::gaussian_raw();
  double k = 1.0;
  int alpha = 1;
  double period = 8.0 * pi;
  std::size_t modes = 128;
  double horizon = 30.0;
  double record_every = 0.1;
  Stepper stepper = AdaptiveRK45{};
  FilterSpec filter{};
  FilterPlacement filter_placement = FilterPlacement::per_rhs;
  std::uint64_t seed = 1;
  int mode_cutoff = 16;
  std::optional<double> nu; // overrides the regime's amplitude
  int n_periods = 4;
  int truncation = 64;
  int threads = 1;
};

struct GrowthFit {
  bool valid = false;
  double rate = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  int points = 0;
};

// least squares of log(dev) on the samples with dev in [lo, hi], up to the first exit above hi
inline GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& dev, double lo,
                            double hi)
{
  GrowthFit f;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (dev[i] > hi)
      break;
    if (dev[i] < lo)
      continue;
    const double y = std::log(dev[i]);
    if (f.points == 0)
      f.t_begin = t[i];
    f.t_end = t[i];
    st += t[i], sy += y, stt += t[i] * t[i], sty += t[i] * y;
    ++f.points;
  }
  if (f.points >= 3) {
    const double n = f.points;
    const double den = n * stt - st * st;
    if (den > 0.0) {
      f.rate = (n * sty - st * sy) / den;
      f.valid = true;
    }
  }
  return f;
}

struct FigureResult {
  FigureRegime regime = FigureRegime::fig1b;
  RegimeParameters parameters;
  std::string kernel;
  std::optional<StationaryState> state;
  Trajectory trajectory;
  std::vector<double> deviation;
  double max_deviation = 0.0;
  std::optional<double> departure_time; // first time deviation exceeds 10 nu
  bool blew_up = false;
  std::vector<EigenReport> spectra;
  double spectral_abscissa = 0.0;
  std::optional<double> b_star;
  double A = 0.0;
  double A_normalized = 0.0;
  InstabilityVerdict verdict = InstabilityVerdict::inconclusive;
  GrowthFit growth;
  std::vector<std::string> warnings;
};

inline FigureResult run_figure_regime(FigureRegime which, const FigureOptions& opt)
{
  FigureResult res;
  res.regime = which;
  res.parameters = regime_parameters(which);
  if (opt.nu)
    res.parameters.nu = *opt.nu;
  res.kernel = opt.kernel.name();
  const auto& rp = res.parameters;

  const ScaledKernel kern(opt.kernel, rp.epsilon);
  const auto params = SolutionParams::make(rp.B, rp.V0, opt.k, opt.alpha, kern);
  const PeriodicGrid grid(opt.period, opt.modes);
  res.state = build_solution(params, grid);
  res.A = params.A;
  res.A_normalized = params.normalized_A();
  if (res.A_normalized >= 0.0)
    res.verdict = instability_predicate(res.A_normalized, opt.k);

  res.spectra = full_period_spectrum(opt.n_periods, params, opt.truncation, opt.threads);
  res.spectral_abscissa = spectral_abscissa(res.spectra);
  try {
    res.b_star = b_star(opt.k, kern);
  } catch (const error&) {
    res.warnings.push_back("B* undefined: kernel transform not positive");
  }

  EvolutionConfig cfg{.grid = grid};
  cfg.interaction = kern;
  cfg.potential = SineSquaredPotential{rp.V0, opt.k};
  cfg.alpha = opt.alpha;
  cfg.time_horizon = opt.horizon;
  cfg.stepper = opt.stepper;
  cfg.filter = opt.filter;
  cfg.filter_placement = opt.filter_placement;
  cfg.record_every = opt.record_every;

  const WaveField psi0 = perturbed_initial(*res.state, {rp.nu, opt.seed, opt.mode_cutoff});
  try {
    res.trajectory = evolve(psi0, cfg);
  } catch (BlowUp& b) {
    res.trajectory = std::move(b.partial);
    res.blew_up = true;
    res.warnings.push_back(b.what());
  }

  for (std::size_t i = 0; i < res.trajectory.states.size(); ++i) {
    const double d = modulus_deviation(res.trajectory.states[i], res.state->field);
    res.deviation.push_back(d);
    res.max_deviation = std::max(res.max_deviation, d);
    if (!res.departure_time && d > 10.0 * rp.nu)
      res.departure_time = res.trajectory.times[i];
  }

  res.growth = fit_growth(res.trajectory.times, res.deviation, 3.0 * rp.nu,
                          0.3 * linf_norm(res.state->field));
  if (res.growth.valid && res.growth.rate > 1e-2 && res.spectral_abscissa < 0.5 * res.growth.rate)
    res.warnings.push_back("deviation grows at rate " + std::to_string(res.growth.rate) +
                           " but the spectral abscissa is only " +
                           std::to_string(res.spectral_abscissa));
  if (opt.n_periods > 1) {
    const double limit = 0.25 * opt.k * opt.k * opt.truncation;
    for (int r = 1; r < opt.n_periods; ++r) {
      const double gap = conjugation_gap(res.spectra[r], res.spectra[opt.n_periods - r], limit);
      if (gap > 1e-6)
        res.warnings.push_back("spectra at mu = " + std::to_string(res.spectra[r].mu) +
                               " and its mirror are not conjugate (gap " + std::to_string(gap) + ")");
    }
  }
  return res;
}

// ---- stability map --------------------------------------------------------------

struct StabilityMapPlan {
  std::vector<double> B_values;
  std::vector<double> V0_values;
  double k = 1.0;
  int alpha = 1;
  KernelSpec kernel = KernelSpec::gaussian_normalized();
  double epsilon = 0.0;
  int n_periods = 4;
  int truncation = 32;
  int threads = 1;
};

struct StabilityPoint {
  double B = 0.0;
  double V0 = 0.0;
  double A = 0.0;
  bool valid = false;
  double abscissa = std::numeric_limits<double>::quiet_NaN();
  bool above_b_star = false;
  bool above_a_crit = false;
};

struct StabilityMap {
  std::vector<StabilityPoint> points; // V0-major, B-minor
  std::optional<double> b_star;
  double a_crit = 0.0;
};

inline StabilityMap stability_map(const StabilityMapPlan& plan)
{
  if (plan.B_values.empty() || plan.V0_values.empty())
    throw error(errc::config, "stability map needs nonempty B and V0 grids");
  for (double v : plan.B_values)
    if (!std::isfinite(v))
      throw error(errc::config, "stability map B values must be finite");
  for (double v : plan.V0_values)
    if (!std::isfinite(v))
      throw error(errc::config, "stability map V0 values must be finite");

  const ScaledKernel kern(plan.kernel, plan.epsilon);
  StabilityMap map;
  map.a_crit = a_crit(plan.k);
  try {
    map.b_star = b_star(plan.k, kern);
  } catch (const error&) {
  }

  const std::size_t nb = plan.B_values.size();
  const std::size_t total = nb * plan.V0_values.size();
  map.points = parallel_map(total, plan.threads, [&](std::size_t idx) {
    StabilityPoint p;
    p.V0 = plan.V0_values[idx / nb];
    p.B = plan.B_values[idx % nb];
    try {
      const auto params = SolutionParams::make(p.B, p.V0, plan.k, plan.alpha, kern);
      p.A = params.A;
      p.valid = true;
      p.above_b_star = map.b_star && p.B > *map.b_star;
      p.above_a_crit = params.normalized_A() >= map.a_crit;
      p.abscissa = spectral_abscissa(full_period_spectrum(plan.n_periods, params, plan.truncation));
    } catch (const error& e) {
      if (e.code() != errc::offset_too_small && e.code() != errc::beta_zero)
        throw;
    }
    return p;
  });
  return map;
}

} // namespace nlgp
