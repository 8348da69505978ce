#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nlgp/bloch.hpp"
#include "nlgp/config.hpp"
#include "nlgp/error.hpp"
#include "nlgp/evolution.hpp"
#include "nlgp/exact_solution.hpp"
#include "nlgp/experiments.hpp"
#include "nlgp/io.hpp"
#include "nlgp/kernels.hpp"

namespace nlgp::cli {

enum exit_code : int { ok = 0, check_failed = 1, config_error = 2, blow_up = 3 };

inline int exit_code_for(errc c)
{
  switch (c) {
  case errc::non_finite:
  case errc::step_size_underflow:
  case errc::eigensolve_failure: return blow_up;
  default: return config_error;
  }
}

struct Session {
  config::RunConfig cfg;
  std::filesystem::path out_dir;
  std::ostream& out;
  std::ostream& err;
  int verbosity = 1;

  void info(const std::string& msg) const
  {
    if (verbosity >= 1)
      err << "[nlgp] " << msg << '\n';
  }
  void debug(const std::string& msg) const
  {
    if (verbosity >= 2)
      err << "[nlgp:debug] " << msg << '\n';
  }
};

// ---- config -> library objects ------------------------------------------------

inline bool is_local(const std::string& name) { return name == "local"; }

inline ScaledKernel scaled_kernel(const config::RunConfig& c, const std::string& name_key)
{
  const std::string name = c.text(name_key);
  if (is_local(name))
    return ScaledKernel(KernelSpec::gaussian_normalized(), 0.0);
  return ScaledKernel(KernelSpec::parse(name), c.real("kernel.epsilon"));
}

inline SolutionParams solution_params(const config::RunConfig& c)
{
  return SolutionParams::make(c.real("solution.B"), c.real("solution.V0"), c.real("solution.k"),
                              static_cast<int>(c.integer("solution.alpha")),
                              scaled_kernel(c, "kernel.name"));
}

inline PeriodicGrid grid_from(const config::RunConfig& c)
{
  const auto n = c.integer("grid.modes");
  if (n < 4)
    throw error(errc::config, "grid.modes must be at least 4");
  return PeriodicGrid(c.real("grid.period"), static_cast<std::size_t>(n));
}

inline Stepper stepper_from(const config::RunConfig& c)
{
  const std::string s = c.text("evolution.stepper");
  if (s == "rk45")
    return AdaptiveRK45{c.real("evolution.rtol"), c.real("evolution.atol")};
  if (s == "rk4")
    return FixedRK4{c.real("evolution.dt")};
  throw error(errc::config, "evolution.stepper must be rk45 or rk4");
}

inline FilterPlacement placement_from(const config::RunConfig& c)
{
  const std::string s = c.text("evolution.filter");
  if (s == "per-rhs")
    return FilterPlacement::per_rhs;
  if (s == "off")
    return FilterPlacement::off;
  throw error(errc::config, "evolution.filter must be per-rhs or off");
}

inline FilterSpec filter_from(const config::RunConfig& c)
{
  FilterSpec f{c.real("evolution.filter_alpha"), static_cast<int>(c.integer("evolution.filter_gamma"))};
  f.validate();
  return f;
}

inline PerturbationSpec perturbation_from(const config::RunConfig& c)
{
  return {c.real("perturbation.nu"), static_cast<std::uint64_t>(c.integer("run.seed")),
          static_cast<int>(c.integer("perturbation.mode_cutoff"))};
}

inline int threads_from(const config::RunConfig& c)
{
  return static_cast<int>(std::max<long long>(1, c.integer("run.threads")));
}

inline EvolutionConfig evolution_from(const config::RunConfig& c, const SolutionParams& p)
{
  EvolutionConfig e{.grid = grid_from(c)};
  if (is_local(c.text("kernel.name")))
    e.interaction = LocalInteraction{};
  else
    e.interaction = p.kernel;
  e.potential = SineSquaredPotential{p.V0, p.k};
  e.alpha = p.alpha;
  e.time_horizon = c.real("evolution.horizon");
  e.record_every = c.real("evolution.record_every");
  e.stepper = stepper_from(c);
  e.filter = filter_from(c);
  e.filter_placement = placement_from(c);
  e.integrating_factor = c.boolean("evolution.integrating_factor");
  e.validate();
  return e;
}

inline void write_run_files(const Session& s)
{
  io::write_text(s.out_dir / "config.resolved.cfg", s.cfg.echo());
}

// ---- subcommands -------------------------------------------------------------------

inline int cmd_simulate(Session& s)
{
  const auto& c = s.cfg;
  const auto params = solution_params(c);
  const auto grid = grid_from(c);
  const auto evo = evolution_from(c, params);
  const auto state = build_solution(params, grid);
  const WaveField psi0 = perturbed_initial(state, perturbation_from(c));
  write_run_files(s);

  s.info("evolving to t = " + io::num(evo.time_horizon) + " with kernel " + c.text("kernel.name"));
  Trajectory traj;
  bool blew = false;
  try {
    traj = evolve(psi0, evo);
  } catch (BlowUp& b) {
    traj = std::move(b.partial);
    blew = true;
    s.err << b.what() << '\n';
  }

  if (c.boolean("evolution.write_states"))
    io::write_trajectory_csv(s.out_dir / "trajectory.csv", traj);
  io::write_summary_csv(s.out_dir / "summary.csv", traj, &state.field);
  io::write_text(s.out_dir / "plot_summary.py", io::scripts::summary_plot());
  io::write_text(s.out_dir / "plot_modulus.py", io::scripts::modulus_plot());

  double dev = 0.0;
  for (const auto& st : traj.states)
    dev = std::max(dev, modulus_deviation(st, state.field));
  nlohmann::ordered_json meta;
  meta["kernel"] = c.text("kernel.name");
  meta["epsilon"] = params.kernel.epsilon();
  meta["omega"] = params.omega;
  meta["A"] = params.A;
  meta["horizon"] = evo.time_horizon;
  meta["filter"] = c.text("evolution.filter");
  meta["recorded_until"] = traj.times.empty() ? 0.0 : traj.times.back();
  meta["blew_up"] = blew;
  meta["max_deviation"] = dev;
  meta["mass_drift"] = traj.mass_drift();
  meta["energy_drift"] = traj.energy_drift();
  io::write_json(s.out_dir / "metadata.json", meta);

  s.out << "max_deviation = " << io::num(dev) << '\n'
        << "mass_drift = " << io::num(traj.mass_drift()) << '\n'
        << "energy_drift = " << io::num(traj.energy_drift()) << '\n';
  return blew ? blow_up : ok;
}

inline void print_spectrum(Session& s, const std::vector<EigenReport>& reps, const SolutionParams& p,
                           std::optional<double> bstar)
{
  const double abscissa = spectral_abscissa(reps);
  s.out << "max_real_part = " << io::num(abscissa) << '\n';
  s.out << "B* = " << (bstar ? io::num(*bstar) : std::string("undefined")) << " (B = " << io::num(p.B)
        << (bstar ? (p.B > *bstar ? ", above" : ", not above") : "") << ")\n";
  s.out << "A = " << io::num(p.normalized_A()) << " (unit-mass kernel), A_crit = " << io::num(a_crit(p.k));
  if (p.normalized_A() >= 0.0)
    s.out << ", " << to_string(instability_predicate(p.normalized_A(), p.k));
  s.out << '\n';
  for (const auto& r : reps)
    s.out << "mu = " << io::num(r.mu) << ": max Re = " << io::num(r.max_real_part)
          << ", k_r + k_c + k_i- = " << r.counts.k_r + r.counts.k_c + r.counts.k_i_minus
          << ", n(L) = " << r.counts.n_L
          << (r.origin_clear ? "" : " (eigenvalue at origin, count not applicable)") << '\n';
  s.out << "verdict: " << (abscissa < 1e-8 ? "spectrally stable" : "unstable") << '\n';
}

inline int cmd_spectrum(Session& s)
{
  const auto& c = s.cfg;
  const auto params = solution_params(c);
  const int n_periods = static_cast<int>(c.integer("spectrum.n_periods"));
  const int truncation = static_cast<int>(c.integer("spectrum.truncation"));
  const std::string expect = c.text("spectrum.expect");
  if (expect != "any" && expect != "stable" && expect != "unstable")
    throw error(errc::config, "spectrum.expect must be any, stable or unstable");
  // validate before any compute
  if (truncation < 8)
    throw error(errc::truncation_too_small, "spectrum.truncation must be at least 8");
  write_run_files(s);

  const auto reps = full_period_spectrum(n_periods, params, truncation, threads_from(c));
  std::optional<double> bstar;
  try {
    bstar = b_star(params.k, params.kernel);
  } catch (const error&) {
  }
  io::write_eigen_csv(s.out_dir / "eigenvalues.csv", reps);
  io::write_json(s.out_dir / "spectrum_summary.json", io::spectrum_summary(reps, params, bstar));
  io::write_text(s.out_dir / "plot_spectrum.py", io::scripts::spectrum_plot());
  print_spectrum(s, reps, params, bstar);

  const bool stable = spectral_abscissa(reps) < 1e-8;
  if ((expect == "stable" && !stable) || (expect == "unstable" && stable))
    return check_failed;
  return ok;
}

inline int cmd_aes(Session& s)
{
  const auto& c = s.cfg;
  if (is_local(c.text("kernel.name")))
    throw error(errc::config, "the AES sweep needs a nonlocal kernel");
  AesPlan plan;
  plan.B = c.real("solution.B");
  plan.V0 = c.real("solution.V0");
  plan.k = c.real("solution.k");
  plan.alpha = static_cast<int>(c.integer("solution.alpha"));
  plan.kernel = KernelSpec::parse(c.text("kernel.name"));
  plan.epsilons = c.reals("aes.epsilons");
  plan.period = c.real("grid.period");
  plan.modes = static_cast<std::size_t>(grid_from(c).size());
  plan.horizon = c.real("aes.horizon");
  plan.record_every = c.real("aes.record_every");
  plan.stepper = stepper_from(c);
  plan.filter = filter_from(c);
  plan.filter_placement = placement_from(c);
  plan.perturbation = perturbation_from(c);
  plan.threads = threads_from(c);
  SolutionParams::make(plan.B, plan.V0, plan.k, plan.alpha, ScaledKernel(plan.kernel, 0.0));
  write_run_files(s);

  const AesResult res = run_aes_sweep(plan);
  io::write_aes_csv(s.out_dir / "aes.csv", res);
  io::write_text(s.out_dir / "plot_aes.py", io::scripts::aes_plot());
  s.out << "epsilon  sup_t |psi_eps - psi_0|_inf  sup_t |psi_eps - psi_0|_H1\n";
  for (const auto& r : res.rows)
    s.out << io::num(r.epsilon) << "  " << io::num(r.sup_error_linf) << "  " << io::num(r.sup_error_h1)
          << '\n';
  for (std::size_t i = 0; i < res.orders.size(); ++i)
    s.out << "order[" << i << "] = " << io::num(res.orders[i]) << '\n';
  const bool pass = res.strictly_decreasing && res.min_order >= c.real("aes.min_order");
  s.out << "strictly decreasing: " << (res.strictly_decreasing ? "yes" : "no")
        << ", min order: " << io::num(res.min_order) << " -> " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? ok : check_failed;
}

inline int cmd_figures(Session& s, const std::string& which)
{
  const auto& c = s.cfg;
  const FigureRegime regime = parse_regime(which);
  FigureOptions opt;
  opt.kernel = KernelSpec::parse(c.text("figures.kernel"));
  opt.k = c.real("solution.k");
  opt.alpha = static_cast<int>(c.integer("solution.alpha"));
  opt.period = c.real("grid.period");
  opt.modes = grid_from(c).size();
  opt.horizon = c.real("evolution.horizon");
  opt.record_every = c.real("evolution.record_every");
  opt.stepper = stepper_from(c);
  opt.filter = filter_from(c);
  opt.filter_placement = placement_from(c);
  opt.seed = static_cast<std::uint64_t>(c.integer("run.seed"));
  opt.mode_cutoff = static_cast<int>(c.integer("perturbation.mode_cutoff"));
  if (const double nu = c.real("figures.nu"); !std::isnan(nu))
    opt.nu = nu;
  opt.n_periods = static_cast<int>(c.integer("spectrum.n_periods"));
  opt.truncation = static_cast<int>(c.integer("spectrum.truncation"));
  if (opt.truncation < 8)
    throw error(errc::truncation_too_small, "spectrum.truncation must be at least 8");
  opt.threads = threads_from(c);
  write_run_files(s);

  s.info(std::string("figure regime ") + which + " with kernel " + opt.kernel.name());
  const FigureResult r = run_figure_regime(regime, opt);
  const auto& rp = r.parameters;

  if (c.boolean("evolution.write_states"))
    io::write_trajectory_csv(s.out_dir / "trajectory.csv", r.trajectory);
  io::write_summary_csv(s.out_dir / "summary.csv", r.trajectory, &r.state->field);
  io::write_eigen_csv(s.out_dir / "eigenvalues.csv", r.spectra);
  io::write_json(s.out_dir / "spectrum_summary.json",
                 io::spectrum_summary(r.spectra, r.state->params, r.b_star));
  io::write_text(s.out_dir / "plot_summary.py", io::scripts::summary_plot());
  io::write_text(s.out_dir / "plot_modulus.py", io::scripts::modulus_plot());
  io::write_text(s.out_dir / "plot_spectrum.py", io::scripts::spectrum_plot());

  nlohmann::ordered_json meta;
  meta["regime"] = which;
  meta["kernel"] = r.kernel;
  meta["B"] = rp.B;
  meta["V0"] = rp.V0;
  meta["epsilon"] = rp.epsilon;
  meta["nu"] = rp.nu;
  meta["horizon"] = opt.horizon;
  meta["max_deviation"] = r.max_deviation;
  meta["departure_time"] = r.departure_time ? nlohmann::ordered_json(*r.departure_time) : nullptr;
  meta["spectral_abscissa"] = r.spectral_abscissa;
  meta["growth_rate"] = r.growth.valid ? nlohmann::ordered_json(r.growth.rate) : nullptr;
  meta["blew_up"] = r.blew_up;
  meta["mass_drift"] = r.trajectory.mass_drift();
  meta["energy_drift"] = r.trajectory.energy_drift();
  meta["warnings"] = r.warnings;
  io::write_json(s.out_dir / "figure.json", meta);

  s.out << "regime " << which << " (B=" << io::num(rp.B) << ", V0=" << io::num(rp.V0)
        << ", eps=" << io::num(rp.epsilon) << ", nu=" << io::num(rp.nu) << ", kernel " << r.kernel
        << ")\n";
  s.out << "max deviation = " << io::num(r.max_deviation) << " (" << io::num(r.max_deviation / rp.nu)
        << " nu)\n";
  if (r.departure_time)
    s.out << "departs (deviation > 10 nu) at t = " << io::num(*r.departure_time) << '\n';
  s.out << "spectral abscissa = " << io::num(r.spectral_abscissa) << '\n';
  if (r.growth.valid)
    s.out << "fitted growth rate = " << io::num(r.growth.rate) << '\n';
  for (const auto& w : r.warnings)
    s.out << "warning: " << w << '\n';

  bool pass = true;
  switch (regime) {
  case FigureRegime::fig1a:
    pass = r.spectral_abscissa > 1e-3 && r.departure_time.has_value();
    break;
  case FigureRegime::fig1b:
    pass = r.spectral_abscissa < 1e-8 && r.max_deviation < 5.0 * rp.nu;
    break;
  default:
    // expected outcome only: reported, not enforced
    s.out << "deviation below 10 nu: " << (r.max_deviation < 10.0 * rp.nu ? "yes" : "no") << '\n';
    break;
  }
  s.out << "expected outcome: " << (pass ? "reproduced" : "NOT reproduced") << '\n';
  if (r.blew_up)
    return blow_up;
  return pass ? ok : check_failed;
}

inline int cmd_validate_kernel(Session& s)
{
  const auto& c = s.cfg;
  const std::string name = c.text("kernel.name");
  if (is_local(name))
    throw error(errc::config, "the local model has no kernel to validate");
  const std::string set = c.text("validate.set");
  if (set != "H" && set != "Hprime")
    throw error(errc::config, "validate.set must be H or Hprime");
  const ScaledKernel kern(KernelSpec::parse(name), c.real("kernel.epsilon"));
  write_run_files(s);

  const auto rep = validate_hypotheses(kern, set == "H" ? HypothesisSet::H : HypothesisSet::Hprime);
  nlohmann::ordered_json j;
  j["kernel"] = rep.kernel;
  j["set"] = set;
  for (const auto& chk : rep.checks) {
    s.out << (chk.passed ? "PASS " : "FAIL ") << chk.id << "  " << chk.description
          << "  (measured " << io::num(chk.measured) << ")\n";
    j["checks"].push_back({{"id", chk.id},
                           {"description", chk.description},
                           {"passed", chk.passed},
                           {"measured", io::num(chk.measured)}});
  }
  io::write_json(s.out_dir / "validation.json", j);
  return rep.all_passed() ? ok : check_failed;
}

inline int cmd_stability_map(Session& s)
{
  const auto& c = s.cfg;
  StabilityMapPlan plan;
  plan.B_values = c.reals("map.B_values");
  plan.V0_values = c.reals("map.V0_values");
  plan.k = c.real("solution.k");
  plan.alpha = static_cast<int>(c.integer("solution.alpha"));
  const auto kern = scaled_kernel(c, "kernel.name");
  plan.kernel = kern.base();
  plan.epsilon = kern.epsilon();
  plan.n_periods = static_cast<int>(c.integer("map.n_periods"));
  plan.truncation = static_cast<int>(c.integer("map.truncation"));
  if (plan.truncation < 8)
    throw error(errc::truncation_too_small, "map.truncation must be at least 8");
  plan.threads = threads_from(c);
  write_run_files(s);

  const StabilityMap map = stability_map(plan);
  io::write_stability_map_csv(s.out_dir / "stability_map.csv", map);
  io::write_text(s.out_dir / "plot_stability_map.py", io::scripts::map_plot());
  int unstable = 0, valid = 0;
  for (const auto& p : map.points) {
    valid += p.valid;
    unstable += p.valid && p.abscissa >= 1e-8;
  }
  s.out << valid << " valid points, " << unstable << " with positive spectral abscissa\n";
  s.out << "B* = " << (map.b_star ? io::num(*map.b_star) : std::string("undefined"))
        << ", A_crit = " << io::num(map.a_crit) << '\n';
  return ok;
}

// ---- entry point ---------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr)
{
  CLI::App app{"Periodic nonlocal Gross-Pitaevskii toolkit: evolution, exact solutions, Bloch spectra"};
  app.require_subcommand(1);
  app.footer("\n" + config::keys_help() +
             "\nExit codes: 0 success, 1 scientific check failed, 2 configuration error, 3 blow-up.");

  struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<long long> seed;
    std::optional<int> threads;
    std::string kernel;
    std::vector<std::string> sets;
  } common;
  std::string regime;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "config file (key = value)");
    sub->add_option("--out", common.out_dir, "output directory (overrides run.output_dir)");
    sub->add_option("--seed", common.seed, "perturbation seed (overrides run.seed)");
    sub->add_option("--threads", common.threads, "worker threads (overrides run.threads)");
    sub->add_option("--kernel", common.kernel,
                    "kernel: gaussian-normalized | gaussian-raw | algebraic:p | custom:path | local");
    sub->add_option("--set", common.sets, "override a config key, key=value (repeatable)");
  };

  auto* simulate = app.add_subcommand("simulate", "evolve a perturbed exact solution");
  auto* spectrum = app.add_subcommand("spectrum", "Bloch spectrum with Krein signatures");
  auto* aes = app.add_subcommand("aes-sweep", "nonlocal-to-local convergence sweep in eps");
  auto* figures = app.add_subcommand("figures", "reference regimes 1a, 1b, 2a, 2b");
  figures->add_option("regime", regime, "1a | 1b | 2a | 2b")->required()->check(
      CLI::IsMember({"1a", "1b", "2a", "2b"}));
  auto* validate = app.add_subcommand("validate-kernel", "check kernel hypotheses");
  auto* smap = app.add_subcommand("stability-map", "spectral abscissa over a (B, V0) grid");
  for (auto* sub : {simulate, spectrum, aes, figures, validate, smap})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  Session s{config::RunConfig{}, {}, out, err};
  try {
    if (!common.config_path.empty())
      s.cfg.merge_file(common.config_path);
    for (const auto& kv : common.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw error(errc::config, "--set expects key=value, got '" + kv + "'");
      s.cfg.set(config::trim(kv.substr(0, eq)), config::trim(kv.substr(eq + 1)), "--set");
    }
    if (common.seed)
      s.cfg.set("run.seed", std::to_string(*common.seed));
    if (common.threads)
      s.cfg.set("run.threads", std::to_string(*common.threads));
    if (!common.kernel.empty())
      s.cfg.set(figures->parsed() ? "figures.kernel" : "kernel.name", common.kernel);
    if (!common.out_dir.empty())
      s.cfg.set("run.output_dir", common.out_dir);

    const std::string level = s.cfg.text("run.log_level");
    if (level == "quiet")
      s.verbosity = 0;
    else if (level == "info")
      s.verbosity = 1;
    else if (level == "debug")
      s.verbosity = 2;
    else
      throw error(errc::config, "run.log_level must be quiet, info or debug");
    s.out_dir = s.cfg.text("run.output_dir");
    s.debug("resolved configuration:\n" + s.cfg.echo());

    if (simulate->parsed())
      return cmd_simulate(s);
    if (spectrum->parsed())
      return cmd_spectrum(s);
    if (aes->parsed())
      return cmd_aes(s);
    if (figures->parsed())
      return cmd_figures(s, regime);
    if (validate->parsed())
      return cmd_validate_kernel(s);
    return cmd_stability_map(s);
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
}

} // namespace nlgp::cli
