#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "nlgp/bloch.hpp"
#include "nlgp/error.hpp"
#include "nlgp/evolution.hpp"
#include "nlgp/experiments.hpp"

namespace nlgp::io {

// shortest text that parses back to the same double
inline std::string num(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::ofstream open(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw error(errc::io, "cannot write " + path.string());
  return out;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr)
{
  auto out = open(path);
  out << "t,x_index,re,im\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto s = tr.states[i].samples();
    for (std::size_t m = 0; m < s.size(); ++m)
      out << num(tr.times[i]) << ',' << m << ',' << num(s[m].real()) << ',' << num(s[m].imag())
          << '\n';
  }
}

inline void write_summary_csv(const std::filesystem::path& path, const Trajectory& tr,
                              const WaveField* reference = nullptr)
{
  auto out = open(path);
  out << "t,mass,energy" << (reference ? ",deviation" : "") << '\n';
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out << num(tr.times[i]) << ',' << num(tr.mass[i]) << ',' << num(tr.energy[i]);
    if (reference)
      out << ',' << num(modulus_deviation(tr.states[i], *reference));
    out << '\n';
  }
}

inline void write_eigen_csv(const std::filesystem::path& path, const std::vector<EigenReport>& reps)
{
  auto out = open(path);
  out << "mu,re,im,krein,flags\n";
  for (const auto& r : reps) {
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      std::string flags = to_string(r.kinds[i]);
      if (r.cluster_size[i] > 1)
        flags += ";multiplicity=" + std::to_string(r.cluster_size[i]);
      out << num(r.mu) << ',' << num(r.eigenvalues[i].real()) << ',' << num(r.eigenvalues[i].imag())
          << ',' << to_string(r.krein[i]) << ',' << flags << '\n';
    }
  }
}

inline nlohmann::ordered_json spectrum_summary(const std::vector<EigenReport>& reps,
                                               const SolutionParams& p,
                                               std::optional<double> bstar)
{
  nlohmann::ordered_json j;
  j["kernel"] = p.kernel.base().name();
  j["epsilon"] = p.kernel.epsilon();
  j["B"] = p.B;
  j["V0"] = p.V0;
  j["k"] = p.k;
  j["alpha"] = p.alpha;
  j["A"] = p.A;
  j["A_unit_mass_kernel"] = p.normalized_A();
  j["A_crit"] = a_crit(p.k);
  if (p.normalized_A() >= 0.0)
    j["instability_predicate"] = to_string(instability_predicate(p.normalized_A(), p.k));
  if (bstar) {
    j["B_star"] = *bstar;
    j["B_above_B_star"] = p.B > *bstar;
  } else {
    j["B_star"] = nullptr;
  }
  const double abscissa = spectral_abscissa(reps);
  j["max_real_part"] = abscissa;
  j["verdict"] = abscissa < 1e-8 ? "spectrally stable" : "unstable";
  auto& arr = j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reps) {
    nlohmann::ordered_json e;
    e["mu"] = r.mu;
    e["max_real_part"] = r.max_real_part;
    e["k_r"] = r.counts.k_r;
    e["k_c"] = r.counts.k_c;
    e["k_i_minus"] = r.counts.k_i_minus;
    e["n_L"] = r.counts.n_L;
    e["origin_clear"] = r.origin_clear;
    e["count_identity_holds"] = r.count_identity_holds;
    e["deflated_phase_block"] = r.deflated;
    e["degenerate_clusters"] = r.degenerate_clusters;
    arr.push_back(e);
  }
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j)
{
  auto out = open(path);
  out << j.dump(2) << '\n';
}

inline void write_aes_csv(const std::filesystem::path& path, const AesResult& res)
{
  auto out = open(path);
  out << "epsilon,sup_error_linf,sup_error_h1\n";
  for (const auto& r : res.rows)
    out << num(r.epsilon) << ',' << num(r.sup_error_linf) << ',' << num(r.sup_error_h1) << '\n';
}

inline void write_stability_map_csv(const std::filesystem::path& path, const StabilityMap& map)
{
  auto out = open(path);
  out << "B,V0,A,valid,abscissa,B_star,A_crit,above_B_star,above_A_crit\n";
  for (const auto& p : map.points)
    out << num(p.B) << ',' << num(p.V0) << ',' << num(p.A) << ',' << (p.valid ? 1 : 0) << ','
        << num(p.abscissa) << ',' << (map.b_star ? num(*map.b_star) : "nan") << ','
        << num(map.a_crit) << ',' << (p.above_b_star ? 1 : 0) << ',' << (p.above_a_crit ? 1 : 0)
        << '\n';
}

namespace scripts {

inline std::string summary_plot()
{
  return R"(import sys
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("summary.csv")
fig, ax = plt.subplots(1, 3, figsize=(13, 3.6))
ax[0].plot(d.t, d.mass / d.mass[0] - 1.0)
ax[0].set_title("relative mass drift")
ax[1].plot(d.t, d.energy / d.energy[0] - 1.0)
ax[1].set_title("relative energy drift")
if "deviation" in d:
    ax[2].semilogy(d.t, d.deviation)
    ax[2].set_title("sup | |psi| - |phi| |")
for a in ax:
    a.set_xlabel("t")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "summary.png", dpi=150)
)";
}

inline std::string modulus_plot()
{
  return R"(import sys
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("trajectory.csv")
d["abs"] = np.hypot(d.re, d.im)
grid = d.pivot(index="t", columns="x_index", values="abs")
fig, ax = plt.subplots(figsize=(7, 4))
im = ax.imshow(grid.values, aspect="auto", origin="lower",
               extent=[0, grid.shape[1], grid.index.min(), grid.index.max()])
ax.set_xlabel("grid index")
ax.set_ylabel("t")
fig.colorbar(im, label="|psi|")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "modulus.png", dpi=150)
)";
}

inline std::string spectrum_plot()
{
  return R"(import sys
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("eigenvalues.csv", keep_default_na=False)
fig, ax = plt.subplots(figsize=(5, 6))
for mu, g in d.groupby("mu"):
    ax.scatter(g.re, g.im, s=8, label=f"mu = {mu:g}")
neg = d[d.krein == "-1"]
ax.scatter(neg.re, neg.im, s=30, facecolors="none", edgecolors="k", label="Krein -1")
ax.set_xlabel("Re lambda")
ax.set_ylabel("Im lambda")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "spectrum.png", dpi=150)
)";
}

inline std::string aes_plot()
{
  return R"(import sys
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("aes.csv")
d = d[d.epsilon > 0]
fig, ax = plt.subplots(figsize=(5, 4))
ax.loglog(d.epsilon, d.sup_error_linf, "o-", label="L-inf")
ax.loglog(d.epsilon, d.sup_error_h1, "s-", label="H1")
ax.set_xlabel("epsilon")
ax.set_ylabel("sup_t error vs local")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "aes.png", dpi=150)
)";
}

inline std::string map_plot()
{
  return R"(import sys
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

d = pd.read_csv("stability_map.csv")
grid = d.pivot(index="V0", columns="B", values="abscissa")
fig, ax = plt.subplots(figsize=(6, 4.5))
m = ax.pcolormesh(grid.columns, grid.index, np.log10(np.maximum(grid.values, 1e-16)), shading="nearest")
fig.colorbar(m, label="log10 spectral abscissa")
if np.isfinite(d.B_star.iloc[0]):
    ax.axvline(d.B_star.iloc[0], color="w", ls="--", label="B*")
ax.set_xlabel("B")
ax.set_ylabel("V0")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "stability_map.png", dpi=150)
)";
}

} // namespace scripts

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
  auto out = open(path);
  out << text;
}

} // namespace nlgp::io
