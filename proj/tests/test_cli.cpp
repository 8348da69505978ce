#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlgp/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
  args.insert(args.begin(), "nlgp");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = nlgp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
  const auto p = fs::temp_directory_path() / ("nlgp_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const fs::path& p, const std::string& text)
{
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

} // namespace

TEST_CASE("help lists subcommands, flags and config keys")
{
  const auto r = invoke({"--help"});
  CHECK(r.code == 0);
  for (const char* s : {"simulate", "spectrum", "aes-sweep", "figures", "validate-kernel",
                        "stability-map", "evolution.rtol", "kernel.name", "Exit codes"})
    CHECK(r.out.find(s) != std::string::npos);
  const auto sub = invoke({"spectrum", "--help"});
  CHECK(sub.code == 0);
  for (const char* s : {"--config", "--out", "--seed", "--threads", "--kernel", "--set"})
    CHECK(sub.out.find(s) != std::string::npos);
}

TEST_CASE("configuration errors exit with 2")
{
  const auto dir = scratch("cfg");
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"spectrum", "--set", "spectrum.trunc=3", "--out", dir.string()}).code == 2);
  CHECK(invoke({"spectrum", "--set", "solution.B", "--out", dir.string()}).code == 2);
  CHECK(invoke({"spectrum", "--set", "solution.B=abc", "--out", dir.string()}).code == 2);
  CHECK(invoke({"spectrum", "--config", (dir / "missing.cfg").string()}).code == 2);

  const auto typo = write(dir / "typo.cfg", "[solution]\nB = 1\nV_0 = -1\n");
  const auto r = invoke({"spectrum", "--config", typo.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("solution.V_0") != std::string::npos);

  const auto bad = write(dir / "bad.cfg", "solution.B = 0.1\nsolution.V0 = 1\nkernel.epsilon = 0\n");
  const auto off = invoke({"simulate", "--config", bad.string(), "--out", dir.string()});
  CHECK(off.code == 2);
  CHECK(off.err.find("OffsetTooSmall") != std::string::npos);

  const auto trunc = invoke({"spectrum", "--set", "spectrum.truncation=4", "--out", dir.string()});
  CHECK(trunc.code == 2);
  CHECK(trunc.err.find("TruncationTooSmall") != std::string::npos);
  CHECK(invoke({"figures", "3c", "--out", dir.string()}).code == 2);
}

TEST_CASE("spectrum verdicts")
{
  const auto dir = scratch("spectrum");
  const auto stable = invoke({"spectrum", "--out", dir.string(), "--set", "solution.V0=0", "--set",
                              "solution.B=2", "--set", "kernel.epsilon=0", "--set",
                              "spectrum.truncation=32", "--set", "spectrum.expect=stable"});
  CHECK(stable.code == 0);
  CHECK(stable.out.find("verdict: spectrally stable") != std::string::npos);
  CHECK(stable.out.find("B* = 1 (B = 2, above)") != std::string::npos);
  for (const char* f : {"config.resolved.cfg", "eigenvalues.csv", "spectrum_summary.json",
                        "plot_spectrum.py"})
    CHECK(fs::exists(dir / f));
  const auto json = nlohmann::json::parse(slurp(dir / "spectrum_summary.json"));
  CHECK(json["verdict"] == "spectrally stable");
  CHECK(json["reports"].size() == 4);

  const auto unstable = invoke({"spectrum", "--out", dir.string(), "--set", "solution.V0=-2.46", "--set",
                                "solution.B=0.01", "--set", "kernel.epsilon=0", "--set",
                                "spectrum.truncation=32"});
  CHECK(unstable.code == 0);
  CHECK(unstable.out.find("verdict: unstable") != std::string::npos);
  CHECK(unstable.out.find("unstable-predicted") != std::string::npos);

  const auto mismatch = invoke({"spectrum", "--out", dir.string(), "--set", "solution.V0=-2.46", "--set",
                                "solution.B=0.01", "--set", "kernel.epsilon=0", "--set",
                                "spectrum.truncation=32", "--set", "spectrum.expect=stable"});
  CHECK(mismatch.code == 1);
}

TEST_CASE("validate-kernel")
{
  const auto dir = scratch("validate");
  CHECK(invoke({"validate-kernel", "--out", dir.string()}).code == 0);
  const auto raw = invoke({"validate-kernel", "--kernel", "gaussian-raw", "--out", dir.string()});
  CHECK(raw.code == 1);
  CHECK(raw.out.find("FAIL H3") != std::string::npos);
  CHECK(fs::exists(dir / "validation.json"));

  const auto table = write(dir / "neg.csv", "s,zhat\n0,1\n0.5,0.4\n1,-0.1\n2,0\n");
  const auto neg = invoke({"validate-kernel", "--kernel", "custom:" + table.string(), "--set",
                           "validate.set=Hprime", "--out", dir.string()});
  CHECK(neg.code == 1);
  CHECK(neg.out.find("FAIL H3'") != std::string::npos);
  CHECK(invoke({"validate-kernel", "--kernel", "local", "--out", dir.string()}).code == 2);
}

TEST_CASE("simulate writes outputs and reruns bit-exactly from the echo")
{
  const auto dir = scratch("simulate");
  const auto r = invoke({"simulate", "--out", (dir / "a").string(), "--seed", "7", "--set",
                         "evolution.horizon=1", "--set", "grid.modes=64", "--set", "evolution.record_every=0.25"});
  REQUIRE(r.code == 0);
  for (const char* f : {"config.resolved.cfg", "trajectory.csv", "summary.csv", "metadata.json",
                        "plot_summary.py", "plot_modulus.py"})
    CHECK(fs::exists(dir / "a" / f));
  const std::string echo = slurp(dir / "a" / "config.resolved.cfg");
  CHECK(echo.find("run.seed = 7") != std::string::npos);
  CHECK(echo.find("evolution.horizon = 1") != std::string::npos);

  const auto again = invoke({"simulate", "--config", (dir / "a" / "config.resolved.cfg").string(),
                             "--out", (dir / "b").string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));

  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "metadata.json"));
  CHECK(meta["horizon"] == 1.0);
  CHECK(meta["kernel"] == "gaussian-normalized");
}

TEST_CASE("simulate with the local model and without perturbation")
{
  const auto dir = scratch("local");
  const auto r = invoke({"simulate", "--out", dir.string(), "--kernel", "local", "--set", "perturbation.nu=0",
                         "--set", "evolution.horizon=1", "--set", "evolution.filter=off", "--set",
                         "evolution.write_states=false"});
  REQUIRE(r.code == 0);
  CHECK_FALSE(fs::exists(dir / "trajectory.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  CHECK(meta["max_deviation"].get<double>() < 1e-9);
}

TEST_CASE("blow-up exits with 3 and keeps partial output")
{
  const auto dir = scratch("blowup");
  const auto r = invoke({"simulate", "--out", dir.string(), "--set", "evolution.stepper=rk4", "--set",
                         "evolution.dt=1", "--set", "evolution.horizon=200", "--set",
                         "evolution.record_every=1", "--set", "evolution.filter=off", "--set",
                         "perturbation.nu=0.1", "--set", "perturbation.mode_cutoff=60", "--set",
                         "grid.period=6.283185307179586", "--set", "solution.V0=0"});
  CHECK(r.code == 3);
  CHECK(fs::exists(dir / "summary.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  CHECK(meta["blew_up"] == true);
}

TEST_CASE("figures, aes-sweep and stability-map run end to end")
{
  const auto dir = scratch("experiments");
  const auto fig = invoke({"figures", "1b", "--out", (dir / "fig").string(), "--set", "evolution.horizon=1",
                           "--set", "spectrum.truncation=16"});
  CHECK(fig.code == 0);
  CHECK(fig.out.find("expected outcome: reproduced") != std::string::npos);
  CHECK(fs::exists(dir / "fig" / "figure.json"));
  const auto echo = slurp(dir / "fig" / "config.resolved.cfg");
  CHECK(echo.find("figures.kernel = gaussian-raw") != std::string::npos);

  const auto norm = invoke({"figures", "2a", "--kernel", "gaussian-normalized", "--out", (dir / "fig2").string(),
                            "--set", "evolution.horizon=0.5", "--set", "spectrum.truncation=16"});
  CHECK(norm.code == 0);
  CHECK(slurp(dir / "fig2" / "figure.json").find("gaussian-normalized") != std::string::npos);

  const auto aes = invoke({"aes-sweep", "--out", (dir / "aes").string(), "--set", "grid.modes=32", "--set",
                           "aes.horizon=0.5", "--set", "aes.epsilons=0.2,0.1", "--set", "aes.min_order=0"});
  CHECK(aes.code == 0);
  CHECK(fs::exists(dir / "aes" / "aes.csv"));
  CHECK(invoke({"aes-sweep", "--kernel", "local", "--out", (dir / "aes").string()}).code == 2);

  const auto map = invoke({"stability-map", "--out", (dir / "map").string(), "--set", "map.B_values=0.5,2",
                           "--set", "map.V0_values=0", "--set", "map.truncation=12", "--threads", "2"});
  CHECK(map.code == 0);
  CHECK(fs::exists(dir / "map" / "stability_map.csv"));
  CHECK(fs::exists(dir / "map" / "plot_stability_map.py"));
}
