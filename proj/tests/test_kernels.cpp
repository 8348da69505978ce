#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "nlgp/kernels.hpp"
#include "oracles.hpp"

using namespace nlgp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<KernelSpec> all_kernels()
{
  return {KernelSpec::gaussian_normalized(), KernelSpec::gaussian_raw(),
          KernelSpec::algebraic_decay(2.0), KernelSpec::algebraic_decay(3.5)};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text)
{
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

} // namespace

TEST_CASE("multiplier values")
{
  const auto gn = KernelSpec::gaussian_normalized();
  for (double s : {0.0, 1.0, 7.5, -30.0})
    CHECK(multiplier(ScaledKernel(gn, 0.0), s) == 1.0);
  CHECK_THAT(multiplier(ScaledKernel(gn, 1.0), 2.0), WithinRel(std::exp(-1.0), 1e-15));
  const double q = oracle::cosine_transform([](double x) { return std::exp(-x * x) / std::sqrt(pi); },
                                            2.0, 12.0);
  CHECK_THAT(q, WithinRel(std::exp(-1.0), 1e-11));

  const auto raw = KernelSpec::gaussian_raw();
  const double mass = 2.0 * oracle::simpson([](double x) { return std::exp(-x * x); }, 0.0, 12.0);
  CHECK_THAT(multiplier(ScaledKernel(raw, 0.0), 3.0), WithinRel(mass, 1e-12));
  CHECK_THAT(raw.l1_norm(), WithinRel(std::sqrt(pi), 1e-15));
}

TEST_CASE("closed-form transforms agree with quadrature")
{
  for (const auto& k : all_kernels()) {
    for (double s : {0.0, 0.3, 1.0, 2.5, 6.0}) {
      INFO(k.name() << " s = " << s);
      const double closed = k.zeta_hat(s);
      CHECK_THAT(k.zeta_hat_quadrature(s), WithinAbs(closed, 1e-9));
    }
  }
  // Simpson oracle for the algebraic closed form (Bessel route) on a truncated line
  const auto alg = KernelSpec::algebraic_decay(4.0);
  for (double s : {0.5, 1.0, 3.0}) {
    const double ref = oracle::cosine_transform([&](double x) { return alg.zeta(x); }, s, 4000.0);
    CHECK_THAT(alg.zeta_hat(s), WithinAbs(ref, 1e-9));
  }
}

TEST_CASE("algebraic kernels have unit mass and the right tails")
{
  for (double p : {1.5, 2.0, 3.0, 6.0}) {
    const auto k = KernelSpec::algebraic_decay(p);
    CHECK_THAT(k.zeta_hat(0.0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(k.zeta_hat(1e-13), WithinAbs(1.0, 1e-12));
  }
  CHECK_THROWS_AS(KernelSpec::algebraic_decay(1.0), error);
  CHECK_THROWS_AS(KernelSpec::algebraic_decay(std::nan("")), error);
}

TEST_CASE("convolution of a basis mode is multiplication by the symbol")
{
  const PeriodicGrid g(8 * pi, 64);
  for (const auto& k : all_kernels()) {
    const ScaledKernel kern(k, 0.37);
    for (int j : {-32, -5, 0, 1, 17, 31}) {
      const WaveField e = WaveField::basis(g, j);
      const WaveField r = convolve_periodic(kern, e);
      const WaveField diff = r - kern.multiplier(g.wavenumber(j)) * e;
      CHECK(l2_norm(diff) < 1e-12);
    }
  }
}

TEST_CASE("constant field under a unit-mass kernel")
{
  const PeriodicGrid g(2 * pi, 32);
  const WaveField c = WaveField::sample(g, [](double) { return 1.75; });
  const WaveField r = convolve_periodic(ScaledKernel(KernelSpec::gaussian_normalized(), 0.4), c);
  for (std::size_t m = 0; m < g.size(); ++m)
    CHECK(std::abs(r[m] - 1.75) < 1e-13);
}

TEST_CASE("cos(2kx) against a real-space quadrature of the convolution")
{
  const double k = 1.3, eps = 0.25;
  const PeriodicGrid g(2 * pi / k, 32);
  const ScaledKernel kern(KernelSpec::gaussian_normalized(), eps);
  const WaveField f = WaveField::sample(g, [&](double x) { return std::cos(2 * k * x); });
  const WaveField r = convolve_periodic(kern, f);
  const double expect = std::exp(-k * k * eps * eps);
  CHECK_THAT(beta(kern, k), WithinRel(expect, 1e-14));
  for (std::size_t m = 0; m < g.size(); m += 3) {
    const double x = g.point(m);
    // int R(y; eps) cos(2k(x - y)) dy with R(y; eps) = zeta(y/eps)/eps
    auto integrand = [&](double y) {
      return std::exp(-(y / eps) * (y / eps)) / (std::sqrt(pi) * eps) * std::cos(2 * k * (x - y));
    };
    const double ref = oracle::simpson_panels(integrand, -12 * eps, 12 * eps, 16);
    CHECK_THAT(r[m].real(), WithinAbs(ref, 1e-12));
    CHECK_THAT(r[m].real(), WithinAbs(expect * std::cos(2 * k * x), 1e-13));
  }
}

TEST_CASE("beta values")
{
  const auto gn = KernelSpec::gaussian_normalized();
  CHECK(beta(ScaledKernel(gn, 0.0), 1.0) == 1.0);
  CHECK_THAT(beta(ScaledKernel(gn, 1.0), 1.0), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THAT(beta(ScaledKernel(gn, 0.5), 2.0), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THROWS_AS(beta(ScaledKernel(gn, 0.5), 0.0), error);
}

TEST_CASE("hypothesis validation")
{
  SECTION("normalized Gaussian passes both sets")
  {
    const ScaledKernel k(KernelSpec::gaussian_normalized(), 0.01);
    CHECK(validate_hypotheses(k, HypothesisSet::H).all_passed());
    CHECK(validate_hypotheses(k, HypothesisSet::Hprime).all_passed());
  }
  SECTION("raw Gaussian fails only the unit mass")
  {
    const auto rep = validate_hypotheses(ScaledKernel(KernelSpec::gaussian_raw(), 0.01),
                                         HypothesisSet::H);
    REQUIRE(rep.find("H3"));
    CHECK_FALSE(rep.find("H3")->passed);
    CHECK_THAT(rep.find("H3")->measured, WithinRel(std::sqrt(pi), 1e-10));
    CHECK(rep.find("H2")->passed);
    CHECK(rep.find("H4")->passed);
    CHECK(rep.find("H5")->passed);
  }
  SECTION("smooth bump has a sign-changing transform")
  {
    const auto bump = KernelSpec::smooth_bump();
    const auto rep = validate_hypotheses(ScaledKernel(bump, 1.0), HypothesisSet::Hprime);
    CHECK(rep.find("H2'")->passed);
    CHECK_FALSE(rep.find("H3'")->passed);
    CHECK(rep.find("H3'")->measured < 0.0);
    // the bump still satisfies the H set
    CHECK(validate_hypotheses(ScaledKernel(bump, 1.0), HypothesisSet::H).all_passed());
  }
  SECTION("heavy algebraic tail fails the first-moment check")
  {
    const auto rep = validate_hypotheses(ScaledKernel(KernelSpec::algebraic_decay(1.8), 1.0),
                                         HypothesisSet::H);
    CHECK_FALSE(rep.find("H4")->passed);
    CHECK(rep.find("H3")->passed);
    CHECK(validate_hypotheses(ScaledKernel(KernelSpec::algebraic_decay(3.0), 1.0), HypothesisSet::H)
              .all_passed());
  }
  SECTION("a slowly decaying table fails the envelope check")
  {
    std::vector<std::pair<double, double>> t;
    for (int i = 0; i <= 400; ++i) {
      const double s = 2.5 * i;
      t.emplace_back(s, std::pow(1.0 + s, -0.4));
    }
    const auto rep = validate_hypotheses(ScaledKernel(KernelSpec::tabulated("slow", t), 1.0),
                                         HypothesisSet::Hprime);
    CHECK_FALSE(rep.find("H4'")->passed);
  }
}

TEST_CASE("Lipschitz gap")
{
  const auto gn = KernelSpec::gaussian_normalized();
  CHECK(lipschitz_gap(ScaledKernel(gn, 0.2), ScaledKernel(gn, 0.2), 3.0) == 0.0);
  const double gap = lipschitz_gap(ScaledKernel(gn, 0.0), ScaledKernel(gn, 0.1), 2.0);
  CHECK_THAT(gap, WithinRel(1.0 - std::exp(-0.01), 1e-12));
  CHECK(gap <= 0.1 * 2.0 / std::sqrt(pi));
  CHECK(lipschitz_gap(ScaledKernel(gn, 0.0), ScaledKernel(gn, 5.0), 0.0) == 0.0);
  CHECK_THROWS_AS(lipschitz_gap(ScaledKernel(gn, 0.1), ScaledKernel(KernelSpec::gaussian_raw(), 0.1), 1.0),
                  error);

  // first moment by oracle quadrature
  const double moment = 2.0 * oracle::simpson([](double x) { return x * std::exp(-x * x) / std::sqrt(pi); },
                                              0.0, 12.0);
  CHECK_THAT(gn.first_moment(), WithinRel(moment, 1e-12));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 2.0), us(-40.0, 40.0);
  for (const auto& k : all_kernels()) {
    if (!std::isfinite(k.first_moment()))
      continue;
    for (int i = 0; i < 200; ++i) {
      const double e1 = u(rng), e2 = u(rng), s = us(rng);
      const double bound = std::abs(e1 - e2) * std::abs(s) * k.first_moment();
      CHECK(lipschitz_gap(ScaledKernel(k, e1), ScaledKernel(k, e2), s) <= bound * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("per-mode contraction of the convolution")
{
  const PeriodicGrid g(8 * pi, 128);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (const auto& k : {KernelSpec::gaussian_normalized(), KernelSpec::algebraic_decay(3.0)}) {
    for (double eps : {0.0, 0.05, 1.0}) {
      std::vector<cplx> s(g.size());
      for (auto& v : s)
        v = cplx(n(rng), n(rng));
      std::vector<cplx> rho(g.size());
      for (std::size_t m = 0; m < s.size(); ++m)
        rho[m] = std::norm(s[m]);
      const WaveField f(g, rho);
      const WaveField r = convolve_periodic(ScaledKernel(k, eps), f);
      for (int j = g.min_mode(); j <= g.max_mode(); ++j)
        CHECK(std::abs(r.coeffs()[j]) <= std::abs(f.coeffs()[j]) * (1 + 1e-14) + 1e-300);
      for (double sob : {0.0, 1.0, 2.0})
        CHECK(hs_norm(r, sob) <= hs_norm(f, sob) * (1 + 1e-14));
    }
  }
}

TEST_CASE("multiplier decays to zero as eps grows")
{
  for (const auto& k : {KernelSpec::gaussian_normalized(), KernelSpec::algebraic_decay(2.0)}) {
    for (double s : {0.5, 2.0}) {
      double prev = std::abs(multiplier(ScaledKernel(k, 1.0), s));
      for (double eps : {10.0, 100.0, 1000.0}) {
        const double cur = std::abs(multiplier(ScaledKernel(k, eps), s));
        CHECK(cur <= prev);
        prev = cur;
      }
      CHECK(prev < 1e-6);
    }
  }
}

TEST_CASE("tabulated kernels")
{
  const auto path = temp_file("nlgp_table.csv", "s,zhat\n0,1\n1,0.5\n# comment\n2,0.0\n");
  const auto k = KernelSpec::parse("custom:" + path.string());
  CHECK(k.is_tabulated());
  CHECK_THAT(k.zeta_hat(0.5), WithinRel(0.75, 1e-15));
  CHECK(k.zeta_hat(3.0) == 0.0);
  CHECK_THAT(k.zeta_hat(-1.5), WithinRel(0.25, 1e-15));
  // zeta is the inverse cosine transform of the interpolant
  for (double x : {0.0, 0.7, 2.3}) {
    const double ref =
        oracle::simpson_panels([&](double s) { return k.zeta_hat(s) * std::cos(s * x); }, 0.0, 2.0, 4) /
        pi;
    CHECK_THAT(k.zeta(x), WithinAbs(ref, 1e-12));
  }
  CHECK(validate_hypotheses(ScaledKernel(k, 1.0), HypothesisSet::Hprime).find("H3'")->passed);

  const auto neg = temp_file("nlgp_table_neg.csv", "0,1\n1,-0.2\n2,0\n");
  const auto kn = KernelSpec::from_csv(neg);
  const auto rep = validate_hypotheses(ScaledKernel(kn, 1.0), HypothesisSet::Hprime);
  CHECK_FALSE(rep.find("H3'")->passed);

  CHECK_THROWS_AS(KernelSpec::tabulated("x", {{0.0, 1.0}}), error);
  CHECK_THROWS_AS(KernelSpec::tabulated("x", {{0.0, 1.0}, {0.0, 2.0}}), error);
  CHECK_THROWS_AS(KernelSpec::from_csv("/nonexistent/table.csv"), error);
}

TEST_CASE("kernel names parse")
{
  CHECK(KernelSpec::parse("gaussian-normalized").family() == KernelFamily::gaussian_normalized);
  CHECK(KernelSpec::parse("gaussian-raw").family() == KernelFamily::gaussian_raw);
  const auto a = KernelSpec::parse("algebraic:2.5");
  CHECK(a.family() == KernelFamily::algebraic_decay);
  CHECK(a.parameter() == 2.5);
  CHECK_THROWS_AS(KernelSpec::parse("algebraic:x"), error);
  CHECK_THROWS_AS(KernelSpec::parse("algebraic:2.5q"), error);
  CHECK_THROWS_AS(KernelSpec::parse("coulomb"), error);
}
