#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "nlgp/error.hpp"
#include "nlgp/exact_solution.hpp"
#include "nlgp/kernels.hpp"
#include "nlgp/parallel.hpp"

namespace nlgp {

// Linearization about phi in the scaled variable x -> kx, on Bloch waves
// exp(i mu x) sum_j c_j e^{-ijx}/sqrt(2 pi), j = -M..M, for (Re w, Im w).
struct BlochOperator {
  double mu = 0.0;
  int truncation = 0;
  SolutionParams params;
  Eigen::MatrixXcd L;
  Eigen::MatrixXcd JL;

  int block() const noexcept { return 2 * truncation + 1; }
  int dim() const noexcept { return 2 * block(); }
  int index(int j) const noexcept { return j + truncation; }
};

namespace bloch_detail {

// multiplication stencils from modes -M..M into -M-1..M+1
inline Eigen::MatrixXcd cos_stencil(int M)
{
  const int n = 2 * M + 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n + 2, n);
  for (int c = 0; c < n; ++c) {
    C(c, c) = 0.5;     // mode j-1
    C(c + 2, c) = 0.5; // mode j+1
  }
  return C;
}

inline Eigen::MatrixXcd sin_stencil(int M)
{
  const int n = 2 * M + 1;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n + 2, n);
  for (int c = 0; c < n; ++c) {
    S(c, c) = cplx(0.0, -0.5);
    S(c + 2, c) = cplx(0.0, 0.5);
  }
  return S;
}

inline Eigen::VectorXcd unit_cos(int M)
{
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * M + 1);
  v(M - 1) = v(M + 1) = std::sqrt(2.0 * pi) / 2.0;
  return v;
}

inline Eigen::VectorXcd unit_sin(int M)
{
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * M + 1);
  v(M - 1) = cplx(0.0, -std::sqrt(2.0 * pi) / 2.0);
  v(M + 1) = cplx(0.0, std::sqrt(2.0 * pi) / 2.0);
  return v;
}

inline Eigen::MatrixXcd apply_J(const Eigen::MatrixXcd& X)
{
  const Eigen::Index n = X.rows() / 2;
  Eigen::MatrixXcd Y(X.rows(), X.cols());
  Y.topRows(n) = X.bottomRows(n);
  Y.bottomRows(n) = -X.topRows(n);
  return Y;
}

} // namespace bloch_detail

// (cos x, sin x) pair in the block basis, scaled by (a, b)
inline Eigen::VectorXcd bloch_vector(int truncation, cplx a_cos, cplx b_sin, bool sin_first = false)
{
  using namespace bloch_detail;
  const int n = 2 * truncation + 1;
  Eigen::VectorXcd v(2 * n);
  if (!sin_first) {
    v.head(n) = a_cos * unit_cos(truncation);
    v.tail(n) = b_sin * unit_sin(truncation);
  } else {
    v.head(n) = a_cos * unit_sin(truncation);
    v.tail(n) = b_sin * unit_cos(truncation);
  }
  return v;
}

// phase-symmetry direction (sqrt(B+A) sin x, -sqrt(B) cos x)
inline Eigen::VectorXcd phase_mode(const BlochOperator& op)
{
  return bloch_vector(op.truncation, op.params.sin_amplitude(), -op.params.cos_amplitude(), true);
}

inline BlochOperator assemble(double mu, int truncation, const SolutionParams& params)
{
  using namespace bloch_detail;
  if (!(mu >= 0.0 && mu < 1.0))
    throw error(errc::invalid_mu, "Bloch parameter must lie in [0, 1)");
  if (truncation < 8)
    throw error(errc::truncation_too_small, "truncation must be at least 8");

  const int M = truncation;
  const int n = 2 * M + 1;
  const double k = params.k;
  const double a = params.cos_amplitude();
  const double b = params.sin_amplitude();
  const double al = params.alpha;

  // -k^2/2 d^2 + V0 sin^2 x + alpha R*|phi|^2 - omega on one component
  Eigen::MatrixXcd L0 = Eigen::MatrixXcd::Zero(n, n);
  const double diag = 0.5 * params.V0 + al * params.kernel_mass * (params.B + 0.5 * params.A) - params.omega;
  const double shift2 = -0.25 * params.V0 - 0.25 * al * params.A * params.beta;
  for (int j = -M; j <= M; ++j) {
    const int i = j + M;
    const double s = j - mu;
    L0(i, i) = 0.5 * k * k * s * s + diag;
    if (i + 2 < n) {
      L0(i, i + 2) = shift2;
      L0(i + 2, i) = shift2;
    }
  }

  // 2 alpha [a cos; b sin] R [a cos, b sin], exact Galerkin through the widened basis
  Eigen::VectorXcd r(n + 2);
  for (int j = -M - 1; j <= M + 1; ++j)
    r(j + M + 1) = params.kernel.multiplier(k * (j - mu));
  Eigen::MatrixXcd U(n + 2, 2 * n);
  U.leftCols(n) = a * cos_stencil(M);
  U.rightCols(n) = b * sin_stencil(M);

  BlochOperator op;
  op.mu = mu;
  op.truncation = M;
  op.params = params;
  op.L = 2.0 * al * (U.adjoint() * r.asDiagonal() * U);
  op.L.topLeftCorner(n, n) += L0;
  op.L.bottomRightCorner(n, n) += L0;
  op.JL = apply_J(op.L);
  return op;
}

enum class EigenKind { imaginary, real_axis, complex, origin };
enum class Krein { positive, negative, zero, none };

inline const char* to_string(EigenKind k)
{
  switch (k) {
  case EigenKind::imaginary: return "imaginary";
  case EigenKind::real_axis: return "real";
  case EigenKind::complex: return "complex";
  case EigenKind::origin: return "origin";
  }
  return "?";
}

inline const char* to_string(Krein k)
{
  switch (k) {
  case Krein::positive: return "+1";
  case Krein::negative: return "-1";
  case Krein::zero: return "zero-mode";
  case Krein::none: return "";
  }
  return "";
}

struct KreinCounts {
  int k_r = 0;
  int k_c = 0;
  int k_i_minus = 0;
  int n_L = 0;
};

struct EigenReport {
  double mu = 0.0;
  std::vector<cplx> eigenvalues;
  std::vector<EigenKind> kinds;
  std::vector<Krein> krein;
  std::vector<int> cluster_size; // multiplicity of the numerically coincident group
  double max_real_part = 0.0;
  KreinCounts counts;
  bool origin_clear = true;
  bool count_identity_holds = true; // vacuous when the origin is not clear
  bool deflated = false;
  int degenerate_clusters = 0;
};

inline bool is_imaginary(cplx z) { return std::abs(z.real()) < 1e-8 * (1.0 + std::abs(z)); }

namespace bloch_detail {

struct Deflation {
  bool ok = false;
  Eigen::MatrixXcd Q; // orthonormal basis of an invariant complement
};

// At mu = 0 the phase mode and its generalized partner form a Jordan block at 0.
// The orthogonal complement of span{J phi, J g} is invariant under JL.
inline Deflation deflate_phase_block(const BlochOperator& op)
{
  Deflation d;
  if (op.mu != 0.0 || !(op.params.B > 0.0))
    return d;
  const Eigen::VectorXcd phi = phase_mode(op);
  const double nphi = phi.squaredNorm();
  if ((op.L * phi).norm() > 1e-9 * std::sqrt(nphi) * (1.0 + op.L.norm()))
    return d;
  const Eigen::MatrixXcd aug = op.L + phi * phi.adjoint() / nphi;
  const Eigen::VectorXcd rhs = -apply_J(phi);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(aug);
  const Eigen::VectorXcd g = lu.solve(rhs);
  if (!g.allFinite() || (op.L * g - rhs).norm() > 1e-8 * rhs.norm() * (1.0 + op.L.norm()))
    return d;
  Eigen::MatrixXcd Y(phi.size(), 2);
  Y.col(0) = apply_J(phi);
  Y.col(1) = apply_J(g);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
  const Eigen::MatrixXcd R = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
  if (std::abs(R(1, 1)) < 1e-10 * std::abs(R(0, 0)))
    return d;
  const Eigen::MatrixXcd full = qr.householderQ() * Eigen::MatrixXcd::Identity(Y.rows(), Y.rows());
  d.Q = full.rightCols(Y.rows() - 2);
  d.ok = true;
  return d;
}

} // namespace bloch_detail

inline int negative_count(const Eigen::MatrixXcd& H)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw error(errc::eigensolve_failure, "Hermitian eigensolve failed");
  const auto& ev = es.eigenvalues();
  const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
  return static_cast<int>((ev.array() < -1e-10 * scale).count());
}

inline EigenReport spectrum(const BlochOperator& op)
{
  using namespace bloch_detail;
  EigenReport rep;
  rep.mu = op.mu;

  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
  const Deflation defl = deflate_phase_block(op);
  if (defl.ok) {
    const Eigen::MatrixXcd X = defl.Q.adjoint() * op.JL * defl.Q;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(X, true);
    if (ces.info() != Eigen::Success)
      throw error(errc::eigensolve_failure, "non-Hermitian eigensolve failed");
    values = ces.eigenvalues();
    vectors = defl.Q * ces.eigenvectors();
    rep.deflated = true;
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(op.JL, true);
    if (ces.info() != Eigen::Success)
      throw error(errc::eigensolve_failure, "non-Hermitian eigensolve failed");
    values = ces.eigenvalues();
    vectors = ces.eigenvectors();
  }

  const Eigen::Index m = values.size();
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) {
    if (values(i).imag() != values(j).imag())
      return values(i).imag() < values(j).imag();
    return values(i).real() < values(j).real();
  });

  const std::size_t extra = rep.deflated ? 2 : 0;
  rep.eigenvalues.reserve(m + extra);
  for (auto i : order)
    rep.eigenvalues.push_back(values(i));
  const std::size_t total = m + extra;
  rep.kinds.assign(total, EigenKind::complex);
  rep.krein.assign(total, Krein::none);
  rep.cluster_size.assign(total, 1);

  std::vector<Eigen::Index> imag_idx;
  for (Eigen::Index r = 0; r < m; ++r) {
    const cplx z = rep.eigenvalues[r];
    if (std::abs(z) < 1e-6)
      rep.kinds[r] = EigenKind::origin;
    else if (is_imaginary(z))
      rep.kinds[r] = EigenKind::imaginary;
    else if (std::abs(z.imag()) < 1e-8 * (1.0 + std::abs(z)))
      rep.kinds[r] = EigenKind::real_axis;
    if (rep.kinds[r] == EigenKind::imaginary || rep.kinds[r] == EigenKind::origin)
      imag_idx.push_back(r);
  }

  // Krein signs: group coincident imaginary eigenvalues, sign the Gram form on each group
  for (std::size_t s = 0; s < imag_idx.size();) {
    std::size_t e = s + 1;
    while (e < imag_idx.size()) {
      const cplx a = rep.eigenvalues[imag_idx[e - 1]], b = rep.eigenvalues[imag_idx[e]];
      if (std::abs(a - b) > 1e-6 * (1.0 + std::abs(a)))
        break;
      ++e;
    }
    const auto width = static_cast<Eigen::Index>(e - s);
    Eigen::MatrixXcd Phi(vectors.rows(), width);
    for (Eigen::Index c = 0; c < width; ++c) {
      Phi.col(c) = vectors.col(order[imag_idx[s + c]]);
      Phi.col(c).normalize();
    }
    const Eigen::MatrixXcd G = Phi.adjoint() * op.L * Phi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
    const auto& gv = ges.eigenvalues();
    for (Eigen::Index c = 0; c < width; ++c) {
      const std::size_t r = imag_idx[s + c];
      rep.cluster_size[r] = static_cast<int>(width);
      if (rep.kinds[r] == EigenKind::origin || std::abs(gv(c)) < 1e-8)
        rep.krein[r] = Krein::zero;
      else
        rep.krein[r] = gv(c) > 0.0 ? Krein::positive : Krein::negative;
    }
    if (width > 1)
      ++rep.degenerate_clusters;
    s = e;
  }

  if (rep.deflated) {
    for (std::size_t r = m; r < total; ++r) {
      rep.eigenvalues.push_back(0.0);
      rep.kinds[r] = EigenKind::origin;
      rep.krein[r] = Krein::zero;
      rep.cluster_size[r] = 2;
    }
  }

  rep.max_real_part = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < total; ++r) {
    const cplx z = rep.eigenvalues[r];
    rep.max_real_part = std::max(rep.max_real_part, z.real());
    if (rep.kinds[r] == EigenKind::origin)
      rep.origin_clear = false;
    const bool right = z.real() > 1e-8 * (1.0 + std::abs(z));
    if (right && rep.kinds[r] == EigenKind::real_axis)
      ++rep.counts.k_r;
    else if (right && rep.kinds[r] == EigenKind::complex)
      ++rep.counts.k_c;
    else if (rep.kinds[r] == EigenKind::imaginary && rep.krein[r] == Krein::negative)
      ++rep.counts.k_i_minus;
  }
  rep.counts.n_L = negative_count(op.L);
  if (rep.origin_clear)
    rep.count_identity_holds =
        rep.counts.k_r + rep.counts.k_c + rep.counts.k_i_minus == rep.counts.n_L;
  return rep;
}

// mu = r / n_periods, r = 0..n_periods-1, merged in mu order
inline std::vector<EigenReport> full_period_spectrum(int n_periods, const SolutionParams& params,
                                                     int truncation, int threads = 1)
{
  if (n_periods < 1)
    throw error(errc::invalid_argument, "number of periods must be positive");
  return parallel_map(static_cast<std::size_t>(n_periods), threads, [&](std::size_t r) {
    return spectrum(assemble(static_cast<double>(r) / n_periods, truncation, params));
  });
}

inline double spectral_abscissa(const std::vector<EigenReport>& reports)
{
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : reports)
    m = std::max(m, r.max_real_part);
  return m;
}

// largest distance from an eigenvalue of a (|Im| < im_limit) to the conjugate spectrum of b
inline double conjugation_gap(const EigenReport& a, const EigenReport& b, double im_limit)
{
  double worst = 0.0;
  for (const cplx z : a.eigenvalues) {
    if (std::abs(z.imag()) >= im_limit)
      continue;
    double best = std::numeric_limits<double>::infinity();
    for (const cplx w : b.eigenvalues)
      best = std::min(best, std::abs(z - std::conj(w)));
    worst = std::max(worst, best);
  }
  return worst;
}

// ---- V0 = 0 closed forms --------------------------------------------------

enum class Branch { positive_axis, negative_axis };

inline const char* to_string(Branch b)
{
  return b == Branch::positive_axis ? "positive" : "negative";
}

// lambda = lambda_inf + lambda_p with eigenvector phi_n - alpha_n phi~_n.
// "Type P": phi_n = (1, i) e^{-inx}, phi~_n = (1, -i) e^{-i(n-2)x}, coupling through r_{n-1};
// "type Q": phi_n = (1, -i) e^{-inx}, phi~_n = (1, i) e^{-i(n+2)x}, coupling through r_{n+1}.
struct AnalyticEigen {
  int n = 0;
  Branch branch = Branch::positive_axis;
  bool type_p = true;
  cplx lambda_inf;
  cplx lambda_p;
  double c_n = 0.0;
  double r_hat = 0.0; // coupling multiplier
  double gamma_n = 0.0;
  double delta_n = 0.0;
  double alpha_n = 0.0;

  cplx value() const { return lambda_inf + lambda_p; }
  int partner() const { return type_p ? n - 2 : n + 2; }

  Eigen::VectorXcd eigenvector(int truncation) const
  {
    const int blk = 2 * truncation + 1;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * blk);
    const double s = std::sqrt(2.0 * pi);
    const cplx i(0.0, 1.0);
    const cplx lead = type_p ? i : -i;
    auto put = [&](int mode, cplx second, cplx weight) {
      if (std::abs(mode) > truncation)
        return;
      v(mode + truncation) += weight * s;
      v(blk + mode + truncation) += weight * second * s;
    };
    put(n, lead, 1.0);
    put(partner(), -lead, -alpha_n);
    return v;
  }
};

inline void require_closed_form_regime(const SolutionParams& p)
{
  if (p.V0 != 0.0)
    throw error(errc::invalid_argument, "closed-form spectrum requires V0 = 0");
  if (p.alpha != 1)
    throw error(errc::invalid_argument, "closed-form spectrum is derived for alpha = +1");
}

inline AnalyticEigen analytic_eigen(int n, Branch branch, double mu, const SolutionParams& p)
{
  require_closed_form_regime(p);
  if (!(mu > 0.0 && mu < 1.0))
    throw error(errc::invalid_mu, "closed forms need mu in (0, 1)");
  const double k = p.k, B = p.B;
  const bool low = n == 0 || n == 1;
  AnalyticEigen e;
  e.n = n;
  e.branch = branch;
  e.type_p = (branch == Branch::positive_axis) != low;
  const int m = e.type_p ? n - 1 : n + 1;
  e.c_n = k * k * (m - mu) * (m - mu);
  e.r_hat = p.kernel.multiplier(k * (m - mu));
  const double br = B * e.r_hat;
  const double root = std::sqrt(e.c_n * e.c_n + 4.0 * e.c_n * br);
  const double sign = branch == Branch::positive_axis ? 1.0 : -1.0;
  e.lambda_inf = cplx(0.0, sign * 0.5 * k * k * std::abs((n - mu) * (n - mu) - 1.0));
  e.lambda_p = e.type_p ? cplx(0.0, 0.5 * (root - e.c_n)) : cplx(0.0, 0.5 * (e.c_n - root));
  const double ilp = (cplx(0.0, 1.0) * e.lambda_p).real();
  e.gamma_n = br / e.c_n;
  e.delta_n = e.type_p ? (br - ilp) / e.c_n : (br + ilp) / e.c_n;
  e.alpha_n = e.gamma_n / (1.0 + e.delta_n);
  return e;
}

inline std::vector<AnalyticEigen> analytic_spectrum_v0_zero(int n_min, int n_max, double mu,
                                                            const SolutionParams& p)
{
  std::vector<AnalyticEigen> out;
  for (int n = n_min; n <= n_max; ++n)
    for (Branch b : {Branch::positive_axis, Branch::negative_axis})
      out.push_back(analytic_eigen(n, b, mu, p));
  return out;
}

// <L phi, phi> = 2 pi k^2 ((n-mu)^2 - 1 + alpha_n^2 ((n' - mu)^2 - 1)) + 4 pi B r (1 - alpha_n)^2
inline double krein_form(int n, Branch branch, double mu, const SolutionParams& p)
{
  const AnalyticEigen e = analytic_eigen(n, branch, mu, p);
  const double k2 = p.k * p.k;
  const double s0 = n - mu, s1 = e.partner() - mu;
  return 2.0 * pi * k2 * (s0 * s0 - 1.0 + e.alpha_n * e.alpha_n * (s1 * s1 - 1.0)) +
         4.0 * pi * p.B * e.r_hat * (1.0 - e.alpha_n) * (1.0 - e.alpha_n);
}

struct SpectrumMatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs; // (expected, computed)
  std::vector<std::size_t> unmatched;                      // expected entries left over
  double max_gap = 0.0;
};

// One-to-one greedy pairing, closest first; gaps above reject stay unmatched.
inline SpectrumMatch match_spectra(const std::vector<cplx>& expected, const std::vector<cplx>& computed,
                                   double reject = 1e-4)
{
  struct Cand {
    double gap;
    std::size_t e, c;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < expected.size(); ++i)
    for (std::size_t j = 0; j < computed.size(); ++j) {
      const double g = std::abs(expected[i] - computed[j]);
      if (g <= reject)
        cands.push_back({g, i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.gap < b.gap; });
  std::vector<char> used_e(expected.size(), 0), used_c(computed.size(), 0);
  SpectrumMatch m;
  for (const auto& c : cands) {
    if (used_e[c.e] || used_c[c.c])
      continue;
    used_e[c.e] = used_c[c.c] = 1;
    m.pairs.emplace_back(c.e, c.c);
    m.max_gap = std::max(m.max_gap, c.gap);
  }
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (!used_e[i])
      m.unmatched.push_back(i);
  return m;
}

// min over mu in [0, 1] of zhat(k eps (n - mu)), dense sampling
inline double min_multiplier(const ScaledKernel& kern, double k, int n, int samples = 10001)
{
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double mu = static_cast<double>(i) / (samples - 1);
    m = std::min(m, kern.multiplier(k * (n - mu)));
  }
  return m;
}

inline double b_star(double k, const ScaledKernel& kern)
{
  if (!(k > 0.0))
    throw error(errc::invalid_argument, "wavenumber k must be positive");
  const double r2 = min_multiplier(kern, k, 2), rm1 = min_multiplier(kern, k, -1);
  const double r0 = min_multiplier(kern, k, 0), r1 = min_multiplier(kern, k, 1);
  for (double r : {r2, rm1, r0, r1})
    if (!(r > 0.0))
      throw error(errc::nonpositive_multiplier, "kernel transform is not positive on the Bloch band");
  const double k2 = k * k;
  return std::max({0.75 * k2 / r2, 0.75 * k2 / rm1, k2 / r0, k2 / r1});
}

// ---- small-offset instability ---------------------------------------------

inline double critical_offset_ratio()
{
  return 2.0 * (-1.0 + std::sqrt(4.0 - 6.0 / pi)) / (1.0 - 2.0 / pi);
}

inline double a_crit(double k) { return critical_offset_ratio() * k * k; }

enum class InstabilityVerdict { unstable_predicted, inconclusive };

inline const char* to_string(InstabilityVerdict v)
{
  return v == InstabilityVerdict::unstable_predicted ? "unstable-predicted" : "inconclusive";
}

// Valid for small B and eps; that smallness is the caller's to judge.
inline InstabilityVerdict instability_predicate(double A, double k)
{
  if (!(A >= 0.0))
    throw error(errc::invalid_argument, "instability predicate needs A >= 0");
  if (!(k > 0.0))
    throw error(errc::invalid_argument, "wavenumber k must be positive");
  return A >= a_crit(k) ? InstabilityVerdict::unstable_predicted : InstabilityVerdict::inconclusive;
}

// sum_j k^2 (j^2 - 1)/2 |g_j|^2 + (A/2) |g_j - g_{j+2}|^2, g indexed j + M for j = -M..M
inline double hill_quadratic_form(const Eigen::VectorXcd& g, double A, double k)
{
  const Eigen::Index n = g.size();
  if (n % 2 == 0)
    throw error(errc::invalid_argument, "coefficient vector must cover modes -M..M");
  const long M = static_cast<long>(n / 2);
  auto at = [&](long j) -> cplx { return std::abs(j) <= M ? g(j + M) : cplx(0.0); };
  double sum = 0.0;
  for (long j = -M - 2; j <= M; ++j) {
    sum += 0.5 * k * k * (double(j) * j - 1.0) * std::norm(at(j));
    sum += 0.5 * A * std::norm(at(j) - at(j + 2));
  }
  return sum;
}

struct BlockCounts {
  int n_plus = 0;  // negative directions of the (Re w) block
  int n_minus = 0; // negative directions of the (Im w) block
};

inline BlockCounts block_negative_counts(const BlochOperator& op)
{
  const int n = op.block();
  return {negative_count(op.L.topLeftCorner(n, n)), negative_count(op.L.bottomRightCorner(n, n))};
}

} // namespace nlgp
