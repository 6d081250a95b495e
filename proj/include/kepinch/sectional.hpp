#pragma once
// Holomorphic sectional curvature over directions in C^2: closed-form
// extrema and average, the brute-force and Monte Carlo oracles, and recovery
// of the normal form from an arbitrary unitary frame.

#include "kepinch/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace kepinch {

enum class Locus { TwoPoints, Circle, AllDirections };

inline const char *to_string(Locus l) {
  switch (l) {
  case Locus::TwoPoints:
    return "TwoPoints";
  case Locus::Circle:
    return "Circle";
  case Locus::AllDirections:
    return "AllDirections";
  }
  return "?";
}

struct CurvatureSummary {
  double k_min = 0.0;
  double k_max = 0.0;
  double k_av = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  std::vector<Direction> argmin_dirs;
  std::vector<Direction> argmax_dirs;
  Locus locus_min = Locus::AllDirections;
  Locus locus_max = Locus::AllDirections;
};

namespace detail {

/// sum R(a,b,c,d) z^a conj(z^b) z^c conj(z^d), no checks.
inline complex quartic(const CurvatureTensor &t, complex z1, complex z2) {
  const std::array<complex, 2> z{z1, z2};
  const std::array<complex, 2> zb{std::conj(z1), std::conj(z2)};
  complex acc = 0.0;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be) {
      const complex left = z[al] * zb[be];
      for (int ga = 0; ga < 2; ++ga)
        for (int de = 0; de < 2; ++de)
          acc += t(al, be, ga, de) * left * z[ga] * zb[de];
    }
  return acc;
}

/// Point of CP^1 in the gauge z1 real: (cos(th/2), sin(th/2) e^{i ph}).
inline Direction bloch(double theta, double phi) {
  return {complex(std::cos(0.5 * theta), 0.0),
          std::polar(std::sin(0.5 * theta), phi)};
}

inline double default_locus_tol(double sigma) {
  return 1e-8 * std::max(1.0, std::abs(sigma));
}

inline std::vector<Direction> sorted_canonical(std::vector<Direction> dirs) {
  for (auto &d : dirs)
    d = d.canonical();
  std::sort(dirs.begin(), dirs.end(), lex_less);
  return dirs;
}

} // namespace detail

/// Holomorphic sectional curvature of T in the unit direction zeta.
inline double holo_sec(const CurvatureTensor &t, const Direction &zeta) {
  if (!(zeta.norm_residual() <= 1e-12))
    throw precondition_error("holo_sec: direction is not a unit vector");
  const complex v = detail::quartic(t, zeta.z1, zeta.z2);
  if (std::abs(v.imag()) > 1e-12 * std::max(1.0, t.max_abs()))
    throw precondition_error("holo_sec: tensor is not Hermitian (complex value)");
  return v.real();
}

//==============================================================================
// Extremal loci

/// Shape of the minimising and maximising sets in P(T_P).
///
/// In the phase-normalised frame H = a + 2(sigma u^2 + tau v^2) over the disc
/// u^2 + v^2 <= 1/4, with sigma >= tau.
inline std::pair<Locus, Locus> extremal_locus(const PinchingProfile &profile,
                                              double tol) {
  const double s = profile.sigma();
  const double t = profile.tau();
  Locus lo, hi;
  if (t > tol)
    lo = Locus::TwoPoints;
  else if (t >= -tol)
    lo = s > tol ? Locus::Circle : Locus::AllDirections;
  else
    lo = (s - t) > tol ? Locus::TwoPoints : Locus::Circle;

  if (s < -tol)
    hi = Locus::TwoPoints;
  else if (s <= tol)
    hi = t < -tol ? Locus::Circle : Locus::AllDirections;
  else
    hi = (s - t) > tol ? Locus::TwoPoints : Locus::Circle;
  return {lo, hi};
}

inline std::pair<Locus, Locus> extremal_locus(const PinchingProfile &profile) {
  return extremal_locus(profile, detail::default_locus_tol(profile.sigma()));
}

//==============================================================================
// Closed forms

/// Extremal and average holomorphic sectional curvature from the normal form.
/// Argument directions refer to build_tensor(profile, 0).
inline CurvatureSummary curvature_summary(const PinchingProfile &profile) {
  check_profile(profile);
  CurvatureSummary s;
  s.sigma = profile.sigma();
  s.tau = profile.tau();
  s.k_min = profile.a + 0.5 * std::min(0.0, s.tau);
  s.k_max = profile.a + 0.5 * std::max(0.0, s.sigma);
  s.k_av = (2.0 / 3.0) * (profile.a + profile.b);
  if (profile.tag == ExtremumTag::MinDirection)
    s.k_min = profile.a;
  if (profile.tag == ExtremumTag::MaxDirection)
    s.k_max = profile.a;

  const double tol = detail::default_locus_tol(s.sigma);
  std::tie(s.locus_min, s.locus_max) = extremal_locus(profile, tol);

  const double h = std::numbers::sqrt2 / 2.0;
  const complex i(0.0, 1.0);
  const std::vector<Direction> axes{{1.0, 0.0}, {0.0, 1.0}};
  const std::vector<Direction> real_diag{{h, h}, {h, -h}};
  const std::vector<Direction> imag_diag{{h, h * i}, {h, -h * i}};
  auto join = [](std::vector<Direction> x, const std::vector<Direction> &y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };

  // Minimum: w = z1 conj(z2) = 0 (axes), Re w = 0 (circle), or |w| = 1/2.
  switch (s.locus_min) {
  case Locus::TwoPoints:
    s.argmin_dirs = s.tau > 0.0 ? axes : imag_diag;
    break;
  case Locus::Circle:
    s.argmin_dirs = s.tau >= -tol ? join(axes, imag_diag) : join(real_diag, imag_diag);
    break;
  case Locus::AllDirections:
    s.argmin_dirs = axes;
    break;
  }
  switch (s.locus_max) {
  case Locus::TwoPoints:
    s.argmax_dirs = s.sigma > 0.0 ? real_diag : axes;
    break;
  case Locus::Circle:
    s.argmax_dirs = s.sigma <= tol ? join(axes, real_diag) : join(real_diag, imag_diag);
    break;
  case Locus::AllDirections:
    s.argmax_dirs = axes;
    break;
  }
  s.argmin_dirs = detail::sorted_canonical(std::move(s.argmin_dirs));
  s.argmax_dirs = detail::sorted_canonical(std::move(s.argmax_dirs));
  return s;
}

//==============================================================================
// Brute-force oracle

struct BruteExtrema {
  double k_min = 0.0;
  double k_max = 0.0;
  Direction argmin;
  Direction argmax;
};

namespace detail {

struct ChartPoint {
  double theta = 0.0;
  double phi = 0.0;
  double value = 0.0;
};

/// Compass search on sign * H over the Bloch chart.
inline ChartPoint compass_refine(const CurvatureTensor &t, ChartPoint start,
                                 double step, int max_iters, double sign) {
  auto f = [&](double th, double ph) {
    const Direction d = bloch(th, ph);
    return sign * quartic(t, d.z1, d.z2).real();
  };
  ChartPoint best = start;
  best.value = f(best.theta, best.phi);
  static constexpr std::array<std::array<double, 2>, 4> moves{
      {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}};
  for (int it = 0; it < max_iters && step > 1e-13; ++it) {
    bool improved = false;
    for (const auto &mv : moves) {
      const double th = best.theta + step * mv[0];
      const double ph = best.phi + step * mv[1];
      const double v = f(th, ph);
      if (v < best.value) {
        best = {th, ph, v};
        improved = true;
        break;
      }
    }
    if (!improved)
      step *= 0.5;
  }
  best.value *= sign;
  return best;
}

inline std::pair<double, Direction>
pick_extremum(const std::vector<ChartPoint> &refined, bool minimise,
              double scale) {
  double best = refined.front().value;
  for (const auto &p : refined)
    best = minimise ? std::min(best, p.value) : std::max(best, p.value);
  const double tie = 1e-12 * std::max(1.0, scale);
  std::optional<Direction> pick;
  for (const auto &p : refined) {
    if (std::abs(p.value - best) > tie)
      continue;
    const Direction d = bloch(p.theta, p.phi).canonical();
    if (!pick || lex_less(d, *pick))
      pick = d;
  }
  return {best, *pick};
}

} // namespace detail

/// Grid scan of the Bloch chart (theta in [0, pi], phi in [0, 2 pi)) followed
/// by compass-search refinement from the best cells.
inline BruteExtrema brute_extrema(const CurvatureTensor &t, int grid_n = 128,
                                  int refine_iters = 200) {
  if (grid_n < 8)
    throw precondition_error("brute_extrema: grid_n must be >= 8");
  if (refine_iters < 0)
    throw precondition_error("brute_extrema: refine_iters must be >= 0");

  const double dth = std::numbers::pi / grid_n;
  const double dph = 2.0 * std::numbers::pi / grid_n;
  std::vector<detail::ChartPoint> cells;
  cells.reserve(static_cast<std::size_t>((grid_n + 1) * grid_n));
  for (int i = 0; i <= grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double th = i * dth, ph = j * dph;
      const Direction d = detail::bloch(th, ph);
      cells.push_back({th, ph, detail::quartic(t, d.z1, d.z2).real()});
    }

  constexpr std::size_t kStarts = 4;
  auto refine_best = [&](bool minimise) {
    auto order = cells;
    const std::size_t k = std::min(kStarts, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                      order.end(), [&](const auto &x, const auto &y) {
                        return minimise ? x.value < y.value : x.value > y.value;
                      });
    std::vector<detail::ChartPoint> refined;
    for (std::size_t s = 0; s < k; ++s)
      refined.push_back(detail::compass_refine(t, order[s], dth, refine_iters,
                                               minimise ? 1.0 : -1.0));
    return detail::pick_extremum(refined, minimise, t.max_abs());
  };

  BruteExtrema r;
  std::tie(r.k_min, r.argmin) = refine_best(true);
  std::tie(r.k_max, r.argmax) = refine_best(false);
  return r;
}

//==============================================================================
// Gaussian averages

/// Integral over C^2 of |z1|^{2p} |z2|^{2q} exp(-r^2) = pi^2 p! q!.
inline double gauss_moment(int p, int q) {
  if (p < 0 || q < 0 || p + q > 20)
    throw precondition_error("gauss_moment: need p, q >= 0 and p + q <= 20");
  double fp = 1.0, fq = 1.0;
  for (int k = 2; k <= p; ++k)
    fp *= k;
  for (int k = 2; k <= q; ++k)
    fq *= k;
  return std::numbers::pi * std::numbers::pi * fp * fq;
}

/// Integral of r^4 exp(-r^2) over C^2, from the moment expansion
/// r^4 = |z1|^4 + 2|z1|^2|z2|^2 + |z2|^4.
inline double gauss_normalization() {
  return gauss_moment(2, 0) + 2.0 * gauss_moment(1, 1) + gauss_moment(0, 2);
}

/// Average holomorphic sectional curvature by exact Gaussian quadrature of the
/// quartic form. Monomials with {a, c} != {b, d} integrate to zero.
inline double gauss_average(const CurvatureTensor &t) {
  complex acc = 0.0;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be)
      for (int ga = 0; ga < 2; ++ga)
        for (int de = 0; de < 2; ++de) {
          if (al + ga != be + de)
            continue;
          const int q = al + ga;
          acc += t(al, be, ga, de) * gauss_moment(2 - q, q);
        }
  return acc.real() / gauss_normalization();
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo average: z has four independent N(0, 1/2) real coordinates,
/// so E[quartic] = 6 K_av.
inline McEstimate average_mc(const CurvatureTensor &t, std::int64_t n,
                             std::uint64_t seed) {
  if (n < 100)
    throw precondition_error("average_mc: n must be >= 100");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const complex z1(gauss(rng), gauss(rng));
    const complex z2(gauss(rng), gauss(rng));
    const double x = detail::quartic(t, z1, z2).real();
    const double delta = x - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (x - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);
  return {mean / 6.0, std::sqrt(var / static_cast<double>(n)) / 6.0};
}

//==============================================================================
// Critical directions

/// Norm of the central-difference gradient of H in the chart
/// (xi2, eta1, eta2) -> ((1 - xi2^2 - eta1^2 - eta2^2)^{1/2} + i eta1,
/// xi2 + i eta2), after rotating zeta to e1.
inline double critical_gradient(const CurvatureTensor &t, const Direction &zeta,
                                double h = 1e-5) {
  if (!(h > 1e-9 && h < 1e-2))
    throw precondition_error("critical_gradient: step must lie in (1e-9, 1e-2)");
  if (!(zeta.norm_residual() <= 1e-12))
    throw precondition_error("critical_gradient: direction is not a unit vector");
  const CurvatureTensor rot = frame_change(t, Unitary2::with_first_row(zeta));
  auto f = [&](double xi2, double eta1, double eta2) {
    const double xi1 = std::sqrt(1.0 - xi2 * xi2 - eta1 * eta1 - eta2 * eta2);
    return detail::quartic(rot, complex(xi1, eta1), complex(xi2, eta2)).real();
  };
  const double g0 = (f(h, 0, 0) - f(-h, 0, 0)) / (2 * h);
  const double g1 = (f(0, h, 0) - f(0, -h, 0)) / (2 * h);
  const double g2 = (f(0, 0, h) - f(0, 0, -h)) / (2 * h);
  return std::sqrt(g0 * g0 + g1 * g1 + g2 * g2);
}

struct RecoveredProfile {
  PinchingProfile profile;
  Unitary2 frame;
};

namespace detail {

/// R'(1,1,1,2) in the frame with first vector zeta; vanishes exactly when
/// zeta is critical.
inline complex critical_residual(const CurvatureTensor &t, const Direction &zeta) {
  const std::array<complex, 2> z{zeta.z1, zeta.z2};
  const std::array<complex, 2> w{-std::conj(zeta.z2), std::conj(zeta.z1)};
  complex acc = 0.0;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be)
      for (int ga = 0; ga < 2; ++ga)
        for (int de = 0; de < 2; ++de)
          acc += t(al, be, ga, de) * z[al] * std::conj(z[be]) * z[ga] *
                 std::conj(w[de]);
  return acc;
}

/// Damped Gauss-Newton on critical_residual, moving zeta along its
/// orthogonal complement. Handles the rank-deficient circle case.
inline Direction polish_critical(const CurvatureTensor &t, Direction zeta,
                                 int max_iters = 60) {
  const double scale = std::max(1.0, t.max_abs());
  auto moved = [](const Direction &base, double x, double y) {
    const complex eps(x, y);
    return Direction::normalized(base.z1 - eps * std::conj(base.z2),
                                 base.z2 + eps * std::conj(base.z1));
  };
  for (int it = 0; it < max_iters; ++it) {
    const complex r = critical_residual(t, zeta);
    if (std::abs(r) <= 1e-15 * scale)
      break;
    constexpr double h = 1e-6;
    const complex jx =
        (critical_residual(t, moved(zeta, h, 0)) - critical_residual(t, moved(zeta, -h, 0))) /
        (2 * h);
    const complex jy =
        (critical_residual(t, moved(zeta, 0, h)) - critical_residual(t, moved(zeta, 0, -h))) /
        (2 * h);
    // Normal equations of the 2x2 real system [jx jy] d = -r.
    const double a11 = std::norm(jx), a22 = std::norm(jy);
    const double a12 = (std::conj(jx) * jy).real();
    const double b1 = -(std::conj(jx) * r).real();
    const double b2 = -(std::conj(jy) * r).real();
    const double mu = 1e-14 * (a11 + a22) + 1e-300;
    const double det = (a11 + mu) * (a22 + mu) - a12 * a12;
    if (!(det > 0.0))
      break;
    const double dx = ((a22 + mu) * b1 - a12 * b2) / det;
    const double dy = ((a11 + mu) * b2 - a12 * b1) / det;
    const Direction next = moved(zeta, dx, dy);
    if (std::abs(critical_residual(t, next)) >= std::abs(r))
      break;
    zeta = next;
  }
  return zeta;
}

} // namespace detail

/// Frame in which T takes the normal form build_tensor(profile, 0) with e1 a
/// minimising direction.
inline RecoveredProfile recover_profile(const CurvatureTensor &t,
                                        double tol = 1e-9) {
  const auto violations = validate(t, tol);
  if (!violations.empty())
    throw precondition_error("recover_profile: tensor fails validation (" +
                             violations.front().invariant + ")");

  const BruteExtrema brute = brute_extrema(t, 64, 200);
  const Direction e1 = detail::polish_critical(t, brute.argmin);
  const Unitary2 u0 = Unitary2::with_first_row(e1);
  const CurvatureTensor t0 = frame_change(t, u0);

  // Rotate e2 by exp(i psi) so that R'(1,2,1,2) becomes real and >= 0.
  const complex off = t0(0, 1, 0, 1);
  const double psi = std::abs(off) > 0.0 ? 0.5 * std::arg(off) : 0.0;
  const Unitary2 frame = Unitary2::diagonal(1.0, std::polar(1.0, psi)) * u0;
  const CurvatureTensor normal = frame_change(t, frame);

  RecoveredProfile out;
  out.frame = frame;
  out.profile.a = normal(0, 0, 0, 0).real();
  out.profile.b = normal(0, 0, 1, 1).real();
  out.profile.bmod = std::abs(normal(0, 1, 0, 1));
  out.profile.tag = ExtremumTag::MinDirection;
  if (out.profile.tau() < -out.profile.scale_tol(1e-9))
    throw convergence_error("recover_profile: located direction is not a minimum");
  if (out.profile.tau() < 0.0)
    out.profile.bmod = out.profile.A();

  const CurvatureTensor expected = build_tensor(out.profile, 0.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < 16; ++k)
    worst = std::max(worst, std::abs(normal.components[k] - expected.components[k]));
  if (worst > 10.0 * tol * std::max(1.0, t.max_abs()))
    throw convergence_error("recover_profile: normal form not reached (residual " +
                            std::to_string(worst) + ")");
  return out;
}

} // namespace kepinch
