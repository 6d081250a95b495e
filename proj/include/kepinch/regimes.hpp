#pragma once
// Pinching ratio (K_av - K_min) / (K_max - K_min), the threshold ladder and
// classification of a profile against the hypotheses of the known theorems.

#include "kepinch/sectional.hpp"
#include "kepinch/tensor.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace kepinch {

/// 2 / (3 (1 + t)): the pinching ratio as a function of t = |B| / A.
inline double ratio_t_map(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw precondition_error("ratio_t_map: t must lie in [0, 1]");
  return 2.0 / (3.0 * (1.0 + t));
}

/// Inverse of ratio_t_map: t = 2 / (3 chi) - 1.
inline double t_of_ratio(double chi) {
  if (!(chi >= 1.0 / 3.0 && chi <= 2.0 / 3.0))
    throw precondition_error("t_of_ratio: chi must lie in [1/3, 2/3]");
  return 2.0 / (3.0 * chi) - 1.0;
}

struct Threshold {
  std::string name;
  double chi = 0.0;
  double t_star = 0.0;
};

struct ThresholdTable {
  Threshold lower;
  Threshold siu_yang;
  Threshold improved;
  Threshold guan;
  Threshold upper;

  std::array<Threshold, 5> rows() const {
    return {lower, siu_yang, improved, guan, upper};
  }
};

inline ThresholdTable thresholds() {
  auto row = [](std::string name, double t_star) {
    return Threshold{std::move(name), 2.0 / (3.0 * (1.0 + t_star)), t_star};
  };
  ThresholdTable tt;
  tt.lower = {"lower", 1.0 / 3.0, 1.0};
  tt.siu_yang = row("siu_yang", std::sqrt(6.0 / 11.0));
  tt.improved = row("improved", std::sqrt(1.0 / 6.0));
  tt.guan = {"guan", 0.5, 1.0 / 3.0};
  tt.upper = {"upper", 2.0 / 3.0, 0.0};
  return tt;
}

/// K_max == K_min, i.e. A = |B| = 0 for a MinDirection profile.
inline bool is_ball_like(const PinchingProfile &p) {
  return p.sigma() <= p.scale_tol();
}

inline void require_min_direction(const PinchingProfile &p, const char *op) {
  check_profile(p);
  if (p.tag != ExtremumTag::MinDirection)
    throw precondition_error(std::string(op) + ": profile must be tagged MinDirection");
}

/// (K_av - K_min) / (K_max - K_min) = 2A / (3(A + |B|)); nullopt at
/// ball-like points.
inline std::optional<double> pinching_ratio(const PinchingProfile &p) {
  require_min_direction(p, "pinching_ratio");
  if (is_ball_like(p))
    return std::nullopt;
  return (2.0 * p.A()) / (3.0 * p.sigma());
}

struct RegimeReport {
  std::optional<double> ratio;
  std::optional<double> t;
  bool ball_like = false;
  bool nonpositive_bisectional = false;
  bool in_siu_yang = false;
  bool in_improved = false;
  bool in_guan = false;
  Locus locus_min = Locus::AllDirections;
  Locus locus_max = Locus::AllDirections;
};

/// Regime membership through the polynomial forms of t >= t*:
///   guan      3|B| >= A
///   improved  6|B|^2 >= A^2
///   siu_yang  11|B|^2 >= 6 A^2
/// Ball-like points satisfy every hypothesis vacuously.
inline RegimeReport classify_regimes(const PinchingProfile &p) {
  require_min_direction(p, "classify_regimes");
  RegimeReport r;
  r.ball_like = is_ball_like(p);
  r.ratio = pinching_ratio(p);
  r.t = p.t();
  r.nonpositive_bisectional = p.a <= 0.0 && p.b <= 0.0;
  std::tie(r.locus_min, r.locus_max) = extremal_locus(p);
  if (r.ball_like) {
    r.in_siu_yang = r.in_improved = r.in_guan = true;
    return r;
  }
  const double big_a = p.A();
  const double b2 = p.bmod * p.bmod;
  const double slack = 1e-12 * big_a * big_a;
  r.in_guan = 3.0 * p.bmod >= big_a;
  r.in_improved = 6.0 * b2 - big_a * big_a >= -slack;
  r.in_siu_yang = 11.0 * b2 - 6.0 * big_a * big_a >= -slack;
  return r;
}

} // namespace kepinch
