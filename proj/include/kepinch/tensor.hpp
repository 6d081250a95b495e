#pragma once
// Curvature tensor of a Kähler-Einstein surface at a single point: the
// two-parameter normal form, symmetry validation, unitary frame changes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kepinch {

using complex = std::complex<double>;

/// Thrown when an argument violates an operation's precondition.
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a bounded iterative procedure fails to reach its target.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-9;

//==============================================================================
// PinchingProfile

/// Which extremum of holomorphic sectional curvature the frame vector e1
/// realises.
enum class ExtremumTag { MinDirection, MaxDirection, Unconstrained };

inline const char *to_string(ExtremumTag tag) {
  switch (tag) {
  case ExtremumTag::MinDirection:
    return "MinDirection";
  case ExtremumTag::MaxDirection:
    return "MaxDirection";
  case ExtremumTag::Unconstrained:
    return "Unconstrained";
  }
  return "?";
}

/// Pointwise curvature state in a critical, phase-normalised unitary frame.
///   a    = R(1,1,1,1)
///   b    = R(1,1,2,2)
///   bmod = |R(1,2,1,2)|
struct PinchingProfile {
  double a = 0.0;
  double b = 0.0;
  double bmod = 0.0;
  ExtremumTag tag = ExtremumTag::MinDirection;

  double A() const { return 2.0 * b - a; }
  double sigma() const { return A() + bmod; }
  double tau() const { return A() - bmod; }
  /// Einstein contraction constant, R(1,1,1,1) + R(1,1,2,2).
  double rho() const { return a + b; }
  /// |B| / A, defined only when A > 0.
  std::optional<double> t() const {
    const double big_a = A();
    if (big_a > 0.0)
      return bmod / big_a;
    return std::nullopt;
  }

  /// Absolute slack used for sign conditions; relative to the component size.
  double scale_tol(double rel = 1e-12) const {
    return rel * std::max({1.0, std::abs(a), std::abs(b), bmod});
  }

  PinchingProfile scaled(double c) const { return {c * a, c * b, c * bmod, tag}; }
};

/// Throws precondition_error unless the profile invariants hold.
inline void check_profile(const PinchingProfile &p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.bmod))
    throw precondition_error("profile: non-finite field");
  if (p.bmod < 0.0)
    throw precondition_error("profile: |B| must be non-negative");
  if (p.tag == ExtremumTag::MinDirection && p.tau() < -p.scale_tol())
    throw precondition_error(
        "profile: MinDirection requires tau = A - |B| >= 0");
  if (p.tag == ExtremumTag::MaxDirection && p.sigma() > p.scale_tol())
    throw precondition_error(
        "profile: MaxDirection requires sigma = A + |B| <= 0");
}

//==============================================================================
// Direction

/// Unit vector in C^2.
struct Direction {
  complex z1{1.0, 0.0};
  complex z2{0.0, 0.0};

  double norm_residual() const {
    return std::abs(std::norm(z1) + std::norm(z2) - 1.0);
  }

  static Direction normalized(complex z1, complex z2) {
    const double n = std::sqrt(std::norm(z1) + std::norm(z2));
    if (!(n > 0.0) || !std::isfinite(n))
      throw precondition_error("direction: cannot normalise a zero vector");
    return {z1 / n, z2 / n};
  }

  /// Projective representative whose first non-negligible coordinate is real
  /// and positive.
  Direction canonical() const {
    const complex lead = std::abs(z1) > 1e-12 ? z1 : z2;
    const complex phase = std::conj(lead) / std::abs(lead);
    Direction d{z1 * phase, z2 * phase};
    if (std::abs(z1) > 1e-12)
      d.z1 = complex(d.z1.real(), 0.0);
    else
      d.z2 = complex(d.z2.real(), 0.0);
    return d;
  }

  std::array<double, 4> coords() const {
    return {z1.real(), z1.imag(), z2.real(), z2.imag()};
  }
};

/// Lexicographic order on (Re z1, Im z1, Re z2, Im z2).
inline bool lex_less(const Direction &lhs, const Direction &rhs) {
  return lhs.coords() < rhs.coords();
}

//==============================================================================
// Unitary frame change

/// 2x2 complex matrix expected to be unitary.
///
/// Convention: row i holds the i-th new frame vector expressed in the old
/// frame. A direction with new-frame coordinates z has old-frame coordinates
/// U^T z (see apply()).
struct Unitary2 {
  using Row = std::array<complex, 2>;
  std::array<Row, 2> m{Row{complex(1.0), complex(0.0)},
                       Row{complex(0.0), complex(1.0)}};

  static Unitary2 identity() { return {}; }

  static Unitary2 diagonal(complex d1, complex d2) {
    Unitary2 u;
    u.m[0] = {d1, complex(0.0)};
    u.m[1] = {complex(0.0), d2};
    return u;
  }

  /// Frame whose first vector is `first`; the second is its orthogonal
  /// complement (-conj z2, conj z1).
  static Unitary2 with_first_row(const Direction &first) {
    Unitary2 u;
    u.m[0] = {first.z1, first.z2};
    u.m[1] = {-std::conj(first.z2), std::conj(first.z1)};
    return u;
  }

  Unitary2 adjoint() const {
    Unitary2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.m[i][j] = std::conj(m[j][i]);
    return r;
  }

  Unitary2 operator*(const Unitary2 &rhs) const {
    Unitary2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.m[i][j] = m[i][0] * rhs.m[0][j] + m[i][1] * rhs.m[1][j];
    return r;
  }

  /// max |(U^dagger U - I)_ij|
  double unitarity_residual() const {
    const Unitary2 p = adjoint() * *this;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst, std::abs(p.m[i][j] - complex(i == j ? 1.0 : 0.0)));
    return worst;
  }
};

/// Old-frame coordinates of a direction given in the frame defined by `u`.
inline Direction apply(const Unitary2 &u, const Direction &zeta) {
  return {u.m[0][0] * zeta.z1 + u.m[1][0] * zeta.z2,
          u.m[0][1] * zeta.z1 + u.m[1][1] * zeta.z2};
}

/// Haar-distributed element of U(2).
template <class Rng> Unitary2 random_unitary(Rng &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Direction first = Direction::normalized(
      complex(gauss(rng), gauss(rng)), complex(gauss(rng), gauss(rng)));
  Unitary2 u = Unitary2::with_first_row(first);
  const complex phase = std::polar(1.0, angle(rng));
  u.m[1][0] *= phase;
  u.m[1][1] *= phase;
  return u;
}

//==============================================================================
// CurvatureTensor

/// Full table R(alpha, beta-bar, gamma, delta-bar), indices 0-based,
/// row-major in (alpha, beta, gamma, delta).
struct CurvatureTensor {
  std::array<complex, 16> components{};
  std::string frame_label;
  /// Set when e1 is known to be a critical direction, so that components
  /// with exactly three equal indices must vanish.
  bool critical_frame = false;

  static constexpr std::size_t index(int al, int be, int ga, int de) {
    return static_cast<std::size_t>(((al * 2 + be) * 2 + ga) * 2 + de);
  }
  complex &operator()(int al, int be, int ga, int de) {
    return components[index(al, be, ga, de)];
  }
  const complex &operator()(int al, int be, int ga, int de) const {
    return components[index(al, be, ga, de)];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto &c : components)
      m = std::max(m, std::abs(c));
    return m;
  }

  CurvatureTensor scaled(double c) const {
    CurvatureTensor r = *this;
    for (auto &x : r.components)
      x *= c;
    return r;
  }
};

/// True when exactly three of the four indices coincide.
inline bool three_equal_indices(int al, int be, int ga, int de) {
  const int ones = al + be + ga + de;
  return ones == 1 || ones == 3;
}

/// Tensor in a critical frame with R(1,2,1,2) = bmod * exp(i phase).
inline CurvatureTensor build_tensor(const PinchingProfile &profile,
                                    double phase = 0.0) {
  check_profile(profile);
  if (!std::isfinite(phase))
    throw precondition_error("build_tensor: non-finite phase");
  CurvatureTensor t;
  t.frame_label = "normal-form";
  t.critical_frame = true;
  t(0, 0, 0, 0) = profile.a;
  t(1, 1, 1, 1) = profile.a;
  t(0, 0, 1, 1) = profile.b;
  t(1, 1, 0, 0) = profile.b;
  t(0, 1, 1, 0) = profile.b;
  t(1, 0, 0, 1) = profile.b;
  t(0, 1, 0, 1) = std::polar(profile.bmod, phase);
  t(1, 0, 1, 0) = std::conj(t(0, 1, 0, 1));
  return t;
}

//==============================================================================
// Validation

struct Violation {
  std::string invariant;
  double residual = 0.0;
};

struct RicciTrace {
  double rho = 0.0;
  double off_diag_residual = 0.0;
  double anisotropy_residual = 0.0;
};

/// Contraction sum_alpha R(alpha, alpha, gamma, delta).
inline RicciTrace ricci_trace(const CurvatureTensor &t) {
  std::array<std::array<complex, 2>, 2> tr{};
  for (int g = 0; g < 2; ++g)
    for (int d = 0; d < 2; ++d)
      tr[g][d] = t(0, 0, g, d) + t(1, 1, g, d);
  RicciTrace r;
  r.rho = 0.5 * (tr[0][0].real() + tr[1][1].real());
  r.off_diag_residual = std::max(std::abs(tr[0][1]), std::abs(tr[1][0]));
  r.anisotropy_residual = std::abs(tr[0][0] - tr[1][1]);
  return r;
}

/// Every violated invariant with its worst residual; empty means valid.
inline std::vector<Violation> validate(const CurvatureTensor &t,
                                       double tol = kSymmetryTol) {
  std::vector<Violation> out;
  for (const auto &c : t.components) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      out.push_back({"finite components", INFINITY});
      return out;
    }
  }

  double hermitian = 0.0, exchange = 0.0, three = 0.0;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be)
      for (int ga = 0; ga < 2; ++ga)
        for (int de = 0; de < 2; ++de) {
          const complex r = t(al, be, ga, de);
          hermitian = std::max(hermitian, std::abs(r - std::conj(t(be, al, de, ga))));
          exchange = std::max(exchange, std::abs(r - t(ga, be, al, de)));
          exchange = std::max(exchange, std::abs(r - t(al, de, ga, be)));
          if (three_equal_indices(al, be, ga, de))
            three = std::max(three, std::abs(r));
        }

  const RicciTrace tr = ricci_trace(t);
  double einstein = std::max(tr.off_diag_residual, tr.anisotropy_residual);
  for (int g = 0; g < 2; ++g)
    einstein = std::max(einstein, std::abs((t(0, 0, g, g) + t(1, 1, g, g)).imag()));

  if (hermitian > tol)
    out.push_back({"Hermitian pair symmetry", hermitian});
  if (exchange > tol)
    out.push_back({"Kähler exchange symmetry", exchange});
  if (einstein > tol)
    out.push_back({"Einstein trace", einstein});
  if (t.critical_frame && three > tol)
    out.push_back({"three-equal-index vanishing", three});
  return out;
}

//==============================================================================
// Frame change

/// Components in the frame whose vectors are the rows of `u`:
///   R'(a,b,c,d) = sum R(i,j,k,l) u(a,i) conj(u(b,j)) u(c,k) conj(u(d,l)).
/// Satisfies holo_sec(frame_change(T, U), z) == holo_sec(T, apply(U, z)) and
/// frame_change(T, U * V) == frame_change(frame_change(T, V), U).
inline CurvatureTensor frame_change(const CurvatureTensor &t, const Unitary2 &u) {
  const double res = u.unitarity_residual();
  if (!(res <= kUnitaryTol))
    throw precondition_error("frame_change: matrix is not unitary (residual " +
                             std::to_string(res) + ")");
  for (const auto &c : t.components)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw precondition_error("frame_change: non-finite tensor component");

  // Contract one slot at a time; slots 1 and 3 take conjugated entries.
  std::array<complex, 16> cur = t.components;
  for (int slot = 0; slot < 4; ++slot) {
    std::array<complex, 16> next{};
    const bool conj_slot = (slot % 2) == 1;
    const int shift = 3 - slot;
    for (std::size_t idx = 0; idx < 16; ++idx) {
      const int new_i = static_cast<int>((idx >> shift) & 1U);
      complex acc = 0.0;
      for (int old_i = 0; old_i < 2; ++old_i) {
        const std::size_t src =
            (idx & ~(std::size_t{1} << shift)) |
            (static_cast<std::size_t>(old_i) << shift);
        const complex w = conj_slot ? std::conj(u.m[new_i][old_i]) : u.m[new_i][old_i];
        acc += w * cur[src];
      }
      next[idx] = acc;
    }
    cur = next;
  }

  CurvatureTensor r;
  r.components = cur;
  r.frame_label = t.frame_label.empty() ? "rotated" : "rotated(" + t.frame_label + ")";
  r.critical_frame = false;
  return r;
}

} // namespace kepinch
