#pragma once
// Pointwise Laplacian and gradient formulas for the curvature components, and
// the test functions built from them (Phi, Phi^lambda, Phi_1, f).
//
// All functions work in the phase-normalised frame at P: B = R(1,2,1,2) is
// real and equal to profile.bmod >= 0, and the frame gauge fixes the
// derivatives of xi^1 and eta^2 to zero.

#include "kepinch/tensor.hpp"

#include <cmath>
#include <complex>
#include <optional>

namespace kepinch {

/// First-order frame and curvature derivatives at P.
struct FrameDerivatives {
  complex d1_xi2{};    // nabla_1 xi^2
  complex d2_xi2{};    // nabla_2 xi^2
  complex d1bar_xi2{}; // nabla_1bar xi^2
  complex d2bar_xi2{}; // nabla_2bar xi^2
  complex d1_R1212{};  // nabla_1 R(1,2,1,2)
  /// nabla_2bar R(1,2,1,2). When empty it is derived from
  /// A nabla_1bar xi^2 + B conj(nabla_1 xi^2).
  std::optional<complex> d2bar_R1212_explicit;

  bool finite() const {
    auto ok = [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(d1_xi2) && ok(d2_xi2) && ok(d1bar_xi2) && ok(d2bar_xi2) && ok(d1_R1212) &&
           (!d2bar_R1212_explicit || ok(*d2bar_R1212_explicit));
  }

  FrameDerivatives scaled(double s) const {
    FrameDerivatives r = *this;
    r.d1_xi2 *= s;
    r.d2_xi2 *= s;
    r.d1bar_xi2 *= s;
    r.d2bar_xi2 *= s;
    r.d1_R1212 *= s;
    if (r.d2bar_R1212_explicit)
      *r.d2bar_R1212_explicit *= s;
    return r;
  }
};

namespace detail {

/// sum_s |nabla_s xi^2|^2 + |nabla_sbar xi^2|^2
inline double xi_energy(const FrameDerivatives &fd) {
  return std::norm(fd.d1_xi2) + std::norm(fd.d2_xi2) + std::norm(fd.d1bar_xi2) +
         std::norm(fd.d2bar_xi2);
}

/// Re sum_s (nabla_s xi^2)(nabla_sbar xi^2)
inline double xi_cross(const FrameDerivatives &fd) {
  return (fd.d1_xi2 * fd.d1bar_xi2 + fd.d2_xi2 * fd.d2bar_xi2).real();
}

} // namespace detail

//==============================================================================
// Laplacians

struct PointLaplacian {
  double d_R1111 = 0.0; // Delta R(1,1,1,1)
  double d_R1212 = 0.0; // Delta R(1,2,1,2)
};

inline PointLaplacian laplacian_point(const PinchingProfile &p) {
  const double big_a = p.A(), big_b = p.bmod;
  return {-big_a * p.b + big_b * big_b, 3.0 * (p.b - big_a) * big_b};
}

struct FrameLaplacian {
  double d_S1111 = 0.0;    // Delta S(1,1,1,1)
  double re_d_S1212 = 0.0; // Re Delta S(1,2,1,2)
};

/// Laplacians of the components along the extremal frame field.
inline FrameLaplacian delta_s(const PinchingProfile &p, const FrameDerivatives &fd) {
  const double big_a = p.A(), big_b = p.bmod;
  const double energy = detail::xi_energy(fd);
  const double cross = detail::xi_cross(fd);
  const PointLaplacian lap = laplacian_point(p);
  return {-2.0 * big_a * energy - 4.0 * big_b * cross + lap.d_R1111,
          4.0 * big_a * cross + 2.0 * big_b * energy + lap.d_R1212};
}

//==============================================================================
// Covariant derivatives

struct NablaRelations {
  complex d1_R1111;     // nabla_1 R(1,1,1,1)
  complex d2_R1111;     // nabla_2 R(1,1,1,1)
  complex d1bar_R1212;  // nabla_1bar R(1,2,1,2)
  complex d2bar_R1212;  // nabla_2bar R(1,2,1,2)
  complex d1_R1112;     // nabla_1 R(1,1,1,2)
  complex d2_R1112;     // nabla_2 R(1,1,1,2)
};

/// Second-Bianchi relations between curvature derivatives and the frame
/// derivatives, using nabla_t conj(xi^2) = conj(nabla_tbar xi^2).
inline NablaRelations nabla_relations(const PinchingProfile &p,
                                      const FrameDerivatives &fd) {
  const double big_a = p.A(), big_b = p.bmod;
  const complex d1_xib = std::conj(fd.d1bar_xi2);    // nabla_1 conj(xi^2)
  const complex d2_xib = std::conj(fd.d2bar_xi2);    // nabla_2 conj(xi^2)
  const complex d1bar_xib = std::conj(fd.d1_xi2);    // nabla_1bar conj(xi^2)
  const complex d2bar_xib = std::conj(fd.d2_xi2);    // nabla_2bar conj(xi^2)
  NablaRelations n;
  n.d1_R1111 = big_a * fd.d2_xi2 + big_b * d2_xib;
  n.d2_R1111 = -big_a * d1_xib - big_b * fd.d1_xi2;
  n.d1bar_R1212 = -big_a * fd.d2bar_xi2 - big_b * d2bar_xib;
  n.d2bar_R1212 = big_a * fd.d1bar_xi2 + big_b * d1bar_xib;
  n.d1_R1112 = -big_a * fd.d1_xi2 - big_b * d1_xib;
  n.d2_R1112 = -big_a * fd.d2_xi2 - big_b * d2_xib;
  return n;
}

/// nabla_2bar R(1,2,1,2) as used by delta_phi and grad_phi.
inline complex d2bar_R1212(const PinchingProfile &p, const FrameDerivatives &fd) {
  if (fd.d2bar_R1212_explicit)
    return *fd.d2bar_R1212_explicit;
  return p.A() * fd.d1bar_xi2 + p.bmod * std::conj(fd.d1_xi2);
}

//==============================================================================
// Phi = 6|S(1,2,1,2)|^2 - (S(1,1,1,1) - 2 S(1,1,2,2))^2

struct PhiAndC {
  double phi = 0.0;
  double c_const = 0.0;
};

/// Phi = 6B^2 - A^2 and C = -6(6B^2 - A^2) R(1,1,2,2) + 30 A B^2.
inline PhiAndC phi_and_C(const PinchingProfile &p) {
  const double big_a = p.A(), b2 = p.bmod * p.bmod;
  const double phi = 6.0 * b2 - big_a * big_a;
  return {phi, -6.0 * phi * p.b + 30.0 * big_a * b2};
}

inline double delta_phi(const PinchingProfile &p, const FrameDerivatives &fd) {
  const double big_a = p.A(), big_b = p.bmod;
  const double k = big_a * big_a - big_b * big_b;
  const complex r2bar = d2bar_R1212(p, fd);
  return -30.0 * k * (std::norm(fd.d2_xi2) + std::norm(fd.d1bar_xi2)) -
         6.0 * k * (std::norm(fd.d1_xi2) + std::norm(fd.d2bar_xi2)) -
         phi_and_C(p).c_const + 6.0 * std::norm(fd.d1_R1212) + 6.0 * std::norm(r2bar);
}

struct PhiGradient {
  complex g1; // nabla_1 Phi
  complex g2; // nabla_2 Phi
};

inline PhiGradient grad_phi(const PinchingProfile &p, const FrameDerivatives &fd) {
  const double big_a = p.A(), big_b = p.bmod;
  const double k = big_a * big_a - big_b * big_b;
  const complex r2bar = d2bar_R1212(p, fd);
  return {6.0 * big_b * fd.d1_R1212 + 6.0 * k * fd.d2_xi2,
          6.0 * big_b * std::conj(r2bar) - 6.0 * k * fd.d1bar_xi2};
}

struct QValue {
  double q = 0.0;
  /// lambda Phi^{lambda - 2}; Delta Phi^lambda = factor * q. Only defined
  /// for Phi > 0.
  std::optional<double> factor;
};

/// Q = Phi Delta Phi - (1 - lambda) |nabla Phi|^2.
inline QValue q_value(const PinchingProfile &p, const FrameDerivatives &fd,
                      double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw precondition_error("q_value: lambda must lie in (0, 1)");
  const double phi = phi_and_C(p).phi;
  const PhiGradient g = grad_phi(p, fd);
  QValue out;
  out.q = phi * delta_phi(p, fd) - (1.0 - lambda) * (std::norm(g.g1) + std::norm(g.g2));
  if (phi > 0.0)
    out.factor = lambda * std::pow(phi, lambda - 2.0);
  return out;
}

//==============================================================================
// AM-GM product

template <class Scalar> struct AmgmProduct {
  /// (6(1-l)B^2/(6B^2 - A^2) - 1)(5B^2/(A^2 - B^2) - 1); empty when
  /// 6B^2 = A^2.
  std::optional<Scalar> factored;
  /// (A^2 - 6 l B^2) / (A^2 - B^2)
  Scalar closed_form;
};

/// Works for double and for exact rational scalar types.
template <class Scalar>
AmgmProduct<Scalar> amgm_product(const Scalar &big_a, const Scalar &big_b,
                                 const Scalar &lambda) {
  const Scalar a2 = big_a * big_a;
  const Scalar b2 = big_b * big_b;
  const Scalar k = a2 - b2;
  if (k == Scalar(0))
    throw precondition_error("amgm_product: degenerate denominator A^2 = B^2");
  AmgmProduct<Scalar> out{std::nullopt, (a2 - Scalar(6) * lambda * b2) / k};
  const Scalar phi = Scalar(6) * b2 - a2;
  if (phi != Scalar(0)) {
    const Scalar left = Scalar(6) * (Scalar(1) - lambda) * b2 / phi - Scalar(1);
    const Scalar right = Scalar(5) * b2 / k - Scalar(1);
    out.factored = left * right;
  }
  return out;
}

inline AmgmProduct<double> amgm_product(const PinchingProfile &p, double lambda) {
  return amgm_product<double>(p.A(), p.bmod, lambda);
}

//==============================================================================
// Test functions of the later arguments

struct GuanYangValues {
  std::optional<double> phi1; // |B|^2 / A^2
  double f = 0.0;             // real cube root of 3B - A
};

inline GuanYangValues guan_yang_values(const PinchingProfile &p) {
  const double big_a = p.A();
  GuanYangValues out;
  if (big_a != 0.0)
    out.phi1 = (p.bmod * p.bmod) / (big_a * big_a);
  out.f = std::cbrt(3.0 * p.bmod - big_a);
  return out;
}

} // namespace kepinch
