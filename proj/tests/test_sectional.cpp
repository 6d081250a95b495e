#include "kepinch/sectional.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace kepinch;
using namespace kepinch::testing;

namespace {

const PinchingProfile kConstant{-1.0, -0.5, 0.0, ExtremumTag::MinDirection};
const PinchingProfile kSample{-3.0, -1.0, 0.5, ExtremumTag::MinDirection};
const PinchingProfile kGuanEdge{-5.0, -1.0, 1.0, ExtremumTag::MinDirection};
const double kH = std::numbers::sqrt2 / 2.0;

// 2 pi * integral_0^inf r^{2p+1} exp(-r^2) dr by composite Simpson.
double radial_moment(int p) {
  const int n = 40000;
  const double hi = 14.0, h = hi / n;
  auto f = [p](double r) { return std::pow(r, 2 * p + 1) * std::exp(-r * r); };
  double s = f(0.0) + f(hi);
  for (int k = 1; k < n; ++k)
    s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return 2.0 * std::numbers::pi * s * h / 3.0;
}

} // namespace

TEST(HoloSec, WorkedValues) {
  const CurvatureTensor t = build_tensor(kSample);
  EXPECT_DOUBLE_EQ(holo_sec(t, {1.0, 0.0}), -3.0);
  EXPECT_NEAR(holo_sec(t, {kH, kH}), -2.25, 1e-14);
  EXPECT_NEAR(holo_sec(t, {kH, complex(0.0, kH)}), -2.75, 1e-14);
}

TEST(HoloSec, RejectsNonUnitDirection) {
  EXPECT_THROW(holo_sec(build_tensor(kSample), {1.0, 1.0}), precondition_error);
}

TEST(HoloSec, InvariantUnderPhase) {
  Rng rng(21);
  for (int k = 0; k < 100; ++k) {
    const CurvatureTensor t = build_tensor(random_free_profile(rng), uniform(rng, 0, 6));
    const Direction z = random_direction(rng);
    const complex c = std::polar(1.0, uniform(rng, 0, 6));
    EXPECT_NEAR(holo_sec(t, z), holo_sec(t, {c * z.z1, c * z.z2}), 1e-12 * (1 + t.max_abs()));
  }
}

TEST(HoloSec, MatchesTheDiscForm) {
  // H = a + 2(sigma u^2 + tau v^2) with u + iv = z1 conj(z2)
  Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    const PinchingProfile p = random_free_profile(rng);
    const Direction z = random_direction(rng);
    const complex w = z.z1 * std::conj(z.z2);
    const double expect = p.a + 2.0 * (p.sigma() * w.real() * w.real() + p.tau() * w.imag() * w.imag());
    EXPECT_NEAR(holo_sec(build_tensor(p), z), expect, 1e-12 * (1 + std::abs(p.a) + std::abs(p.b) + p.bmod));
  }
}

TEST(Summary, WorkedValues) {
  const CurvatureSummary s = curvature_summary(kSample);
  EXPECT_EQ(s.k_min, -3.0);
  EXPECT_EQ(s.k_max, -2.25);
  EXPECT_NEAR(s.k_av, -8.0 / 3.0, 1e-15);
  EXPECT_EQ(s.sigma, 1.5);
  EXPECT_EQ(s.tau, 0.5);
  ASSERT_EQ(s.argmax_dirs.size(), 2u);
  EXPECT_NEAR(s.argmax_dirs[0].z1.real(), kH, 1e-15);
  EXPECT_NEAR(std::abs(s.argmax_dirs[0].z2) , kH, 1e-15);

  const CurvatureSummary c = curvature_summary(kConstant);
  EXPECT_EQ(c.k_min, -1.0);
  EXPECT_EQ(c.k_max, -1.0);
  EXPECT_NEAR(c.k_av, -1.0, 1e-15);

  const CurvatureSummary g = curvature_summary(kGuanEdge);
  EXPECT_EQ(g.k_min, -5.0);
  EXPECT_EQ(g.k_max, -3.0);
  EXPECT_EQ(g.k_av, -4.0);
  EXPECT_EQ(g.sigma, 4.0);
  EXPECT_EQ(g.tau, 2.0);
}

TEST(Summary, MaxDirectionProfile) {
  const PinchingProfile p{-1.0, -1.5, 0.5, ExtremumTag::MaxDirection};
  const CurvatureSummary s = curvature_summary(p);
  EXPECT_EQ(s.k_max, -1.0);
  EXPECT_EQ(s.k_min, -2.25);
  const BruteExtrema b = brute_extrema(build_tensor(p));
  EXPECT_NEAR(b.k_min, s.k_min, 1e-9);
  EXPECT_NEAR(b.k_max, s.k_max, 1e-9);
}

TEST(Summary, ArgumentDirectionsAttainTheExtrema) {
  Rng rng(23);
  for (int k = 0; k < 200; ++k) {
    PinchingProfile p = random_free_profile(rng);
    const CurvatureTensor t = build_tensor(p);
    const CurvatureSummary s = curvature_summary(p);
    for (const auto &d : s.argmin_dirs) {
      EXPECT_NEAR(holo_sec(t, d), s.k_min, 1e-12 * (1 + t.max_abs()));
    }
    for (const auto &d : s.argmax_dirs) {
      EXPECT_NEAR(holo_sec(t, d), s.k_max, 1e-12 * (1 + t.max_abs()));
    }
    for (int j = 0; j < 20; ++j) {
      const double h = holo_sec(t, random_direction(rng));
      EXPECT_GE(h, s.k_min - 1e-12 * (1 + t.max_abs()));
      EXPECT_LE(h, s.k_max + 1e-12 * (1 + t.max_abs()));
    }
  }
}

TEST(Brute, MatchesClosedForm) {
  const BruteExtrema b = brute_extrema(build_tensor(kSample), 128);
  EXPECT_NEAR(b.k_min, -3.0, 1e-6);
  EXPECT_NEAR(b.k_max, -2.25, 1e-6);
  EXPECT_NEAR(holo_sec(build_tensor(kSample), b.argmax), b.k_max, 1e-14);
}

TEST(Brute, ConstantTensor) {
  // exact up to the rounding of |z| = 1 on the grid
  const BruteExtrema b = brute_extrema(build_tensor(kConstant));
  EXPECT_NEAR(b.k_min, -1.0, 1e-14);
  EXPECT_NEAR(b.k_max, -1.0, 1e-14);
}

TEST(Brute, FrameInvariant) {
  Rng rng(24);
  for (int k = 0; k < 5; ++k) {
    const BruteExtrema b = brute_extrema(frame_change(build_tensor(kGuanEdge), random_unitary(rng)));
    EXPECT_NEAR(b.k_min, -5.0, 1e-6);
    EXPECT_NEAR(b.k_max, -3.0, 1e-6);
  }
  const BruteExtrema ref = brute_extrema(build_tensor(kSample));
  const BruteExtrema rot = brute_extrema(frame_change(build_tensor(kSample), random_unitary(rng)));
  EXPECT_NEAR(ref.k_min, rot.k_min, 1e-9);
  EXPECT_NEAR(ref.k_max, rot.k_max, 1e-9);
}

TEST(Brute, RandomProfilesAgreeWithSummary) {
  Rng rng(25);
  for (int k = 0; k < 100; ++k) {
    const PinchingProfile p = random_min_profile(rng);
    const CurvatureSummary s = curvature_summary(p);
    const BruteExtrema b = brute_extrema(build_tensor(p, uniform(rng, 0, 6)), 64);
    EXPECT_NEAR(b.k_min, s.k_min, 1e-6);
    EXPECT_NEAR(b.k_max, s.k_max, 1e-6);
  }
}

TEST(Brute, RejectsCoarseGrid) {
  EXPECT_THROW(brute_extrema(build_tensor(kSample), 4), precondition_error);
}

TEST(Brute, DeterministicArgument) {
  const CurvatureTensor t = build_tensor(kSample, 0.4);
  const BruteExtrema x = brute_extrema(t), y = brute_extrema(t);
  EXPECT_EQ(x.argmin.coords(), y.argmin.coords());
  EXPECT_EQ(x.argmax.coords(), y.argmax.coords());
}

TEST(Gauss, MomentValues) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_DOUBLE_EQ(gauss_moment(1, 1), pi2);
  EXPECT_DOUBLE_EQ(gauss_moment(2, 0), 2.0 * pi2);
  EXPECT_DOUBLE_EQ(gauss_moment(0, 0), pi2);
  EXPECT_THROW(gauss_moment(-1, 0), precondition_error);
  EXPECT_THROW(gauss_moment(15, 6), precondition_error);
}

TEST(Gauss, MomentsAgreeWithRadialQuadrature) {
  for (int p = 0; p <= 5; ++p)
    for (int q = 0; q <= 5; ++q) {
      const double oracle = radial_moment(p) * radial_moment(q);
      EXPECT_NEAR(gauss_moment(p, q) / oracle, 1.0, 1e-10) << p << "," << q;
    }
}

TEST(Gauss, NormalizationIsSixPiSquared) {
  EXPECT_EQ(gauss_normalization(), 6.0 * std::numbers::pi * std::numbers::pi);
}

TEST(Gauss, QuadratureReproducesAverage) {
  Rng rng(26);
  for (int k = 0; k < 200; ++k) {
    const PinchingProfile p = random_free_profile(rng);
    const CurvatureTensor t = frame_change(build_tensor(p, uniform(rng, 0, 6)), random_unitary(rng));
    EXPECT_NEAR(gauss_average(t), curvature_summary(p).k_av, 1e-12 * (1 + t.max_abs()));
  }
}

TEST(Gauss, MonteCarloWorkedValues) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const McEstimate m = average_mc(build_tensor(kConstant), 20000, seed);
    EXPECT_LE(std::abs(m.estimate + 1.0), 4.0 * m.std_error);
  }
  const McEstimate m = average_mc(build_tensor(kSample), 100000, 42);
  EXPECT_LE(std::abs(m.estimate + 8.0 / 3.0), 4.0 * m.std_error);
  EXPECT_GT(m.std_error, 0.0);
  EXPECT_THROW(average_mc(build_tensor(kSample), 10, 1), precondition_error);
}

TEST(Gauss, MonteCarloIsSeeded) {
  const CurvatureTensor t = build_tensor(kSample);
  EXPECT_EQ(average_mc(t, 1000, 9).estimate, average_mc(t, 1000, 9).estimate);
  EXPECT_NE(average_mc(t, 1000, 9).estimate, average_mc(t, 1000, 10).estimate);
}

TEST(CriticalGradient, WorkedValues) {
  const CurvatureTensor t = build_tensor(kSample);
  EXPECT_LE(critical_gradient(t, {1.0, 0.0}), 1e-6);
  EXPECT_LE(critical_gradient(t, {kH, kH}), 1e-6);
  const double g = critical_gradient(t, {0.6, 0.8});
  EXPECT_GT(g, 1e-2);
  EXPECT_NEAR(critical_gradient(t, {0.6, 0.8}, 1e-4), g, 1e-6 * (1 + g));
  EXPECT_THROW(critical_gradient(t, {1.0, 0.0}, 0.1), precondition_error);
  EXPECT_THROW(critical_gradient(t, {1.0, 1.0}), precondition_error);
}

TEST(CriticalGradient, VanishesOnEveryArgument) {
  Rng rng(27);
  for (int k = 0; k < 50; ++k) {
    const PinchingProfile p = random_min_profile(rng);
    const CurvatureTensor t = build_tensor(p);
    const CurvatureSummary s = curvature_summary(p);
    for (const auto &d : s.argmin_dirs) {
      EXPECT_LE(critical_gradient(t, d), 1e-6 * (1 + t.max_abs()));
    }
    for (const auto &d : s.argmax_dirs) {
      EXPECT_LE(critical_gradient(t, d), 1e-6 * (1 + t.max_abs()));
    }
  }
}

TEST(Locus, WorkedValues) {
  EXPECT_EQ(extremal_locus(kSample), std::make_pair(Locus::TwoPoints, Locus::TwoPoints));
  EXPECT_EQ(extremal_locus({-3.0, -1.0, 1.0, ExtremumTag::MinDirection}),
            std::make_pair(Locus::Circle, Locus::TwoPoints));
  EXPECT_EQ(extremal_locus(kConstant), std::make_pair(Locus::AllDirections, Locus::AllDirections));
  // B = 0, A > 0: H depends on |w| only, so the maximum is a circle
  EXPECT_EQ(extremal_locus({-3.0, -1.0, 0.0, ExtremumTag::MinDirection}),
            std::make_pair(Locus::TwoPoints, Locus::Circle));
}

TEST(Recover, NormalFormIsFixed) {
  const RecoveredProfile r = recover_profile(build_tensor(kSample));
  EXPECT_NEAR(r.profile.a, -3.0, 1e-9);
  EXPECT_NEAR(r.profile.b, -1.0, 1e-9);
  EXPECT_NEAR(r.profile.bmod, 0.5, 1e-9);
  const CurvatureTensor n = frame_change(build_tensor(kSample), r.frame);
  EXPECT_LE(max_component_diff(n, build_tensor(kSample)), 1e-9);
}

TEST(Recover, ScrambledTensorsRoundTrip) {
  Rng rng(28);
  for (int k = 0; k < 20; ++k) {
    const PinchingProfile p = k == 0 ? kSample : random_min_profile(rng);
    const CurvatureTensor t = frame_change(build_tensor(p, uniform(rng, 0, 6)), random_unitary(rng));
    const RecoveredProfile r = recover_profile(t);
    EXPECT_NEAR(r.profile.a, p.a, 1e-6);
    EXPECT_NEAR(r.profile.b, p.b, 1e-6);
    EXPECT_NEAR(r.profile.bmod, p.bmod, 1e-6);
    const CurvatureTensor n = frame_change(t, r.frame);
    for (int i = 0; i < 16; ++i)
      if (three_equal_indices(i >> 3, (i >> 2) & 1, (i >> 1) & 1, i & 1)) {
        EXPECT_LE(std::abs(n.components[static_cast<std::size_t>(i)]), 1e-7);
      }
    EXPECT_LE(critical_gradient(n, {1.0, 0.0}), 1e-6);
  }
}

TEST(Recover, RejectsBrokenTensor) {
  CurvatureTensor t = build_tensor(kSample);
  t(1, 1, 1, 1) = -2.0;
  EXPECT_THROW(recover_profile(t), precondition_error);
}

TEST(Scaling, ExtremaScaleLinearly) {
  Rng rng(29);
  for (int k = 0; k < 100; ++k) {
    const PinchingProfile p = random_min_profile(rng);
    const double c = uniform(rng, 0.1, 10.0);
    const CurvatureSummary s = curvature_summary(p), sc = curvature_summary(p.scaled(c));
    EXPECT_NEAR(sc.k_min, c * s.k_min, 1e-12 * c * 10);
    EXPECT_NEAR(sc.k_max, c * s.k_max, 1e-12 * c * 10);
    EXPECT_NEAR(sc.k_av, c * s.k_av, 1e-12 * c * 10);
  }
}
