#pragma once
// Randomised certification of the superharmonicity chain for Phi^lambda:
// draw (profile, frame derivatives) inside a regime and check every
// inequality the argument relies on.

#include "kepinch/regimes.hpp"
#include "kepinch/variational.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <utility>
#include <vector>

namespace kepinch {

/// Sampling region. Profiles have a in [a_lo, 0), b in (a/2, 0] and
/// t = |B|/A in [t*(chi) + t_margin, 1 - t_margin]; every real and imaginary
/// part of the frame derivatives is uniform in [fd_lo, fd_hi].
struct SamplerBox {
  double fd_lo = -2.0;
  double fd_hi = 2.0;
  double a_lo = -10.0;
  double t_margin = 1e-3;
};

enum class Check : std::size_t {
  DominanceFirst,
  DominanceSecond,
  QNegative,
  CPositive,
  ProductAtLeastOne,
};
inline constexpr std::size_t kCheckCount = 5;

inline const char *to_string(Check c) {
  switch (c) {
  case Check::DominanceFirst:
    return "dominance_1";
  case Check::DominanceSecond:
    return "dominance_2";
  case Check::QNegative:
    return "q_negative";
  case Check::CPositive:
    return "c_positive";
  case Check::ProductAtLeastOne:
    return "product_ge_1";
  }
  return "?";
}

struct CertViolation {
  std::int64_t sample_index = 0;
  PinchingProfile profile;
  FrameDerivatives fd;
  Check check = Check::QNegative;
  double margin = 0.0;
};

struct CertificationReport {
  double chi = 0.0;
  double lambda = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<CertViolation> violations;
  std::array<std::int64_t, kCheckCount> violation_counts{};
  bool violations_truncated = false;
  /// Smallest normalised margin over the dominance, Q and C checks.
  double min_margin = std::numeric_limits<double>::infinity();
  std::pair<double, double> product_range{std::numeric_limits<double>::infinity(),
                                          -std::numeric_limits<double>::infinity()};

  std::int64_t total_violations() const {
    std::int64_t n = 0;
    for (auto c : violation_counts)
      n += c;
    return n;
  }
};

struct CertifyOptions {
  SamplerBox box;
  std::size_t max_recorded = std::numeric_limits<std::size_t>::max();
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Per-sample margins of the sign checks, each normalised to [-1, 1];
/// negative means failed.
struct SampleMargins {
  double dominance_first = 0.0;
  double dominance_second = 0.0;
  double q_negative = 0.0;
  double c_positive = 0.0;
  double product = 0.0; // AM-GM product, closed form
};

namespace detail {

inline double rel_margin(double slack, double scale) {
  return scale > 0.0 ? slack / scale : slack;
}

} // namespace detail

/// The two dominance inequalities, the sign of Q and of C, and the AM-GM
/// product for one sample.
inline SampleMargins evaluate_sample(const PinchingProfile &p, const FrameDerivatives &fd,
                                     double lambda) {
  const double big_a = p.A(), big_b = p.bmod;
  const double k = big_a * big_a - big_b * big_b;
  const PhiAndC pc = phi_and_C(p);
  const complex r2bar = d2bar_R1212(p, fd);

  SampleMargins m;
  {
    const double lhs = pc.phi * 6.0 * std::norm(fd.d1_R1212);
    const double rhs = (1.0 - lambda) * 36.0 * std::norm(big_b * fd.d1_R1212 + k * fd.d2_xi2) +
                       pc.phi * 30.0 * k * std::norm(fd.d2_xi2);
    m.dominance_first = detail::rel_margin(rhs - lhs, std::abs(lhs) + std::abs(rhs));
  }
  {
    const double lhs = pc.phi * 6.0 * std::norm(r2bar);
    const double rhs = (1.0 - lambda) * 36.0 * std::norm(big_b * r2bar - k * fd.d1bar_xi2) +
                       pc.phi * 30.0 * k * std::norm(fd.d1bar_xi2);
    m.dominance_second = detail::rel_margin(rhs - lhs, std::abs(lhs) + std::abs(rhs));
  }
  {
    const PhiGradient g = grad_phi(p, fd);
    const double first = pc.phi * delta_phi(p, fd);
    const double second = (1.0 - lambda) * (std::norm(g.g1) + std::norm(g.g2));
    m.q_negative = detail::rel_margin(-(first - second), std::abs(first) + second);
  }
  m.c_positive = detail::rel_margin(
      pc.c_const, 6.0 * std::abs(pc.phi * p.b) + 30.0 * std::abs(big_a) * big_b * big_b);
  m.product = amgm_product(p, lambda).closed_form;
  return m;
}

namespace detail {

inline constexpr std::int64_t kShardSize = 4096;

struct ShardResult {
  std::vector<CertViolation> violations;
  std::array<std::int64_t, kCheckCount> counts{};
  double min_margin = std::numeric_limits<double>::infinity();
  double product_min = std::numeric_limits<double>::infinity();
  double product_max = -std::numeric_limits<double>::infinity();
};

inline std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return std::mt19937_64(seq);
}

inline ShardResult run_shard(double chi, double lambda, std::uint64_t seed, std::int64_t shard,
                             std::int64_t count, const SamplerBox &box) {
  auto rng = shard_rng(seed, static_cast<std::uint64_t>(shard));
  const double t_lo = t_of_ratio(chi) + box.t_margin;
  const double t_hi = 1.0 - box.t_margin;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> fd_part(box.fd_lo, box.fd_hi);
  auto fd_value = [&] {
    const double re = fd_part(rng);
    return complex(re, fd_part(rng));
  };

  ShardResult out;
  for (std::int64_t k = 0; k < count; ++k) {
    PinchingProfile p;
    p.a = box.a_lo * (1.0 - unit(rng)); // [a_lo, 0)
    const double u = 1.0 - unit(rng);    // (0, 1], so A = -a u > 0
    p.b = 0.5 * p.a * (1.0 - u);
    const double t = t_lo + (t_hi - t_lo) * unit(rng);
    p.bmod = t * p.A();
    p.tag = ExtremumTag::MinDirection;

    FrameDerivatives fd;
    fd.d1_xi2 = fd_value();
    fd.d2_xi2 = fd_value();
    fd.d1bar_xi2 = fd_value();
    fd.d2bar_xi2 = fd_value();
    fd.d1_R1212 = fd_value();

    const SampleMargins m = evaluate_sample(p, fd, lambda);
    const std::int64_t index = shard * kShardSize + k;
    auto record = [&](Check c, double margin) {
      ++out.counts[static_cast<std::size_t>(c)];
      out.violations.push_back({index, p, fd, c, margin});
    };
    if (m.dominance_first < 0.0)
      record(Check::DominanceFirst, m.dominance_first);
    if (m.dominance_second < 0.0)
      record(Check::DominanceSecond, m.dominance_second);
    if (!(m.q_negative > 0.0))
      record(Check::QNegative, m.q_negative);
    if (!(m.c_positive > 0.0))
      record(Check::CPositive, m.c_positive);
    if (m.product < 1.0 - 1e-12)
      record(Check::ProductAtLeastOne, m.product - 1.0);

    out.min_margin = std::min({out.min_margin, m.dominance_first, m.dominance_second,
                               m.q_negative, m.c_positive});
    out.product_min = std::min(out.product_min, m.product);
    out.product_max = std::max(out.product_max, m.product);
  }
  return out;
}

} // namespace detail

/// Samples n points of the regime t >= t*(chi) and checks the inequality
/// chain with exponent lambda. Samples are split into fixed-size shards with
/// seeds derived from (seed, shard), so the report does not depend on the
/// number of worker threads.
inline CertificationReport certify_regime(double chi, double lambda, std::int64_t n,
                                          std::uint64_t seed,
                                          const CertifyOptions &opts = {}) {
  if (!(chi > 1.0 / 3.0 && chi < 2.0 / 3.0))
    throw precondition_error("certify_regime: chi must lie in (1/3, 2/3)");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw precondition_error("certify_regime: lambda must lie in (0, 1)");
  if (n < 1)
    throw precondition_error("certify_regime: need at least one sample");
  const SamplerBox &box = opts.box;
  if (!(box.fd_lo < box.fd_hi) || !(box.a_lo < 0.0) || !(box.t_margin >= 0.0) ||
      !(t_of_ratio(chi) + box.t_margin < 1.0 - box.t_margin))
    throw precondition_error("certify_regime: empty sampler box");

  const std::int64_t shards = (n + detail::kShardSize - 1) / detail::kShardSize;
  std::vector<detail::ShardResult> results(static_cast<std::size_t>(shards));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t s = next++; s < shards; s = next++) {
      const std::int64_t count = std::min(detail::kShardSize, n - s * detail::kShardSize);
      results[static_cast<std::size_t>(s)] =
          detail::run_shard(chi, lambda, seed, s, count, box);
    }
  };
  unsigned workers = opts.workers ? opts.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1U, static_cast<unsigned>(std::min<std::int64_t>(shards, 64)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w)
      pool.emplace_back(worker);
    worker();
  }

  CertificationReport rep;
  rep.chi = chi;
  rep.lambda = lambda;
  rep.samples = n;
  rep.seed = seed;
  for (auto &r : results) {
    for (std::size_t c = 0; c < kCheckCount; ++c)
      rep.violation_counts[c] += r.counts[c];
    for (auto &v : r.violations) {
      if (rep.violations.size() < opts.max_recorded)
        rep.violations.push_back(std::move(v));
      else
        rep.violations_truncated = true;
    }
    rep.min_margin = std::min(rep.min_margin, r.min_margin);
    rep.product_range.first = std::min(rep.product_range.first, r.product_min);
    rep.product_range.second = std::max(rep.product_range.second, r.product_max);
  }
  return rep;
}

} // namespace kepinch
