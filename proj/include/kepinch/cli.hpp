#pragma once
// Command-line front end: argv -> validated Command -> report on a stream.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 violations found by
// `certify` or `lemma-test`.

#include "kepinch/certify.hpp"
#include "kepinch/io.hpp"
#include "kepinch/regimes.hpp"
#include "kepinch/sectional.hpp"
#include "kepinch/tensor.hpp"
#include "kepinch/variational.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace kepinch::cli {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Carries the help text when --help is requested.
struct help_request : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Verb { Analyze, Sweep, Average, Oracle, Certify, Constants, LemmaTest };

struct Command {
  Verb verb = Verb::Constants;
  PinchingProfile profile;
  double phase = 0.0;
  int grid = 128;
  int refine = 200;
  std::int64_t samples = 0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  double lambda = 0.1;
  double chi = 0.0;
  std::string chi_label;
  double t_min = 0.0;
  double t_max = 1.0;
  int steps = 20;
  bool json = false;
  bool csv = false;
  std::size_t max_violations = 1000;
  std::optional<std::string> out;
};

/// Resolves sy | improved | guan | value:<x>.
inline double resolve_chi(const std::string &spec) {
  const ThresholdTable tt = thresholds();
  if (spec == "sy")
    return tt.siu_yang.chi;
  if (spec == "improved")
    return tt.improved.chi;
  if (spec == "guan")
    return tt.guan.chi;
  if (spec.rfind("value:", 0) == 0) {
    const std::string num = spec.substr(6);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(num, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != num.size())
      throw usage_error("--chi: cannot parse number in '" + spec + "'");
    return v;
  }
  throw usage_error("--chi: expected sy, improved, guan or value:<x>, got '" + spec + "'");
}

namespace detail {

inline void require(bool ok, const std::string &msg) {
  if (!ok)
    throw usage_error(msg);
}

inline void check_profile_flags(const PinchingProfile &p) {
  require(std::isfinite(p.a), "--a: must be finite");
  require(std::isfinite(p.b), "--b: must be finite");
  require(std::isfinite(p.bmod) && p.bmod >= 0.0, "--B: must be finite and >= 0");
  try {
    check_profile(p);
  } catch (const precondition_error &e) {
    throw usage_error(std::string("--a/--b/--B: ") + e.what());
  }
}

} // namespace detail

/// argv without the program name.
inline Command parse_command(const std::vector<std::string> &argv) {
  CLI::App app{"Pointwise curvature calculus of Kähler-Einstein surfaces", "kepinch"};
  app.require_subcommand(1);

  double a = 0.0, b = 0.0, bmod = 0.0, phase = 0.0, lambda = 0.1;
  double t_min = 0.0, t_max = 1.0;
  int grid = 128, refine = 200, steps = 20;
  std::optional<std::int64_t> samples;
  std::uint64_t seed = 1;
  std::size_t max_violations = 1000;
  std::string chi = "improved", out;
  bool json = false, csv = false;

  auto add_profile = [&](CLI::App *sub, bool with_B) {
    sub->add_option("--a", a, "R(1,1,1,1)")->required();
    sub->add_option("--b", b, "R(1,1,2,2)")->required();
    if (with_B)
      sub->add_option("--B", bmod, "|R(1,2,1,2)|")->required();
  };
  auto add_output = [&](CLI::App *sub, bool with_json) {
    if (with_json)
      sub->add_flag("--json", json, "emit a single JSON document");
    sub->add_option("--out", out, "write the report to this path");
  };

  auto *analyze = app.add_subcommand("analyze", "closed forms, regimes and test-function values");
  add_profile(analyze, true);
  add_output(analyze, true);

  auto *sweep = app.add_subcommand("sweep", "CSV over a grid of t = |B|/A");
  add_profile(sweep, false);
  sweep->add_option("--t-min", t_min);
  sweep->add_option("--t-max", t_max);
  sweep->add_option("--steps", steps);
  add_output(sweep, false);

  auto *average = app.add_subcommand("average", "Monte Carlo average vs closed form");
  add_profile(average, true);
  average->add_option("--phase", phase);
  average->add_option("--samples", samples);
  average->add_option("--seed", seed);
  add_output(average, true);

  auto *oracle = app.add_subcommand("oracle", "brute-force extrema vs closed form");
  add_profile(oracle, true);
  oracle->add_option("--phase", phase);
  oracle->add_option("--grid", grid);
  oracle->add_option("--refine", refine);
  auto *oracle_seed = oracle->add_option("--seed", seed, "scramble by a random unitary frame");
  add_output(oracle, true);

  auto *certify = app.add_subcommand("certify", "sample the superharmonicity inequality chain");
  certify->add_option("--chi", chi, "sy | improved | guan | value:<x>");
  certify->add_option("--lambda", lambda);
  certify->add_option("--samples", samples);
  certify->add_option("--seed", seed);
  certify->add_flag("--csv", csv, "one CSV row per violation");
  certify->add_option("--max-violations", max_violations, "violations listed in the report");
  add_output(certify, true);

  auto *constants = app.add_subcommand("constants", "threshold ladder");
  add_output(constants, true);

  auto *lemma = app.add_subcommand("lemma-test", "normal-form recovery on scrambled tensors");
  lemma->add_option("--samples", samples);
  lemma->add_option("--seed", seed);
  add_output(lemma, true);

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success &e) {
    std::ostringstream text, unused;
    app.exit(e, text, unused);
    throw help_request(text.str());
  } catch (const CLI::ParseError &e) {
    throw usage_error(e.what());
  }

  Command cmd;
  cmd.json = json;
  cmd.csv = csv;
  cmd.phase = phase;
  cmd.grid = grid;
  cmd.refine = refine;
  cmd.seed = seed;
  cmd.lambda = lambda;
  cmd.t_min = t_min;
  cmd.t_max = t_max;
  cmd.steps = steps;
  cmd.max_violations = max_violations;
  if (!out.empty())
    cmd.out = out;
  cmd.profile = {a, b, bmod, ExtremumTag::MinDirection};
  using detail::require;

  if (*analyze) {
    cmd.verb = Verb::Analyze;
    detail::check_profile_flags(cmd.profile);
  } else if (*sweep) {
    cmd.verb = Verb::Sweep;
    require(std::isfinite(a) && std::isfinite(b), "--a/--b: must be finite");
    require(2.0 * b - a > 0.0, "--a/--b: sweep needs A = 2b - a > 0");
    require(t_min >= 0.0 && t_max <= 1.0 && t_min <= t_max,
            "--t-min/--t-max: need 0 <= t-min <= t-max <= 1");
    require(steps >= 1, "--steps: must be >= 1");
  } else if (*average) {
    cmd.verb = Verb::Average;
    cmd.profile.tag = ExtremumTag::Unconstrained;
    detail::check_profile_flags(cmd.profile);
    require(std::isfinite(phase), "--phase: must be finite");
    cmd.samples = samples.value_or(100000);
    require(cmd.samples >= 100, "--samples: must be >= 100");
  } else if (*oracle) {
    cmd.verb = Verb::Oracle;
    cmd.profile.tag = ExtremumTag::Unconstrained;
    detail::check_profile_flags(cmd.profile);
    require(std::isfinite(phase), "--phase: must be finite");
    require(grid >= 8, "--grid: must be >= 8");
    require(refine >= 0, "--refine: must be >= 0");
    cmd.seed_given = oracle_seed->count() > 0;
  } else if (*certify) {
    cmd.verb = Verb::Certify;
    cmd.chi = resolve_chi(chi);
    cmd.chi_label = chi;
    require(cmd.chi > 1.0 / 3.0 && cmd.chi < 2.0 / 3.0, "--chi: must lie in (1/3, 2/3)");
    const SamplerBox box;
    require(t_of_ratio(cmd.chi) + box.t_margin < 1.0 - box.t_margin,
            "--chi: regime too close to 1/3 for the sampler margin");
    require(lambda > 0.0 && lambda < 1.0, "--lambda: must lie in (0, 1)");
    cmd.samples = samples.value_or(100000);
    require(cmd.samples >= 1, "--samples: must be >= 1");
    require(!(json && csv), "--csv: cannot be combined with --json");
  } else if (*constants) {
    cmd.verb = Verb::Constants;
  } else if (*lemma) {
    cmd.verb = Verb::LemmaTest;
    cmd.samples = samples.value_or(200);
    require(cmd.samples >= 1, "--samples: must be >= 1");
  }
  return cmd;
}

namespace detail {

inline std::string fmt_opt(const std::optional<double> &v) {
  return v ? io::fmt9(*v) : "undefined";
}

inline const char *yes_no(bool v) { return v ? "true" : "false"; }

inline io::json header(const char *verb) {
  return io::json{{"schema_version", io::kSchemaVersion}, {"command", verb}};
}

inline int run_analyze(const Command &cmd, std::ostream &os) {
  const PinchingProfile &p = cmd.profile;
  const CurvatureSummary s = curvature_summary(p);
  const RegimeReport r = classify_regimes(p);
  const PointLaplacian lap = laplacian_point(p);
  const PhiAndC pc = phi_and_C(p);
  const GuanYangValues gy = guan_yang_values(p);
  if (cmd.json) {
    io::json j = header("analyze");
    j["profile"] = io::to_json(p);
    j["summary"] = io::to_json(s);
    j["ratio"] = io::optional_to_json(r.ratio);
    j["regimes"] = io::to_json(r);
    j["laplacian"] = {{"R1111", lap.d_R1111}, {"R1212", lap.d_R1212}};
    j["phi"] = pc.phi;
    j["c_const"] = pc.c_const;
    j["guan_yang"] = {{"phi1", io::optional_to_json(gy.phi1)}, {"f", gy.f}};
    j["tensor"] = io::to_json(build_tensor(p, 0.0));
    os << j.dump(2) << '\n';
    return 0;
  }
  using io::fmt9;
  os << "profile    a=" << fmt9(p.a) << " b=" << fmt9(p.b) << " |B|=" << fmt9(p.bmod)
     << " A=" << fmt9(p.A()) << " sigma=" << fmt9(s.sigma) << " tau=" << fmt9(s.tau)
     << " rho=" << fmt9(p.rho()) << " t=" << fmt_opt(p.t()) << '\n'
     << "curvature  k_min=" << fmt9(s.k_min) << " k_max=" << fmt9(s.k_max)
     << " k_av=" << fmt9(s.k_av) << '\n'
     << "loci       min=" << to_string(s.locus_min) << " max=" << to_string(s.locus_max) << '\n'
     << "ratio      " << fmt_opt(r.ratio) << '\n'
     << "regimes    ball_like=" << yes_no(r.ball_like)
     << " nonpositive_bisectional=" << yes_no(r.nonpositive_bisectional)
     << " siu_yang=" << yes_no(r.in_siu_yang) << " improved=" << yes_no(r.in_improved)
     << " guan=" << yes_no(r.in_guan) << '\n'
     << "laplacian  R1111=" << fmt9(lap.d_R1111) << " R1212=" << fmt9(lap.d_R1212) << '\n'
     << "phi        " << fmt9(pc.phi) << " C=" << fmt9(pc.c_const) << '\n'
     << "guan-yang  phi1=" << fmt_opt(gy.phi1) << " f=" << fmt9(gy.f) << '\n';
  return 0;
}

inline int run_sweep(const Command &cmd, std::ostream &os) {
  os << "t,ratio,in_sy,in_improved,in_guan,phi,c_const\n";
  const double big_a = 2.0 * cmd.profile.b - cmd.profile.a;
  for (int i = 0; i <= cmd.steps; ++i) {
    const double t = i == cmd.steps ? cmd.t_max
                                    : cmd.t_min + (cmd.t_max - cmd.t_min) * i / cmd.steps;
    const PinchingProfile p{cmd.profile.a, cmd.profile.b, t * big_a, ExtremumTag::MinDirection};
    const RegimeReport r = classify_regimes(p);
    const PhiAndC pc = phi_and_C(p);
    os << io::fmt_full(t) << ',' << (r.ratio ? io::fmt_full(*r.ratio) : "") << ','
       << int(r.in_siu_yang) << ',' << int(r.in_improved) << ',' << int(r.in_guan) << ','
       << io::fmt_full(pc.phi) << ',' << io::fmt_full(pc.c_const) << '\n';
  }
  return 0;
}

inline int run_average(const Command &cmd, std::ostream &os) {
  const CurvatureTensor t = build_tensor(cmd.profile, cmd.phase);
  const McEstimate mc = average_mc(t, cmd.samples, cmd.seed);
  const double closed = curvature_summary(cmd.profile).k_av;
  const double quad = gauss_average(t);
  const double z = mc.std_error > 0.0 ? (mc.estimate - closed) / mc.std_error : 0.0;
  const bool within = std::abs(mc.estimate - closed) <= 4.0 * mc.std_error;
  if (cmd.json) {
    io::json j = header("average");
    j["profile"] = io::to_json(cmd.profile);
    j["phase"] = cmd.phase;
    j["samples"] = cmd.samples;
    j["seed"] = cmd.seed;
    j["estimate"] = mc.estimate;
    j["std_error"] = mc.std_error;
    j["closed_form"] = closed;
    j["quadrature"] = quad;
    j["z_score"] = z;
    j["within_4_sigma"] = within;
    os << j.dump(2) << '\n';
    return 0;
  }
  os << "monte-carlo  " << io::fmt9(mc.estimate) << " +- " << io::fmt9(mc.std_error) << " (n="
     << cmd.samples << ", seed=" << cmd.seed << ")\n"
     << "closed-form  " << io::fmt9(closed) << '\n'
     << "quadrature   " << io::fmt9(quad) << '\n'
     << "z-score      " << io::fmt9(z) << (within ? "  (within 4 sigma)" : "  (outside 4 sigma)")
     << '\n';
  return 0;
}

inline int run_oracle(const Command &cmd, std::ostream &os) {
  CurvatureTensor t = build_tensor(cmd.profile, cmd.phase);
  if (cmd.seed_given) {
    std::mt19937_64 rng(cmd.seed);
    t = frame_change(t, random_unitary(rng));
  }
  const BruteExtrema be = brute_extrema(t, cmd.grid, cmd.refine);
  const CurvatureSummary s = curvature_summary(cmd.profile);
  const double err_min = std::abs(be.k_min - s.k_min);
  const double err_max = std::abs(be.k_max - s.k_max);
  if (cmd.json) {
    io::json j = header("oracle");
    j["profile"] = io::to_json(cmd.profile);
    j["phase"] = cmd.phase;
    j["scrambled"] = cmd.seed_given;
    j["grid"] = cmd.grid;
    j["refine"] = cmd.refine;
    j["brute"] = {{"k_min", be.k_min},
                  {"k_max", be.k_max},
                  {"argmin", io::to_json(be.argmin)},
                  {"argmax", io::to_json(be.argmax)}};
    j["closed_form"] = {{"k_min", s.k_min}, {"k_max", s.k_max}};
    j["abs_error"] = {{"k_min", err_min}, {"k_max", err_max}};
    os << j.dump(2) << '\n';
    return 0;
  }
  os << "brute-force  k_min=" << io::fmt9(be.k_min) << " k_max=" << io::fmt9(be.k_max) << '\n'
     << "closed-form  k_min=" << io::fmt9(s.k_min) << " k_max=" << io::fmt9(s.k_max) << '\n'
     << "abs-error    k_min=" << io::fmt9(err_min) << " k_max=" << io::fmt9(err_max) << '\n';
  return 0;
}

inline int run_certify(const Command &cmd, std::ostream &os) {
  CertifyOptions opts;
  opts.max_recorded = cmd.max_violations;
  const CertificationReport rep = certify_regime(cmd.chi, cmd.lambda, cmd.samples, cmd.seed, opts);
  const int code = rep.total_violations() > 0 ? 2 : 0;
  if (cmd.csv) {
    io::write_csv(os, rep);
    return code;
  }
  if (cmd.json) {
    io::json j = header("certify");
    j["chi_label"] = cmd.chi_label;
    const io::json body = io::to_json(rep);
    for (const auto &[k, v] : body.items())
      j[k] = v;
    os << j.dump(2) << '\n';
    return code;
  }
  os << "chi          " << io::fmt9(rep.chi) << " (" << cmd.chi_label << ")\n"
     << "lambda       " << io::fmt9(rep.lambda) << '\n'
     << "samples      " << rep.samples << " (seed " << rep.seed << ")\n"
     << "min_margin   " << io::fmt9(rep.min_margin) << '\n'
     << "product      [" << io::fmt9(rep.product_range.first) << ", "
     << io::fmt9(rep.product_range.second) << "]\n";
  for (std::size_t c = 0; c < kCheckCount; ++c)
    os << "violations   " << std::left << std::setw(13) << to_string(static_cast<Check>(c))
       << rep.violation_counts[c] << '\n';
  return code;
}

inline int run_constants(const Command &cmd, std::ostream &os) {
  const ThresholdTable tt = thresholds();
  if (cmd.json) {
    io::json j = header("constants");
    j["thresholds"] = io::to_json(tt);
    os << j.dump(2) << '\n';
    return 0;
  }
  os << std::left << std::setw(10) << "name" << std::setw(14) << "chi" << "t_star\n";
  for (const auto &row : tt.rows())
    os << std::left << std::setw(10) << row.name << std::setw(14) << io::fmt9(row.chi)
       << io::fmt9(row.t_star) << '\n';
  return 0;
}

struct LemmaStats {
  double max_three_index = 0.0;
  double max_gradient = 0.0;
  double max_profile_error = 0.0;
  std::int64_t failures = 0;
};

/// Random MinDirection profile with a in [-10, 0), b in [a/2, 0], |B| in [0, A].
template <class Rng> PinchingProfile random_min_profile(Rng &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PinchingProfile p;
  p.a = -10.0 * (1.0 - unit(rng));
  p.b = 0.5 * p.a * unit(rng);
  p.bmod = p.A() * unit(rng);
  p.tag = ExtremumTag::MinDirection;
  return p;
}

inline int run_lemma(const Command &cmd, std::ostream &os) {
  std::mt19937_64 rng(cmd.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  LemmaStats st;
  for (std::int64_t k = 0; k < cmd.samples; ++k) {
    const PinchingProfile p = random_min_profile(rng);
    const CurvatureTensor t = frame_change(build_tensor(p, angle(rng)), random_unitary(rng));
    double three = 0.0, grad = 0.0, perr = 0.0;
    bool ok = true;
    try {
      const RecoveredProfile rec = recover_profile(t, 1e-9);
      const CurvatureTensor rot = frame_change(t, rec.frame);
      for (int i = 0; i < 16; ++i)
        if (three_equal_indices(i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1))
          three = std::max(three, std::abs(rot.components[static_cast<std::size_t>(i)]));
      grad = critical_gradient(rot, Direction{1.0, 0.0});
      perr = std::max({std::abs(rec.profile.a - p.a), std::abs(rec.profile.b - p.b),
                       std::abs(rec.profile.bmod - p.bmod)});
    } catch (const std::exception &) {
      ok = false;
    }
    ok = ok && three <= 1e-7 && grad <= 1e-6 && perr <= 1e-6;
    st.failures += ok ? 0 : 1;
    st.max_three_index = std::max(st.max_three_index, three);
    st.max_gradient = std::max(st.max_gradient, grad);
    st.max_profile_error = std::max(st.max_profile_error, perr);
  }
  if (cmd.json) {
    io::json j = header("lemma-test");
    j["samples"] = cmd.samples;
    j["seed"] = cmd.seed;
    j["max_three_index"] = st.max_three_index;
    j["max_critical_gradient"] = st.max_gradient;
    j["max_profile_error"] = st.max_profile_error;
    j["failures"] = st.failures;
    os << j.dump(2) << '\n';
  } else {
    os << "samples              " << cmd.samples << " (seed " << cmd.seed << ")\n"
       << "max three-index      " << io::fmt9(st.max_three_index) << '\n'
       << "max critical grad    " << io::fmt9(st.max_gradient) << '\n'
       << "max profile error    " << io::fmt9(st.max_profile_error) << '\n'
       << "failures             " << st.failures << '\n';
  }
  return st.failures > 0 ? 2 : 0;
}

} // namespace detail

inline int execute(const Command &cmd, std::ostream &out, std::ostream &err) {
  std::ofstream file;
  std::ostream *os = &out;
  if (cmd.out) {
    file.open(*cmd.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << *cmd.out << " for writing\n";
      return 1;
    }
    os = &file;
  }
  int code = 0;
  try {
    switch (cmd.verb) {
    case Verb::Analyze:
      code = detail::run_analyze(cmd, *os);
      break;
    case Verb::Sweep:
      code = detail::run_sweep(cmd, *os);
      break;
    case Verb::Average:
      code = detail::run_average(cmd, *os);
      break;
    case Verb::Oracle:
      code = detail::run_oracle(cmd, *os);
      break;
    case Verb::Certify:
      code = detail::run_certify(cmd, *os);
      break;
    case Verb::Constants:
      code = detail::run_constants(cmd, *os);
      break;
    case Verb::LemmaTest:
      code = detail::run_lemma(cmd, *os);
      break;
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  os->flush();
  if (!*os) {
    err << "error: write failed\n";
    return 1;
  }
  return code;
}

/// Full program behaviour, argv including the program name.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args.front() == "--help" || args.front() == "-h") {
    out << "usage: kepinch <analyze|sweep|average|oracle|certify|constants|lemma-test> "
           "[flags]\n"
           "       kepinch <verb> --help\n";
    return args.empty() ? 1 : 0;
  }
  Command cmd;
  try {
    cmd = parse_command(args);
  } catch (const help_request &h) {
    out << h.what();
    return 0;
  } catch (const usage_error &e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }
  return execute(cmd, out, err);
}

} // namespace kepinch::cli
