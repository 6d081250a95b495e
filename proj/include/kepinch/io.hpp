#pragma once
// JSON and CSV encodings of tensors, summaries and reports.

#include "kepinch/certify.hpp"
#include "kepinch/regimes.hpp"
#include "kepinch/sectional.hpp"
#include "kepinch/tensor.hpp"
#include "kepinch/variational.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace kepinch::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest representation that round-trips.
inline std::string fmt_full(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// 9 significant digits, for human-readable output.
inline std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

inline complex complex_from_json(const json &j) {
  if (!j.is_array() || j.size() != 2)
    throw precondition_error("json: complex value must be a [re, im] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

template <class T> json optional_to_json(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const Direction &d) {
  return json{{"z1", complex_to_json(d.z1)}, {"z2", complex_to_json(d.z2)}};
}

/// 16 [re, im] pairs, row-major in (alpha, beta, gamma, delta).
inline json to_json(const CurvatureTensor &t) {
  json comps = json::array();
  for (const auto &c : t.components)
    comps.push_back(complex_to_json(c));
  return json{{"frame_label", t.frame_label}, {"components", comps}};
}

inline CurvatureTensor tensor_from_json(const json &j) {
  const json &comps = j.at("components");
  if (!comps.is_array() || comps.size() != 16)
    throw precondition_error("json: tensor needs exactly 16 components");
  CurvatureTensor t;
  for (std::size_t k = 0; k < 16; ++k)
    t.components[k] = complex_from_json(comps[k]);
  if (j.contains("frame_label"))
    t.frame_label = j.at("frame_label").get<std::string>();
  return t;
}

inline json to_json(const PinchingProfile &p) {
  return json{{"a", p.a},
              {"b", p.b},
              {"B", p.bmod},
              {"tag", to_string(p.tag)},
              {"A", p.A()},
              {"sigma", p.sigma()},
              {"tau", p.tau()},
              {"rho", p.rho()},
              {"t", optional_to_json(p.t())}};
}

inline json to_json(const CurvatureSummary &s) {
  json amin = json::array(), amax = json::array();
  for (const auto &d : s.argmin_dirs)
    amin.push_back(to_json(d));
  for (const auto &d : s.argmax_dirs)
    amax.push_back(to_json(d));
  return json{{"k_min", s.k_min},
              {"k_max", s.k_max},
              {"k_av", s.k_av},
              {"sigma", s.sigma},
              {"tau", s.tau},
              {"locus_min", to_string(s.locus_min)},
              {"locus_max", to_string(s.locus_max)},
              {"argmin", amin},
              {"argmax", amax}};
}

inline json to_json(const RegimeReport &r) {
  return json{{"ratio", optional_to_json(r.ratio)},
              {"t", optional_to_json(r.t)},
              {"ball_like", r.ball_like},
              {"nonpositive_bisectional", r.nonpositive_bisectional},
              {"siu_yang", r.in_siu_yang},
              {"improved", r.in_improved},
              {"guan", r.in_guan},
              {"locus_min", to_string(r.locus_min)},
              {"locus_max", to_string(r.locus_max)}};
}

inline json to_json(const ThresholdTable &tt) {
  json rows = json::array();
  for (const auto &row : tt.rows())
    rows.push_back(json{{"name", row.name}, {"chi", row.chi}, {"t_star", row.t_star}});
  return rows;
}

inline json to_json(const FrameDerivatives &fd) {
  json j{{"d1_xi2", complex_to_json(fd.d1_xi2)},
         {"d2_xi2", complex_to_json(fd.d2_xi2)},
         {"d1bar_xi2", complex_to_json(fd.d1bar_xi2)},
         {"d2bar_xi2", complex_to_json(fd.d2bar_xi2)},
         {"d1_R1212", complex_to_json(fd.d1_R1212)}};
  if (fd.d2bar_R1212_explicit)
    j["d2bar_R1212"] = complex_to_json(*fd.d2bar_R1212_explicit);
  else
    j["d2bar_R1212"] = "derived";
  return j;
}

inline json to_json(const CertificationReport &rep) {
  json counts = json::object();
  for (std::size_t c = 0; c < kCheckCount; ++c)
    counts[to_string(static_cast<Check>(c))] = rep.violation_counts[c];
  json viol = json::array();
  for (const auto &v : rep.violations)
    viol.push_back(json{{"sample", v.sample_index},
                        {"check", to_string(v.check)},
                        {"margin", v.margin},
                        {"profile", json{{"a", v.profile.a}, {"b", v.profile.b}, {"B", v.profile.bmod}}},
                        {"fd", to_json(v.fd)}});
  return json{{"chi", rep.chi},
              {"lambda", rep.lambda},
              {"samples", rep.samples},
              {"seed", rep.seed},
              {"min_margin", rep.min_margin},
              {"product_range", json::array({rep.product_range.first, rep.product_range.second})},
              {"violation_counts", counts},
              {"violations_truncated", rep.violations_truncated},
              {"violations", viol}};
}

/// One row per recorded violation.
inline void write_csv(std::ostream &os, const CertificationReport &rep) {
  os << "sample,check,margin,a,b,B";
  for (const char *name : {"d1_xi2", "d2_xi2", "d1bar_xi2", "d2bar_xi2", "d1_R1212"})
    os << ',' << name << "_re," << name << "_im";
  os << '\n';
  for (const auto &v : rep.violations) {
    os << v.sample_index << ',' << to_string(v.check) << ',' << fmt_full(v.margin) << ','
       << fmt_full(v.profile.a) << ',' << fmt_full(v.profile.b) << ','
       << fmt_full(v.profile.bmod);
    for (complex z : {v.fd.d1_xi2, v.fd.d2_xi2, v.fd.d1bar_xi2, v.fd.d2bar_xi2, v.fd.d1_R1212})
      os << ',' << fmt_full(z.real()) << ',' << fmt_full(z.imag());
    os << '\n';
  }
}

} // namespace kepinch::io
