#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "constructions.hpp"
#include "core.hpp"
#include "density.hpp"
#include "energy.hpp"
#include "oracle.hpp"
#include "typeproblem.hpp"
#include "uniformity.hpp"

namespace typelab::io {

using json = nlohmann::json;

// Non-finite values become the strings "inf", "-inf", "nan".
inline json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline double read_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw Error(ErrorCode::InvalidArgument, "not a number: " + s);
  }
  if (!j.is_number()) throw Error(ErrorCode::InvalidArgument, "expected a number");
  return j.get<double>();
}

inline std::vector<double> read_nums(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(read_num(x));
  return v;
}

namespace detail {

inline void format_double(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out += buf;
  // keep floats recognisable as floats
  if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

inline void dump(std::string& out, const json& j, int indent, int depth) {
  const auto nl = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: keys sorted
        if (!first) out += ',';
        first = false;
        nl(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(out, it.value(), indent, depth + 1);
      }
      nl(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += indent < 0 ? "," : ", ";
        dump(out, j[i], -1, 0);
      }
      out += ']';
      return;
    }
    case json::value_t::number_float: format_double(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Sorted keys, %.12g floats; arrays stay on one line.
inline std::string canonical(const json& j, int indent = 2) {
  std::string out;
  detail::dump(out, j, indent, 0);
  return out;
}

inline json to_json(const RealSequence& s) {
  return {{"points", nums(s.values())}, {"window", num(s.window())}, {"generator", s.generator()}};
}

inline json to_json(const Interval& I) { return json::array({num(I.left), num(I.right)}); }

inline json to_json(const std::vector<Interval>& v) {
  json a = json::array();
  for (const auto& I : v) a.push_back(to_json(I));
  return a;
}

inline json to_json(const Partition& p) {
  return {{"breakpoints", nums(p.breakpoints())}, {"intervals", static_cast<std::uint64_t>(p.size())}};
}

inline json to_json(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(json::array({num(a.position), num(a.mass)}));
  std::vector<double> lm;
  for (const auto& a : mu.atoms()) lm.push_back(a.log_mass);
  return {{"atoms", atoms}, {"log_masses", nums(lm)}, {"window", num(mu.window())}, {"tag", mu.tag()}};
}

inline json to_json(const WeightTable& w) {
  return {{"breakpoints", nums(w.breakpoints())}, {"log_values", nums(w.log_values())}};
}

inline json to_json(const SumVerdict& v) {
  json shells = json::array();
  for (const auto& s : v.shells)
    shells.push_back({{"index", s.index}, {"sum", num(s.sum)}, {"terms", static_cast<std::uint64_t>(s.terms)},
                      {"partial", s.partial}});
  return {{"value_truncated", num(v.value_truncated)},
          {"inner_remainder", num(v.inner_remainder)},
          {"classification", std::string(to_string(v.classification))},
          {"fit_slope", num(v.fit_slope)},
          {"fit_ratio", num(v.fit_ratio)},
          {"shells", shells}};
}

inline json to_json(const EnergyReport& r) {
  return {{"delta", static_cast<std::uint64_t>(r.delta)},
          {"energy", num(r.energy)},
          {"deficit", num(r.deficit)},
          {"interval", to_json(r.interval)}};
}

inline json to_json(const IntervalStat& s) {
  return {{"interval", to_json(s.interval)}, {"delta", static_cast<std::uint64_t>(s.delta)},
          {"length", num(s.length)},         {"ratio", num(s.ratio)},
          {"deficit", num(s.deficit)}};
}

inline json to_json(const DensityVerdict& v) {
  json flagged = json::array();
  for (auto k : v.flagged) flagged.push_back(static_cast<std::uint64_t>(k));
  return {{"pass", v.pass},
          {"max_deviation", num(v.max_deviation)},
          {"worst_interval", static_cast<std::int64_t>(v.worst_interval)},
          {"flagged", flagged}};
}

inline json to_json(const UniformityReport& r) {
  json per = json::array();
  for (const auto& s : r.per_interval) per.push_back(to_json(s));
  json j = {{"d", num(r.d)},
            {"partition", to_json(r.partition)},
            {"attempt", r.attempt},
            {"per_interval", per},
            {"density", to_json(r.density_verdict)},
            {"shortness", to_json(r.shortness)},
            {"energy_checked", r.energy_checked},
            {"overall", r.overall}};
  j["energy"] = r.energy_checked ? to_json(r.energy_verdict) : json(nullptr);
  if (!r.overall) j["note"] = "no certifying partition found (not a proof that none exists)";
  return j;
}

inline json to_json(const DensityScanRow& r) {
  return {{"d", num(r.d)}, {"passed", r.passed}, {"attempt", r.attempt}, {"reason", r.reason}};
}

inline json to_json(const DensityEstimate& e) {
  json diag = json::array();
  for (const auto& r : e.diagnostics) diag.push_back(to_json(r));
  json j = {{"value", num(e.value)},
            {"kind", e.kind == DensityKind::Interior ? "interior" : "exterior"},
            {"diagnostics", diag}};
  j["certificate"] = e.certificate ? to_json(*e.certificate) : json(nullptr);
  j["report"] = e.report ? to_json(*e.report) : json(nullptr);
  j["regularity"] = e.regularity ? to_json(*e.regularity) : json(nullptr);
  return j;
}

inline json to_json(const TypeEstimate& t) {
  json diag = json::array();
  for (const auto& r : t.diagnostics) diag.push_back(to_json(r));
  json j = {{"lower_bound_type", num(t.lower_bound_type)},
            {"infinite", t.infinite},
            {"two_sided", t.two_sided},
            {"bound_kind", t.two_sided ? "two_sided" : "lower_bound"},
            {"method", t.method},
            {"d", num(t.d)},
            {"retained_atoms", static_cast<std::uint64_t>(t.retained_atoms)},
            {"counting_growth", to_json(t.counting_growth)},
            {"diagnostics", diag}};
  j["subsequence"] = t.subsequence ? to_json(*t.subsequence) : json(nullptr);
  j["weight_sum"] = t.weight_sum ? to_json(*t.weight_sum) : json(nullptr);
  j["report"] = t.report ? to_json(*t.report) : json(nullptr);
  return j;
}

inline json to_json(const TheoremVerdict& v) {
  json ev = json::object(), data = json::object(), arrays = json::object();
  for (const auto& [k, s] : v.evidence) ev[k] = to_json(s);
  for (const auto& [k, x] : v.data) data[k] = num(x);
  for (const auto& [k, a] : v.arrays) arrays[k] = nums(a);
  return {{"theorem", v.theorem},
          {"applicable", v.applicable},
          {"conclusion", std::string(to_string(v.conclusion))},
          {"bound", num(v.bound)},
          {"evidence", ev},
          {"data", data},
          {"arrays", arrays},
          {"notes", v.notes}};
}

inline json to_json(const ResidualCurve& c) {
  json ext = json::array(), rows = json::array();
  for (char e : c.extended) ext.push_back(e != 0);
  for (auto r : c.rows) rows.push_back(static_cast<std::uint64_t>(r));
  json j = {{"a", nums(c.a_values)},
            {"sigma_min", nums(c.sigma_min)},
            {"sigma_max", nums(c.sigma_max)},
            {"cond", nums(c.conditioning)},
            {"rows", rows},
            {"extended", ext},
            {"knee_strength", num(c.knee_strength)}};
  j["knee"] = c.knee ? num(*c.knee) : json(nullptr);
  return j;
}

inline json to_json(const AnnihilatorReport& r) {
  std::vector<double> re, im;
  for (const auto& z : r.coefficients) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"coefficients_re", nums(re)}, {"coefficients_im", nums(im)},  {"sigma_min", num(r.sigma_min)},
          {"residual", num(r.residual)},  {"residual_normalized", num(r.residual_normalized)},
          {"rows", static_cast<std::uint64_t>(r.rows)}, {"extended", r.extended}};
}

inline json to_json(const AuxiliaryResult& r) {
  return {{"A", to_json(r.A)},
          {"C", to_json(r.C)},
          {"B_prime", to_json(r.B_prime)},
          {"pair_width", nums(r.pair_width)},
          {"fill_points", static_cast<std::uint64_t>(r.fill_points)},
          {"max_gap", num(r.max_gap)},
          {"gap_bound", num(r.gap_bound)},
          {"max_width_ratio", num(r.max_width_ratio)},
          {"conclusion1", r.conclusion1},
          {"conclusion3", r.conclusion3}};
}

inline json to_json(const BenedicksResult& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks)
    blocks.push_back({{"block", to_json(b.block)}, {"points", static_cast<std::uint64_t>(b.points)}});
  return {{"sequence", to_json(r.sequence)}, {"blocks", blocks}};
}

// ---- readers ----

inline RealSequence sequence_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("window"))
    throw Error(ErrorCode::InvalidArgument, "sequence needs \"points\" and \"window\"");
  const std::string gen = j.contains("generator") && j["generator"].is_string() ? j["generator"].get<std::string>() : "none";
  auto pts = read_nums(j["points"]);
  const double T = read_num(j["window"]);
  if (pts.empty()) return RealSequence::empty(T, gen);
  return validate_sequence(std::move(pts), T, gen);
}

inline DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("window"))
    throw Error(ErrorCode::InvalidArgument, "measure needs \"atoms\" and \"window\"");
  const std::string tag = j.contains("tag") && j["tag"].is_string() ? j["tag"].get<std::string>() : "none";
  std::vector<double> pos, m;
  for (const auto& a : j["atoms"]) {
    if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::InvalidArgument, "atoms are [x, m] pairs");
    pos.push_back(read_num(a[0]));
    m.push_back(read_num(a[1]));
  }
  const double T = read_num(j["window"]);
  if (j.contains("log_masses")) return DiscreteMeasure::from_log_masses(pos, read_nums(j["log_masses"]), T, tag);
  return DiscreteMeasure::from_masses(pos, m, T, tag);
}

inline WeightTable weight_table_from_json(const json& j) {
  if (!j.is_object() || !j.contains("breakpoints")) throw Error(ErrorCode::InvalidArgument, "weight table needs \"breakpoints\"");
  if (j.contains("log_values")) return WeightTable::from_log(read_nums(j["breakpoints"]), read_nums(j["log_values"]));
  if (!j.contains("values")) throw Error(ErrorCode::InvalidArgument, "weight table needs \"values\"");
  return WeightTable(read_nums(j["breakpoints"]), read_nums(j["values"]));
}

inline Partition partition_from_json(const json& j) {
  if (j.is_object() && j.contains("breakpoints")) return Partition(read_nums(j["breakpoints"]));
  if (j.is_array()) return Partition(read_nums(j));
  throw Error(ErrorCode::InvalidArgument, "partition needs \"breakpoints\"");
}

// Accepts [[a,b],...] or {"intervals": [[a,b],...]}.
inline std::vector<Interval> intervals_from_json(const json& j) {
  const json& arr = j.is_object() && j.contains("intervals") ? j["intervals"] : j;
  if (!arr.is_array()) throw Error(ErrorCode::InvalidArgument, "intervals must be an array of [a, b]");
  std::vector<Interval> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::InvalidArgument, "interval must be [a, b]");
    out.emplace_back(read_num(p[0]), read_num(p[1]));
  }
  return out;
}

inline DensitySamples samples_from_json(const json& j) {
  if (!j.is_object() || !j.contains("step") || !j.contains("start"))
    throw Error(ErrorCode::InvalidArgument, "samples need \"start\", \"step\" and \"values\" or \"log_values\"");
  DensitySamples s;
  s.start = read_num(j["start"]);
  s.step = read_num(j["step"]);
  if (j.contains("log_values")) {
    s.log_values = read_nums(j["log_values"]);
  } else {
    for (double w : read_nums(j.at("values"))) {
      require(w >= 0, ErrorCode::InvalidArgument, "density samples must be nonnegative");
      s.log_values.push_back(w > 0 ? std::log(w) : -INFINITY);
    }
  }
  return s;
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("JSON parse error: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---- CSV ----

inline std::string csv_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string to_csv(const ResidualCurve& c) {
  std::string s = "a,sigma_min,cond\n";
  for (std::size_t i = 0; i < c.a_values.size(); ++i)
    s += csv_num(c.a_values[i]) + "," + csv_num(c.sigma_min[i]) + "," + csv_num(c.conditioning[i]) + "\n";
  return s;
}

inline std::string to_csv(const SumVerdict& v) {
  std::string s = "shell,sum,terms,partial\n";
  for (const auto& sh : v.shells)
    s += std::to_string(sh.index) + "," + csv_num(sh.sum) + "," + std::to_string(sh.terms) + "," + (sh.partial ? "1" : "0") + "\n";
  return s;
}

inline std::string to_csv(const std::vector<IntervalStat>& stats) {
  std::string s = "left,right,delta,length,ratio,deficit\n";
  for (const auto& st : stats)
    s += csv_num(st.interval.left) + "," + csv_num(st.interval.right) + "," + std::to_string(st.delta) + "," +
         csv_num(st.length) + "," + csv_num(st.ratio) + "," + csv_num(st.deficit) + "\n";
  return s;
}

inline std::string to_csv(const RealSequence& seq) {
  std::string s = "x\n";
  for (double x : seq.points()) s += csv_num(x) + "\n";
  return s;
}

inline std::string to_csv(const std::vector<DensityScanRow>& rows) {
  std::string s = "d,passed,attempt,reason\n";
  for (const auto& r : rows) s += csv_num(r.d) + "," + (r.passed ? "1" : "0") + "," + std::to_string(r.attempt) + "," + r.reason + "\n";
  return s;
}

}  // namespace typelab::io
