#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"

namespace shadowkit {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "shadowkit/1";

inline Extension extension_from_string(const std::string& s) {
  if (s == "orbit-capped") return Extension::OrbitCapped;
  if (s == "periodic") return Extension::Periodic;
  throw std::invalid_argument("unknown extension '" + s + "'");
}

template <class P>
json to_json(const PseudoOrbit<P>& x, const std::string& system_id) {
  json j;
  j["system_id"] = system_id;
  j["lo"] = x.lo();
  j["hi"] = x.hi();
  j["extension"] = to_string(x.extension());
  json e = json::array();
  for (const auto& p : x.entries()) e.push_back(encode(p));
  j["entries"] = std::move(e);
  return j;
}

template <class P>
PseudoOrbit<P> pseudo_orbit_from_json(const json& j) {
  const int lo = j.at("lo").get<int>();
  const int hi = j.at("hi").get<int>();
  std::vector<P> e;
  for (const auto& c : j.at("entries")) e.push_back(Codec<P>::decode(c.get<std::vector<double>>()));
  if (static_cast<int>(e.size()) != hi - lo + 1) throw std::invalid_argument("pseudo-orbit JSON: entry count does not match lo..hi");
  return PseudoOrbit<P>(lo, std::move(e), extension_from_string(j.at("extension").get<std::string>()));
}

inline json to_json(const IndexedSeries& s) {
  return json{{"lo", s.lo}, {"periodic", s.periodic}, {"values", s.values}};
}

template <class P>
json to_json(const ShadowResult<P>& r) {
  json j;
  j["point"] = encode(r.point);
  j["stages_used"] = r.stages_used;
  j["tail_bound"] = r.tail_bound;
  if (r.per_index_error) j["per_index_error"] = to_json(*r.per_index_error);
  if (r.per_index_bound) j["per_index_bound"] = to_json(*r.per_index_bound);
  return j;
}

inline json to_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  j["samples"] = r.samples;
  // infinity has no JSON form; a check with no samples reports null
  if (std::isfinite(r.worst_slack))
    j["worst_slack"] = r.worst_slack;
  else
    j["worst_slack"] = nullptr;
  j["tolerance"] = r.tolerance;
  json w = json::object();
  for (const auto& [k, v] : r.witness) w[k] = v;
  j["witness"] = std::move(w);
  json m = json::object();
  for (const auto& [k, v] : r.metrics) m[k] = v;
  j["metrics"] = std::move(m);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

/// One-line human summary: PASS/FAIL, name, worst slack.
inline std::string summary_line(const CheckReport& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  worst_slack=" << r.worst_slack << "  samples=" << r.samples;
  if (!r.note.empty()) os << "  (" << r.note << ")";
  return os.str();
}

/// Everything needed to reproduce one CLI run.
struct RunConfig {
  std::string system = "cat";
  std::string method = "bowen";
  std::string schedule = "constant";
  std::uint64_t seed = 1;
  int window = 32;
  double delta = 1e-5;
  int quiet_radius = 8;
  std::string suite = "all";
  bool assert_lemmas = true;
  /// Tolerance of the invariance checks; must cover the shadowing method's truncation tails.
  double tol = 1e-9;
  /// Side of the square grid used by the stability suite.
  int grid = 128;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline json to_json(const RunConfig& c) {
  return json{{"schema", kSchema},        {"system", c.system},     {"method", c.method},
              {"schedule", c.schedule},   {"seed", c.seed},         {"window", c.window},
              {"delta", c.delta},         {"quiet_radius", c.quiet_radius}, {"suite", c.suite},
              {"assert_lemmas", c.assert_lemmas}, {"tol", c.tol},   {"grid", c.grid},
              {"out", c.out}};
}

/// Missing fields keep their defaults; an unknown schema is rejected.
inline RunConfig run_config_from_json(const json& j) {
  if (j.contains("schema") && j["schema"] != kSchema)
    throw std::invalid_argument("config schema '" + j["schema"].dump() + "' is not " + kSchema);
  RunConfig c;
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) field = j[k].get<std::decay_t<decltype(field)>>();
  };
  get("system", c.system);
  get("method", c.method);
  get("schedule", c.schedule);
  get("seed", c.seed);
  get("window", c.window);
  get("delta", c.delta);
  get("quiet_radius", c.quiet_radius);
  get("suite", c.suite);
  get("assert_lemmas", c.assert_lemmas);
  get("tol", c.tol);
  get("grid", c.grid);
  get("out", c.out);
  return c;
}

/// Writes via a temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

/// CSV with header "index,<name>..." from aligned series.
inline std::string series_csv(const std::vector<std::string>& names, const std::vector<IndexedSeries>& cols) {
  std::ostringstream os;
  os.precision(17);
  os << "index";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  if (cols.empty()) return os.str();
  int lo = cols.front().lo, hi = cols.front().hi();
  for (const auto& c : cols) {
    lo = std::min(lo, c.lo);
    hi = std::max(hi, c.hi());
  }
  for (int i = lo; i <= hi; ++i) {
    os << i;
    for (const auto& c : cols) os << ',' << c.at(i);
    os << '\n';
  }
  return os.str();
}

}  // namespace shadowkit
