#include "spme/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "spme/errors.hpp"
#include "spme/rng.hpp"
#include "spme/version.hpp"

namespace spme {

using nlohmann::json;

bool all_pass(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

namespace {

json verdicts_to_json(const std::vector<Verdict>& verdicts) {
  json arr = json::array();
  for (const auto& v : verdicts)
    arr.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return arr;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = version.empty() ? kVersion : version;
  j["rng"] = {{"algorithm", rng_algorithm.empty() ? RngStream::kAlgorithm : rng_algorithm}};
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["config"] = config;
  j["verdicts"] = verdicts_to_json(verdicts);
  return dump(j);
}

RunManifest RunManifest::from_json(const std::string& text) {
  json j = json::parse(text);
  RunManifest m;
  m.command = j.value("command", "");
  m.version = j.value("version", "");
  if (j.contains("rng")) m.rng_algorithm = j["rng"].value("algorithm", "");
  m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
  if (j.contains("config"))
    for (const auto& [k, v] : j["config"].items()) m.config[k] = v.get<std::string>();
  if (j.contains("verdicts"))
    for (const auto& v : j["verdicts"])
      m.verdicts.push_back(Verdict{v.value("name", ""), v.value("pass", false), v.value("detail", "")});
  return m;
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open manifest: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

std::string to_json(const PropertyReport& r) {
  json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["all_pass"] = r.all_pass();
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"worst_margin", c.worst_margin},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  j["checks"] = checks;
  return dump(j);
}

std::string to_json(const ResidualReport& r) {
  json j;
  j["battery_id"] = r.battery_id;
  j["sample_count"] = r.sample_count;
  j["z"] = r.z;
  j["bias_constant"] = r.bias_constant;
  j["dt"] = r.dt;
  j["trace_tail_ratio"] = r.tail_ratio;
  j["all_pass"] = r.all_pass();
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"id", e.id},
                       {"estimate", e.estimate},
                       {"se", e.se},
                       {"threshold", e.threshold},
                       {"pass", e.pass}});
  j["entries"] = entries;
  return dump(j);
}

std::string to_json(const ExcessivityReport& r) {
  json j;
  j["lambda_nu"] = r.lambda_nu;
  j["horizon"] = r.horizon;
  j["restarts"] = r.restarts;
  j["max_lambda_consistent"] = r.max_lambda_consistent;
  j["all_pass"] = r.all_pass();
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"id", e.id},
                       {"lhs", e.lhs},
                       {"rhs", e.rhs},
                       {"paired_mean", e.paired_mean},
                       {"paired_se", e.paired_se},
                       {"lambda_consistent", e.lambda_consistent},
                       {"pass", e.pass}});
  j["entries"] = entries;
  return dump(j);
}

namespace {

json martingale_json(const MartingaleReport& r) {
  return {{"estimate", r.estimate}, {"se", r.se},   {"threshold", r.threshold},
          {"t", r.t},               {"dt", r.dt},   {"paths", r.paths},
          {"pass", r.pass}};
}

}  // namespace

std::string to_json(const MartingaleReport& r) { return dump(martingale_json(r)); }

std::string to_json(const MartingaleSweep& r) {
  json j;
  j["slope"] = r.slope;
  json levels = json::array();
  for (const auto& rep : r.reports) levels.push_back(martingale_json(rep));
  j["levels"] = levels;
  return dump(j);
}

std::string to_json(const LyapunovReport& r) {
  json j;
  j["min_ratio"] = r.min_ratio;
  j["ci_lower"] = r.ci_lower;
  j["ci_upper"] = r.ci_upper;
  j["states"] = r.states;
  j["paths_per_state"] = r.paths_per_state;
  j["t_max"] = r.t_max;
  j["pass"] = r.pass;
  return dump(j);
}

std::string to_json(const MomentReport& r) {
  json j;
  j["count"] = r.count;
  j["all_doubling_ok"] = r.all_doubling_ok();
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"name", e.name},
                       {"mean", e.mean},
                       {"se", e.se},
                       {"half_sample_mean", e.half_sample_mean},
                       {"doubling_rel_change", e.doubling_rel_change},
                       {"doubling_ok", e.doubling_ok}});
  j["entries"] = entries;
  return dump(j);
}

std::string to_json(const SupportReport& r) {
  json j;
  j["frequency"] = r.interval.frequency;
  j["wilson_lower"] = r.interval.lower;
  j["wilson_upper"] = r.interval.upper;
  j["hits"] = r.interval.hits;
  j["paths"] = r.paths;
  j["alpha"] = r.alpha;
  j["target_distance"] = r.target_distance;
  j["horizon"] = r.horizon;
  return dump(j);
}

std::string to_json(const TerminalReport& r) {
  json j;
  j["delta"] = r.delta;
  j["initial_gap"] = r.initial_gap;
  j["horizon"] = r.horizon;
  return dump(j);
}

void write_residual_csv(std::ostream& os, const ResidualReport& r) {
  os << "id,estimate,se,threshold,pass\n";
  for (const auto& e : r.entries)
    os << e.id << ',' << fmt17(e.estimate) << ',' << fmt17(e.se) << ',' << fmt17(e.threshold)
       << ',' << (e.pass ? 1 : 0) << "\n";
}

void write_trajectory_csv(std::ostream& os, const std::vector<double>& times,
                          const std::vector<SpectralField>& states) {
  if (states.empty()) return;
  os << "t";
  for (int k = 1; k <= states.front().modes(); ++k) os << ",z" << k;
  os << "\n";
  for (size_t i = 0; i < times.size(); ++i) {
    os << fmt17(times[i]);
    for (double c : states[i].coeff) os << ',' << fmt17(c);
    os << "\n";
  }
}

void write_segments_csv(std::ostream& os, const std::vector<ControlSegment>& segments) {
  if (segments.empty()) return;
  os << "t_start,dt";
  for (int k = 1; k <= segments.front().value.modes(); ++k) os << ",u" << k;
  os << "\n";
  for (const auto& s : segments) {
    os << fmt17(s.t_start) << ',' << fmt17(s.dt);
    for (double c : s.value.coeff) os << ',' << fmt17(c);
    os << "\n";
  }
}

}  // namespace spme
