#ifndef SPME_REPORT_HPP
#define SPME_REPORT_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spme/control.hpp"
#include "spme/dissipative.hpp"
#include "spme/kolmogorov.hpp"
#include "spme/sde.hpp"

namespace spme {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<Verdict>& verdicts);

/// Everything needed to reproduce a run: the full config echo, the RNG
/// identity, the software version, plus the per-experiment verdicts. One of
/// these lands in every output directory as manifest.json.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string rng_algorithm;
  std::string version;
  double wall_clock_seconds = 0.0;
  std::vector<Verdict> verdicts;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::string& path);
};

std::string to_json(const PropertyReport& r);
std::string to_json(const ResidualReport& r);
std::string to_json(const ExcessivityReport& r);
std::string to_json(const MartingaleReport& r);
std::string to_json(const MartingaleSweep& r);
std::string to_json(const LyapunovReport& r);
std::string to_json(const MomentReport& r);
std::string to_json(const SupportReport& r);
std::string to_json(const TerminalReport& r);

/// One CSV row per battery member.
void write_residual_csv(std::ostream& os, const ResidualReport& r);
/// t plus one column per mode coefficient.
void write_trajectory_csv(std::ostream& os, const std::vector<double>& times,
                          const std::vector<SpectralField>& states);
void write_segments_csv(std::ostream& os, const std::vector<ControlSegment>& segments);

}  // namespace spme

#endif
