#ifndef SPME_CONFIG_HPP
#define SPME_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "spme/dissipative.hpp"
#include "spme/nonlinearity.hpp"
#include "spme/sde.hpp"

namespace spme {

/// Flat key=value configuration with dotted keys; '#' starts a comment.
/// Values stay strings until a typed getter pulls them, so unknown keys pass
/// through untouched into echoes and manifests.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Sorted "key=value" lines; the canonical echo embedded in every artifact.
  std::string echo() const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Assembles validated module configurations from the flat keys. Each section
/// getter validates only what it touches, so commands can run on partial
/// configs as long as their own sections are complete.
struct RunConfig {
  KeyValueConfig kv;

  static RunConfig load(const std::string& path);
  static RunConfig from(KeyValueConfig kv);

  /// psi.kind in {power_odd, affine_power, linear, custom}; psi.m, psi.alpha,
  /// psi.table ("s:v;s:v;..." monotone pairs).
  PsiSpec psi() const;
  CovarianceSpec covariance() const;
  SamplerConfig sampler() const;
  ResolventConfig resolvent() const;
  DomainSpec domain() const;

  int threads() const { return kv.get_int("run.threads", 1); }
};

}  // namespace spme

#endif
