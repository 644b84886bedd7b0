#include "spme/config.hpp"

#include <fstream>
#include <sstream>

#include "spme/errors.hpp"

namespace spme {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" +
                        trimmed + "'");
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse(f);
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required config key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

namespace {

template <typename T, typename Parser>
T parse_or_throw(const std::string& key, const std::string& value, Parser parse) {
  try {
    size_t pos = 0;
    T out = parse(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": cannot parse '" + value + "'");
  }
}

}  // namespace

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return parse_or_throw<double>(key, get_string(key),
                                [](const std::string& s, size_t* p) { return std::stod(s, p); });
}

double KeyValueConfig::require_double(const std::string& key) const {
  return parse_or_throw<double>(key, get_string(key),
                                [](const std::string& s, size_t* p) { return std::stod(s, p); });
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  return parse_or_throw<long>(key, get_string(key),
                              [](const std::string& s, size_t* p) { return std::stol(s, p); });
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  return parse_or_throw<int>(key, get_string(key),
                             [](const std::string& s, size_t* p) { return std::stoi(s, p); });
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return parse_or_throw<std::uint64_t>(
      key, get_string(key),
      [](const std::string& s, size_t* p) { return std::stoull(s, p); });
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::string KeyValueConfig::echo() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << "=" << v << "\n";
  return os.str();
}

RunConfig RunConfig::load(const std::string& path) { return from(KeyValueConfig::load(path)); }

RunConfig RunConfig::from(KeyValueConfig kv) {
  RunConfig rc;
  rc.kv = std::move(kv);
  return rc;
}

PsiSpec RunConfig::psi() const {
  const std::string kind = kv.get_string("psi.kind");
  if (kind == "power_odd") return PsiSpec::power_odd(kv.get_int("psi.m", 3));
  if (kind == "affine_power")
    return PsiSpec::affine_power(kv.require_double("psi.alpha"), kv.get_int("psi.m", 3));
  if (kind == "linear") return PsiSpec::linear(kv.get_double("psi.alpha", 1.0));
  if (kind == "custom") {
    const std::string table = kv.get_string("psi.table");
    std::vector<double> s, v;
    std::stringstream ss(table);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos)
        throw ConfigError("psi.table entries must look like s:v (got '" + pair + "')");
      s.push_back(std::stod(pair.substr(0, colon)));
      v.push_back(std::stod(pair.substr(colon + 1)));
    }
    return PsiSpec::custom(std::move(s), std::move(v));
  }
  throw ConfigError("unknown psi.kind '" + kind +
                    "' (expected power_odd, affine_power, linear or custom)");
}

CovarianceSpec RunConfig::covariance() const {
  CovarianceSpec c{kv.get_double("cov.gamma", 1.0)};
  c.validate();
  return c;
}

DomainSpec RunConfig::domain() const {
  DomainSpec d{kv.get_double("domain.length", 1.0), kv.get_int("domain.grid_points", 0)};
  return d;
}

SamplerConfig RunConfig::sampler() const {
  SamplerConfig s;
  s.n_modes = kv.get_int("sde.n_modes", 8);
  s.grid_points = kv.get_int("sde.grid_points", kv.get_int("domain.grid_points", 0));
  s.dt = kv.get_double("sde.dt", 1e-3);
  s.n_steps = kv.get_long("sde.n_steps", 100000);
  s.burn_in = kv.get_long("sde.burn_in", -1);
  s.thinning = kv.get_int("sde.thinning", 1);
  s.seed = kv.get_u64("sde.seed", 42);
  s.noise_convention = noise_convention_from_string(kv.get_string("sde.noise_convention", "H"));
  s.gamma = kv.get_double("cov.gamma", 1.0);
  s.length = kv.get_double("domain.length", 1.0);
  s.initial_amplitude = kv.get_double("sde.initial_amplitude", 0.0);
  s.validate();
  return s;
}

ResolventConfig RunConfig::resolvent() const {
  ResolventConfig r;
  r.newton_tol = kv.get_double("resolvent.newton_tol", 1e-12);
  r.max_iter = kv.get_int("resolvent.max_iter", 50);
  r.damping = kv.get_double("resolvent.damping", 0.5);
  r.validate();
  return r;
}

}  // namespace spme
