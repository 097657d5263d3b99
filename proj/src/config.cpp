#include "twr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace twr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
  mutable bool used = false;
};

struct IniData {
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string origin;

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  std::string get_string(const std::string& sec, const std::string& key,
                         const std::string& def) const {
    const Entry* e = find(sec, key);
    return e ? e->value : def;
  }

  double get_double(const std::string& sec, const std::string& key, double def) const {
    const Entry* e = find(sec, key);
    if (!e) return def;
    try {
      size_t pos = 0;
      const double v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(origin + ":" + std::to_string(e->line) + ": field " + sec + "." +
                            key + ": expected a number, got '" + e->value + "'",
                        e->line);
    }
  }

  long get_int(const std::string& sec, const std::string& key, long def) const {
    const Entry* e = find(sec, key);
    if (!e) return def;
    try {
      size_t pos = 0;
      const long v = std::stol(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(origin + ":" + std::to_string(e->line) + ": field " + sec + "." +
                            key + ": expected an integer, got '" + e->value + "'",
                        e->line);
    }
  }

  std::vector<std::string> get_list(const std::string& sec, const std::string& key,
                                    const std::vector<std::string>& def) const {
    const Entry* e = find(sec, key);
    if (!e) return def;
    std::vector<std::string> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) {
      throw ConfigError(origin + ":" + std::to_string(e->line) + ": field " + sec + "." +
                            key + ": empty list",
                        e->line);
    }
    return out;
  }

  void check_all_used() const {
    for (const auto& [sec, entries] : sections) {
      for (const auto& [key, entry] : entries) {
        if (!entry.used) {
          throw ConfigError(origin + ":" + std::to_string(entry.line) +
                                ": unknown field " + sec + "." + key,
                            entry.line);
        }
      }
    }
  }
};

IniData parse_ini(const std::string& text, const std::string& origin) {
  IniData data;
  data.origin = origin;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header",
                          lineno);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name", lineno);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'",
                        lineno);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key", lineno);
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                            ": key outside of any [section]",
                        lineno);
    }
    data.sections[section][key] = Entry{value, lineno};
  }
  return data;
}

TemporalKind temporal_from_string(const std::string& s, const std::string& where) {
  if (s == "ar1") return TemporalKind::ar1;
  if (s == "white") return TemporalKind::white;
  throw ConfigError(where + ": temporal kind must be 'ar1' or 'white', got '" + s + "'");
}

SpatialDisturbanceKind spatial_from_string_cfg(const std::string& s, const std::string& where) {
  try {
    return spatial_kind_from_string(s);
  } catch (const Error&) {
    throw ConfigError(where + ": unknown spatial kind '" + s + "'");
  }
}

Mat temporal_cov(TemporalKind kind, Index l, double eta, double strength) {
  if (kind == TemporalKind::white) {
    return strength * Mat::Identity(l, l);
  }
  return ar1_temporal_cov(l, eta, strength);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
  if (methods.empty()) throw ConfigError("experiment.methods must not be empty");
  if (snr_db.empty()) throw ConfigError("experiment.snr_db must not be empty");
  for (const double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("experiment.snr_db values must be finite");
  }
  for (const DesignMethod m : methods) {
    const bool ok = phase == Phase::mac ? method_is_mac(m) : method_is_bc(m);
    if (!ok) {
      throw ConfigError("method '" + to_string(m) + "' is not available for the " +
                        (phase == Phase::mac ? std::string("mac") : std::string("bc")) +
                        " phase");
    }
  }
  if (scenario.n1 < 1 || scenario.n2 < 1 || scenario.m < 1) {
    throw ConfigError("scenario antenna counts must be >= 1");
  }
  if (scenario.power <= 0) throw ConfigError("scenario.power must be > 0");
  if (scenario.tau_split < 0 || scenario.tau_split > 1) {
    throw ConfigError("scenario.tau_split must lie in [0, 1]");
  }
}

ScenarioConfig default_scenario_config() { return ScenarioConfig{}; }

TwrScenario build_scenario(const ScenarioConfig& cfg, double snr_db) {
  const double mu_noise = cfg.power * std::pow(10.0, -snr_db / 10.0);
  TwrScenario sc;
  sc.n1 = cfg.n1;
  sc.n2 = cfg.n2;
  sc.m = cfg.m;

  const Mat z_r_mac = bessel_spatial_cov(cfg.m, cfg.mac.d_r, static_cast<double>(cfg.m));
  sc.mac.h1 = KroneckerChannelModel::make(
      bessel_spatial_cov(cfg.n1, cfg.mac.d_t1, static_cast<double>(cfg.n1)), z_r_mac);
  sc.mac.h2 = KroneckerChannelModel::make(
      bessel_spatial_cov(cfg.n2, cfg.mac.d_t2, static_cast<double>(cfg.n2)), z_r_mac);
  sc.mac.l_s = cfg.mac.length;
  sc.mac.tau1 = cfg.tau1 >= 0 ? cfg.tau1 : 2.0 * cfg.power * cfg.tau_split;
  sc.mac.tau2 = cfg.tau2 >= 0 ? cfg.tau2 : 2.0 * cfg.power * (1.0 - cfg.tau_split);
  sc.mac.dist = DisturbanceModel::make(
      cfg.mac.spatial, sc.mac.h1,
      temporal_cov(cfg.mac.temporal, cfg.mac.length, cfg.mac.eta,
                   cfg.mac.interference * mu_noise),
      cfg.mac.mu, cfg.mac.nu);

  const Mat z_t_bc = cfg.bc.uncorrelated_relay
                         ? Mat::Identity(cfg.m, cfg.m)
                         : bessel_spatial_cov(cfg.m, cfg.bc.d_t, static_cast<double>(cfg.m));
  sc.bc.g1 = KroneckerChannelModel::make(
      z_t_bc, bessel_spatial_cov(cfg.n1, cfg.bc.d_r1, static_cast<double>(cfg.n1)));
  sc.bc.g2 = KroneckerChannelModel::make(
      z_t_bc, bessel_spatial_cov(cfg.n2, cfg.bc.d_r2, static_cast<double>(cfg.n2)));
  sc.bc.l_r = cfg.bc.length;
  sc.bc.tau_r = cfg.tau_r < 0 ? 2.0 * cfg.power : cfg.tau_r;
  sc.bc.d1 = DisturbanceModel::make(
      cfg.bc.spatial1, sc.bc.g1,
      temporal_cov(cfg.bc.temporal1, cfg.bc.length, cfg.bc.eta1,
                   cfg.bc.interference1 * mu_noise),
      cfg.bc.mu1, cfg.bc.nu1);
  sc.bc.d2 = DisturbanceModel::make(
      cfg.bc.spatial2, sc.bc.g2,
      temporal_cov(cfg.bc.temporal2, cfg.bc.length, cfg.bc.eta2,
                   cfg.bc.interference2 * mu_noise),
      cfg.bc.mu2, cfg.bc.nu2);
  sc.validate();
  return sc;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
  const IniData ini = parse_ini(text, origin);
  ExperimentConfig cfg;
  ScenarioConfig& s = cfg.scenario;

  s.n1 = ini.get_int("scenario", "n1", s.n1);
  s.n2 = ini.get_int("scenario", "n2", s.n2);
  s.m = ini.get_int("scenario", "m", s.m);
  s.power = ini.get_double("scenario", "power", s.power);
  s.tau_split = ini.get_double("scenario", "tau_split", s.tau_split);
  s.tau_r = ini.get_double("scenario", "tau_r", s.tau_r);
  s.tau1 = ini.get_double("scenario", "tau1", s.tau1);
  s.tau2 = ini.get_double("scenario", "tau2", s.tau2);

  s.mac.length = ini.get_int("mac", "length", s.mac.length);
  s.mac.d_t1 = ini.get_double("mac", "d_t1", s.mac.d_t1);
  s.mac.d_t2 = ini.get_double("mac", "d_t2", s.mac.d_t2);
  s.mac.d_r = ini.get_double("mac", "d_r", s.mac.d_r);
  s.mac.temporal = temporal_from_string(
      ini.get_string("mac", "temporal", s.mac.temporal == TemporalKind::ar1 ? "ar1" : "white"),
      origin + ": mac.temporal");
  s.mac.eta = ini.get_double("mac", "eta", s.mac.eta);
  s.mac.interference = ini.get_double("mac", "interference", s.mac.interference);
  s.mac.spatial = spatial_from_string_cfg(
      ini.get_string("mac", "spatial", to_string(s.mac.spatial)), origin + ": mac.spatial");
  s.mac.mu = ini.get_double("mac", "mu", s.mac.mu);
  s.mac.nu = ini.get_double("mac", "nu", s.mac.nu);

  s.bc.length = ini.get_int("bc", "length", s.bc.length);
  s.bc.d_t = ini.get_double("bc", "d_t", s.bc.d_t);
  s.bc.d_r1 = ini.get_double("bc", "d_r1", s.bc.d_r1);
  s.bc.d_r2 = ini.get_double("bc", "d_r2", s.bc.d_r2);
  s.bc.temporal1 = temporal_from_string(
      ini.get_string("bc", "temporal1", s.bc.temporal1 == TemporalKind::ar1 ? "ar1" : "white"),
      origin + ": bc.temporal1");
  s.bc.temporal2 = temporal_from_string(
      ini.get_string("bc", "temporal2", s.bc.temporal2 == TemporalKind::ar1 ? "ar1" : "white"),
      origin + ": bc.temporal2");
  s.bc.eta1 = ini.get_double("bc", "eta1", s.bc.eta1);
  s.bc.eta2 = ini.get_double("bc", "eta2", s.bc.eta2);
  s.bc.interference1 = ini.get_double("bc", "interference1", s.bc.interference1);
  s.bc.interference2 = ini.get_double("bc", "interference2", s.bc.interference2);
  s.bc.spatial1 = spatial_from_string_cfg(
      ini.get_string("bc", "spatial1", to_string(s.bc.spatial1)), origin + ": bc.spatial1");
  s.bc.spatial2 = spatial_from_string_cfg(
      ini.get_string("bc", "spatial2", to_string(s.bc.spatial2)), origin + ": bc.spatial2");
  s.bc.mu1 = ini.get_double("bc", "mu1", s.bc.mu1);
  s.bc.nu1 = ini.get_double("bc", "nu1", s.bc.nu1);
  s.bc.mu2 = ini.get_double("bc", "mu2", s.bc.mu2);
  s.bc.nu2 = ini.get_double("bc", "nu2", s.bc.nu2);
  s.bc.uncorrelated_relay =
      ini.get_int("bc", "uncorrelated_relay", s.bc.uncorrelated_relay ? 1 : 0) != 0;

  const std::string phase = ini.get_string("experiment", "phase", "mac");
  if (phase == "mac") {
    cfg.phase = Phase::mac;
  } else if (phase == "bc") {
    cfg.phase = Phase::bc;
  } else {
    throw ConfigError(origin + ": experiment.phase must be 'mac' or 'bc', got '" + phase + "'");
  }

  const std::vector<std::string> method_names =
      ini.get_list("experiment", "methods", {"alternating"});
  for (const std::string& name : method_names) {
    try {
      cfg.methods.push_back(design_method_from_string(name));
    } catch (const Error&) {
      throw ConfigError(origin + ": experiment.methods: unknown method '" + name + "'");
    }
  }

  const std::vector<std::string> snrs =
      ini.get_list("experiment", "snr_db", {"0", "5", "10", "15", "20"});
  for (const std::string& v : snrs) {
    try {
      cfg.snr_db.push_back(std::stod(v));
    } catch (const std::exception&) {
      throw ConfigError(origin + ": experiment.snr_db: expected a number, got '" + v + "'");
    }
  }

  cfg.trials = static_cast<int>(ini.get_int("experiment", "trials", cfg.trials));
  cfg.seed = static_cast<std::uint64_t>(ini.get_int("experiment", "seed",
                                                    static_cast<long>(cfg.seed)));
  const std::string init = ini.get_string("experiment", "init", "identity");
  if (init == "identity") {
    cfg.init = InitSpec{true, 0};
  } else if (init.rfind("random", 0) == 0) {
    int count = 1;
    const auto colon = init.find(':');
    if (colon != std::string::npos) {
      try {
        count = std::stoi(init.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError(origin + ": experiment.init: expected random:<count>");
      }
    }
    if (count < 1) throw ConfigError(origin + ": experiment.init: random count must be >= 1");
    cfg.init = InitSpec{false, count};
  } else {
    throw ConfigError(origin + ": experiment.init must be 'identity' or 'random[:count]'");
  }

  ini.check_all_used();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), path);
}

}  // namespace twr
