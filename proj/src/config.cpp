#include "fkratchet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fkratchet/errors.hpp"

namespace fkr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string canonical_key(const std::string& section, const std::string& key, int line) {
  if (!section.empty()) return section + "." + key;
  for (const char* prefix : {"model.", "pulse.", "run."}) {
    if (key.rfind(prefix, 0) == 0) return key;
  }
  if (key.rfind("W.", 0) == 0 || key.rfind("V.", 0) == 0 || key == "mode") return "model." + key;
  throw ConfigError("unknown key '" + key + "' outside any section", line);
}

double to_double(const std::string& key, const Config::Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (trim(e.value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects a number, got '" + e.value + "'", e.line);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "model.W.kind",        "model.W.c",          "model.W.c2",
      "model.W.c4",          "model.V.fourier",    "model.mode",
      "pulse.tau",           "pulse.kappa",        "run.command",
      "run.rho",             "run.rho_list",       "run.tau_list",
      "run.tau_grid",        "run.periods",        "run.samples_per_phase",
      "run.transient_periods", "run.max_periods",  "run.window",
      "run.speed_tol",       "run.dt_max",         "run.safety",
      "run.workers",         "run.output",         "run.summary",
      "run.checkpoint",      "run.q_max",          "run.grid_n",
      "run.fixed_point_tol", "run.max_terms",
  };
  return keys;
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string raw, section;
  int line_no = 0;
  const auto& known = known_config_keys();
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "pulse" && section != "run") {
        throw ConfigError("unknown section '" + section + "'", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    const std::string canon = canonical_key(section, key, line_no);
    if (std::find(known.begin(), known.end(), canon) == known.end()) {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
    if (cfg.entries_.count(canon)) throw ConfigError("duplicate key '" + key + "'", line_no);
    cfg.entries_[canon] = Entry{value, line_no};
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  return e ? to_double(key, *e) : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e->value, &used);
    if (trim(e->value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects an integer, got '" + e->value + "'", e->line);
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  const Entry* e = find(key);
  if (!e) return out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + key + "'", e->line);
    out.push_back(item);
  }
  return out;
}

std::vector<FourierTerm> parse_fourier(const std::string& text, int line) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ConfigError("V.fourier expects [(a1, phi1), ...]", line);
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<FourierTerm> terms;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto open = s.find('(', pos);
    if (open == std::string::npos) {
      if (!trim(s.substr(pos)).empty()) throw ConfigError("V.fourier: stray text", line);
      break;
    }
    if (!trim(s.substr(pos, open - pos)).empty() && trim(s.substr(pos, open - pos)) != ",") {
      throw ConfigError("V.fourier: stray text between terms", line);
    }
    const auto close = s.find(')', open);
    if (close == std::string::npos) throw ConfigError("V.fourier: missing ')'", line);
    const std::string inner = s.substr(open + 1, close - open - 1);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) throw ConfigError("V.fourier: term needs (a, phi)", line);
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string a = trim(inner.substr(0, comma));
      const std::string phi = trim(inner.substr(comma + 1));
      const double av = std::stod(a, &u1);
      const double pv = std::stod(phi, &u2);
      if (u1 != a.size() || u2 != phi.size()) throw std::invalid_argument("trailing");
      terms.push_back({av, pv});
    } catch (const std::exception&) {
      throw ConfigError("V.fourier: cannot parse term '(" + inner + ")'", line);
    }
    pos = close + 1;
  }
  return terms;
}

ModelSpec model_from_config(const Config& cfg) {
  ModelSpec model = default_model();
  try {
    if (const auto* kind = cfg.find("model.W.kind")) {
      if (kind->value == "quadratic") {
        model.W = InteractionPotential::quadratic(cfg.get_double("model.W.c", 1.0));
      } else if (kind->value == "quadratic_plus_quartic") {
        model.W = InteractionPotential::quadratic_plus_quartic(cfg.get_double("model.W.c2", 1.0),
                                                               cfg.get_double("model.W.c4", 0.0));
      } else {
        throw ConfigError("W.kind must be quadratic or quadratic_plus_quartic", kind->line);
      }
    } else if (cfg.has("model.W.c")) {
      model.W = InteractionPotential::quadratic(cfg.get_double("model.W.c", 1.0));
    }
    if (const auto* f = cfg.find("model.V.fourier")) {
      model.V = SitePotential(parse_fourier(f->value, f->line));
    }
    model.pulse.tau = cfg.get_double("pulse.tau", model.pulse.tau);
    model.pulse.kappa = cfg.get_double("pulse.kappa", model.pulse.kappa);
    model.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
  return model;
}

DynamicsMode mode_from_config(const Config& cfg) {
  const auto* e = cfg.find("model.mode");
  if (!e || e->value == "potential") return DynamicsMode::pulsating_potential;
  if (e->value == "interaction") return DynamicsMode::pulsating_interaction;
  throw ConfigError("mode must be potential or interaction", e->line);
}

std::string model_to_config(const ModelSpec& model, DynamicsMode mode) {
  std::string out = "[model]\n";
  if (model.W.kind() == InteractionPotential::Kind::quadratic) {
    out += "W.kind = quadratic\nW.c = " + fmt17(model.W.c2()) + "\n";
  } else {
    out += "W.kind = quadratic_plus_quartic\nW.c2 = " + fmt17(model.W.c2()) +
           "\nW.c4 = " + fmt17(model.W.c4()) + "\n";
  }
  out += "V.fourier = [";
  const auto& terms = model.V.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ", ";
    out += "(" + fmt17(terms[i].amplitude) + ", " + fmt17(terms[i].phase) + ")";
  }
  out += "]\nmode = ";
  out += to_string(mode);
  out += "\n\n[pulse]\ntau = " + fmt17(model.pulse.tau) + "\nkappa = " + fmt17(model.pulse.kappa) +
         "\n";
  return out;
}

}  // namespace fkr
