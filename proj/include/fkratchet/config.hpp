#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkratchet/chain.hpp"
#include "fkratchet/potentials.hpp"

namespace fkr {

// Plain-text key/value configuration with optional [model], [pulse] and [run]
// sections. Inside a section keys are written bare (`tau = 10` under [pulse]);
// outside any section they are written qualified (`pulse.tau = 10`,
// `W.kind = quadratic`). '#' starts a comment. Keys are stored canonically as
// "model.W.kind", "pulse.tau", "run.command", ...
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(std::istream& in);
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry* find(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

// Every key the parser accepts, canonical form.
const std::vector<std::string>& known_config_keys();

// "[(a1, phi1), (a2, phi2), ...]"
std::vector<FourierTerm> parse_fourier(const std::string& text, int line = 0);

// Builds the model from the [model]/[pulse] keys, starting from
// default_model() for anything not given.
ModelSpec model_from_config(const Config& cfg);
DynamicsMode mode_from_config(const Config& cfg);

// Serialises a model in the same format, loadable by model_from_config.
std::string model_to_config(const ModelSpec& model, DynamicsMode mode);

}  // namespace fkr
