#pragma once

#include <map>
#include <string>
#include <vector>

#include "veh/device.hpp"

namespace veh::io {

struct ConfigViolation {
  int line;  // 1-based, 0 when not tied to a line
  std::string key;
  std::string message;
};

// Carries every violation found in one pass, not just the first.
class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  static std::string format(const std::vector<ConfigViolation>& violations);
  std::vector<ConfigViolation> violations_;
};

enum class KeyType { number, number_list, choice };

struct KeyDef {
  std::string name;
  KeyType type;
  std::string default_text;          // rendered default, "" when derived
  std::vector<std::string> choices;  // choice keys only
  std::string doc;                   // description with the SI unit spelled out
};

// Flat key-value schema; unit suffixes are part of every numeric key name.
const std::vector<KeyDef>& config_schema();

struct RunConfig {
  std::map<std::string, double> numbers;
  std::map<std::string, std::vector<double>> lists;
  std::map<std::string, std::string> choices;

  double number(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  const std::string& choice(const std::string& key) const;
  bool was_set(const std::string& key) const;

  std::vector<std::string> explicit_keys;  // keys present in the parsed text
};

// Parses flat "key = value" text. Unknown keys, missing unit suffixes,
// duplicates and non-finite values are all hard errors, reported together
// with their line numbers. Missing keys fall back to documented defaults.
RunConfig parse_config(const std::string& text);

RunConfig default_config();

// Assembles a device from the config. coupling_k_vs_per_m and r_coil_ohm are
// computed from the magnet/coil geometry when not supplied; resonator_mass_kg
// defaults to the magnet mass and resonator_k_lin_n_per_m to the stiffness
// that resonates the mass at 344 Hz.
DeviceParams build_device(const RunConfig& config);

Excitation build_excitation(const RunConfig& config);

}  // namespace veh::io
