#include "veh/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "veh/magnetics.hpp"

namespace veh::io {

config_error::config_error(std::vector<ConfigViolation> violations)
    : std::runtime_error(format(violations)), violations_(std::move(violations)) {}

std::string config_error::format(const std::vector<ConfigViolation>& violations) {
  std::ostringstream out;
  out << "configuration invalid, " << violations.size() << " violation"
      << (violations.size() == 1 ? "" : "s") << ":";
  for (const auto& v : violations) {
    out << "\n  ";
    if (v.line > 0) out << "line " << v.line << ": ";
    if (!v.key.empty()) out << "key '" << v.key << "': ";
    out << v.message;
  }
  return out.str();
}

const std::vector<KeyDef>& config_schema() {
  static const std::vector<KeyDef> schema = {
      {"magnet_side_a_m", KeyType::number, "7e-3", {}, "magnet side a [m]"},
      {"magnet_side_b_m", KeyType::number, "7e-3", {}, "magnet side b [m]"},
      {"magnet_thickness_m", KeyType::number, "2e-3", {}, "magnet thickness [m]"},
      {"magnet_remanence_t", KeyType::number, "1.2", {}, "magnet remanence [T]"},
      {"magnet_density_kg_per_m3", KeyType::number, "7500", {}, "magnet density [kg/m^3]"},
      {"magnet_gap_m", KeyType::number, "0.5e-3", {}, "rest gap coil plane to magnet bottom face [m]"},
      {"coil_turns_count", KeyType::number, "52", {}, "number of spiral turns [count]"},
      {"coil_track_width_m", KeyType::number, "20e-6", {}, "track width [m]"},
      {"coil_track_thickness_m", KeyType::number, "15e-6", {}, "track thickness [m]"},
      {"coil_track_separation_m", KeyType::number, "15e-6", {}, "track separation [m]"},
      {"coil_outer_side_m", KeyType::number, "10e-3", {}, "coil outer side [m]"},
      {"coil_resistivity_ohm_m", KeyType::number, "1.72e-8", {}, "track resistivity [ohm m]"},
      {"resonator_mass_kg", KeyType::number, "", {}, "proof mass [kg]; default: magnet mass"},
      {"resonator_k_lin_n_per_m", KeyType::number, "", {}, "linear stiffness [N/m]; default: resonant at 344 Hz"},
      {"resonator_k_cub_n_per_m3", KeyType::number, "0", {}, "cubic stiffness [N/m^3]"},
      {"resonator_zeta_p_ratio", KeyType::number, "0.008", {}, "parasitic damping ratio [--]"},
      {"resonator_gamma_sat_per_m2", KeyType::number, "0", {}, "amplitude-dependent damping coefficient [1/m^2]"},
      {"coupling_k_vs_per_m", KeyType::number, "", {}, "transduction coefficient [V s/m]; default: computed from geometry"},
      {"r_coil_ohm", KeyType::number, "", {}, "coil series resistance [ohm]; default: computed from geometry"},
      {"load_r_ohm", KeyType::number, "1e5", {}, "load resistance [ohm]"},
      {"device_volume_m3", KeyType::number, "1.35e-6", {}, "active device volume [m^3]"},
      {"excitation_y0_m", KeyType::number, "0.8e-6", {}, "base displacement amplitude [m]"},
      {"excitation_f_hz", KeyType::number, "344", {}, "excitation frequency [Hz]"},
      {"sweep_f_start_hz", KeyType::number, "285", {}, "sweep start frequency [Hz]"},
      {"sweep_f_end_hz", KeyType::number, "365", {}, "sweep end frequency [Hz]"},
      {"sweep_rate_hz_per_s", KeyType::number, "1", {}, "sweep rate [Hz/s]"},
      {"sweep_bin_hz", KeyType::number, "0.5", {}, "sweep bin width [Hz]"},
      {"sweep_direction", KeyType::choice, "both", {"up", "down", "both"}, "sweep direction"},
      {"freq_min_hz", KeyType::number, "280", {}, "response grid start [Hz]"},
      {"freq_max_hz", KeyType::number, "370", {}, "response grid end [Hz]"},
      {"freq_points_count", KeyType::number, "200", {}, "response grid points [count]"},
      {"freq_emit_backbone", KeyType::choice, "false", {"true", "false"}, "also emit the backbone CSV"},
      {"coil_gap_min_m", KeyType::number, "2e-4", {}, "coil scan smallest gap [m]"},
      {"coil_gap_max_m", KeyType::number, "2e-3", {}, "coil scan largest gap [m]"},
      {"coil_gap_points_count", KeyType::number, "10", {}, "coil scan points [count]"},
      {"load_r_min_ohm", KeyType::number, "10", {}, "load scan lower bound [ohm]"},
      {"load_r_max_ohm", KeyType::number, "1e6", {}, "load scan upper bound [ohm]"},
      {"load_model", KeyType::choice, "fixed", {"fixed", "tracked"}, "load scan at fixed frequency or tracked resonance"},
      {"branch", KeyType::choice, "up", {"up", "down"}, "response branch for fixed-frequency operating points"},
      {"scale_list_ratio", KeyType::number_list, "0.5,0.7,1,1.4,2", {}, "linear scale factors [--]"},
      {"thickness_list_m", KeyType::number_list, "15e-6,20e-6,25e-6,30e-6,35e-6,40e-6", {}, "track thickness list [m]"},
      {"fit_free", KeyType::choice, "zeta_p,coupling_k", {}, "comma list from zeta_p,coupling_k,k_cub"},
      {"fit_zeta_p_lo_ratio", KeyType::number, "1e-4", {}, "zeta_p lower bound [--]"},
      {"fit_zeta_p_hi_ratio", KeyType::number, "0.2", {}, "zeta_p upper bound [--]"},
      {"fit_coupling_lo_vs_per_m", KeyType::number, "1e-3", {}, "coupling lower bound [V s/m]"},
      {"fit_coupling_hi_vs_per_m", KeyType::number, "10", {}, "coupling upper bound [V s/m]"},
      {"fit_k_cub_lo_n_per_m3", KeyType::number, "1e6", {}, "k_cub lower bound [N/m^3]"},
      {"fit_k_cub_hi_n_per_m3", KeyType::number, "1e13", {}, "k_cub upper bound [N/m^3]"},
  };
  return schema;
}

namespace {

const KeyDef* find_key(const std::string& name) {
  for (const auto& def : config_schema()) {
    if (def.name == name) return &def;
  }
  return nullptr;
}

// Numeric keys end in a unit token; used to hint at the likely mistake when a
// bare physics name like "mass" shows up.
bool has_unit_suffix(const std::string& key) {
  static const std::vector<std::string> suffixes = {
      "_m",   "_m2",       "_m3",      "_kg",    "_t",        "_hz",
      "_ohm", "_ratio",    "_count",   "_s",     "_v",        "_w",
      "_kg_per_m3", "_ohm_m", "_n_per_m", "_n_per_m3", "_per_m2", "_vs_per_m",
      "_hz_per_s"};
  for (const auto& s : suffixes) {
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) {
      return true;
    }
  }
  return false;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

double RunConfig::number(const std::string& key) const {
  auto it = numbers.find(key);
  veh::detail::require(it != numbers.end(), "config: no value for key " + key);
  return it->second;
}

const std::vector<double>& RunConfig::list(const std::string& key) const {
  auto it = lists.find(key);
  veh::detail::require(it != lists.end(), "config: no list for key " + key);
  return it->second;
}

const std::string& RunConfig::choice(const std::string& key) const {
  auto it = choices.find(key);
  veh::detail::require(it != choices.end(), "config: no choice for key " + key);
  return it->second;
}

bool RunConfig::was_set(const std::string& key) const {
  return std::find(explicit_keys.begin(), explicit_keys.end(), key) !=
         explicit_keys.end();
}

RunConfig default_config() {
  RunConfig config;
  for (const auto& def : config_schema()) {
    if (def.default_text.empty()) continue;
    switch (def.type) {
      case KeyType::number: {
        double v = 0;
        parse_double(def.default_text, v);
        config.numbers[def.name] = v;
        break;
      }
      case KeyType::number_list: {
        std::vector<double> values;
        for (const auto& tok : split(def.default_text, ',')) {
          double v = 0;
          parse_double(tok, v);
          values.push_back(v);
        }
        config.lists[def.name] = values;
        break;
      }
      case KeyType::choice:
        config.choices[def.name] = def.default_text;
        break;
    }
  }
  return config;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config = default_config();
  std::vector<ConfigViolation> violations;
  std::vector<std::string> seen;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      violations.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      violations.push_back({line_no, "", "empty key"});
      continue;
    }

    const KeyDef* def = find_key(key);
    if (def == nullptr) {
      if (!has_unit_suffix(key)) {
        violations.push_back({line_no, key,
                              "unknown key without a unit suffix; every numeric key "
                              "names its SI unit (e.g. resonator_mass_kg)"});
      } else {
        violations.push_back({line_no, key, "unknown key"});
      }
      continue;
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      violations.push_back({line_no, key, "duplicate key"});
      continue;
    }
    seen.push_back(key);

    switch (def->type) {
      case KeyType::number: {
        double v = 0;
        if (!parse_double(value, v)) {
          violations.push_back({line_no, key, "not a number: '" + value + "'"});
        } else if (!std::isfinite(v)) {
          violations.push_back({line_no, key, "value must be finite"});
        } else {
          config.numbers[key] = v;
        }
        break;
      }
      case KeyType::number_list: {
        std::vector<double> values;
        bool ok = true;
        for (const auto& tok : split(value, ',')) {
          double v = 0;
          if (!parse_double(tok, v) || !std::isfinite(v)) {
            violations.push_back({line_no, key, "list entry not a finite number: '" + tok + "'"});
            ok = false;
            break;
          }
          values.push_back(v);
        }
        if (ok) config.lists[key] = values;
        break;
      }
      case KeyType::choice: {
        if (!def->choices.empty() &&
            std::find(def->choices.begin(), def->choices.end(), value) ==
                def->choices.end()) {
          std::string allowed;
          for (const auto& c : def->choices) allowed += (allowed.empty() ? "" : "|") + c;
          violations.push_back({line_no, key, "must be one of " + allowed});
        } else {
          config.choices[key] = value;
        }
        break;
      }
    }
  }

  if (!violations.empty()) throw config_error(std::move(violations));
  config.explicit_keys = seen;
  return config;
}

DeviceParams build_device(const RunConfig& config) {
  const MagnetSpec magnet(config.number("magnet_side_a_m"), config.number("magnet_side_b_m"),
                          config.number("magnet_thickness_m"),
                          config.number("magnet_remanence_t"),
                          config.number("magnet_density_kg_per_m3"),
                          config.number("magnet_gap_m"));
  const CoilSpec coil(static_cast<int>(config.number("coil_turns_count")),
                      config.number("coil_track_width_m"),
                      config.number("coil_track_thickness_m"),
                      config.number("coil_track_separation_m"),
                      config.number("coil_outer_side_m"),
                      config.number("coil_resistivity_ohm_m"));

  const double mass = config.numbers.count("resonator_mass_kg")
                          ? config.number("resonator_mass_kg")
                          : magnet.mass();
  const double k_lin = config.numbers.count("resonator_k_lin_n_per_m")
                           ? config.number("resonator_k_lin_n_per_m")
                           : mass * std::pow(2.0 * M_PI * 344.0, 2);
  const ResonatorParams resonator(mass, k_lin, config.number("resonator_k_cub_n_per_m3"),
                                  config.number("resonator_zeta_p_ratio"),
                                  config.number("resonator_gamma_sat_per_m2"));

  const auto layout = mag::build_layout(coil);
  const double r_coil = config.numbers.count("r_coil_ohm")
                            ? config.number("r_coil_ohm")
                            : mag::coil_resistance(layout, coil.resistivity);
  const double coupling =
      config.numbers.count("coupling_k_vs_per_m")
          ? config.number("coupling_k_vs_per_m")
          : mag::transduction_coefficient(magnet, layout, magnet.gap_z0);

  return DeviceParams(resonator, magnet, coil, ElectricalLoad(config.number("load_r_ohm")),
                      coupling, r_coil, config.number("device_volume_m3"));
}

Excitation build_excitation(const RunConfig& config) {
  return Excitation(config.number("excitation_y0_m"), config.number("excitation_f_hz"));
}

}  // namespace veh::io
