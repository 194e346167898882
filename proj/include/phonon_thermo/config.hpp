#pragma once

// JSON run configuration.
//
//   {
//     "probe": {"omega0": 1.0, "Omega": 0.5, "drive_mode": "bare" | "renormalized"},
//     "bath": {"eta": 0.6, "omega_c": 0.75, "s": 1},
//     "temperature": 1.0,
//     "variant": "paper" | "rederived",
//     "grids": {"<name>": {"start": .., "stop": .., "count": .., "scale": "linear" | "log"}},
//     "output": {"dir": "phonon_thermo_out", "svg": false}
//   }
//
// Every key is optional; unknown keys are rejected.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "json.hpp"

#include "phonon_thermo/bath.hpp"
#include "phonon_thermo/errors.hpp"
#include "phonon_thermo/steady_state.hpp"
#include "phonon_thermo/sweep.hpp"

namespace phonon_thermo {

inline constexpr double kDefaultOmega0 = 1.0;
inline constexpr double kDefaultOmega = 0.5;
inline constexpr double kDefaultEta = 0.6;
inline constexpr double kDefaultOmegaC = 0.75;
inline constexpr double kDefaultTemperature = 1.0;

struct Grids {
  AxisSpec temperature = default_temperature_axis();
  AxisSpec coupling = default_coupling_axis();
  AxisSpec cutoff = default_cutoff_axis();
  AxisSpec drive = default_drive_axis();
  // validate: derivative suite and ODE suite
  AxisSpec validate_temperature{Parameter::Temperature, 0.1, 5.0, 20};
  AxisSpec validate_coupling{Parameter::Coupling, 0.05, 3.0, 20};
  AxisSpec ode_temperature{Parameter::Temperature, 0.1, 2.0, 10};
  AxisSpec ode_coupling{Parameter::Coupling, 0.05, 1.0, 10};

  const AxisSpec& for_parameter(Parameter p) const {
    switch (p) {
      case Parameter::Temperature: return temperature;
      case Parameter::Coupling: return coupling;
      case Parameter::Cutoff: return cutoff;
      case Parameter::Drive: return drive;
    }
    return temperature;
  }
};

struct RunConfig {
  ProbeConfig probe{kDefaultOmega0, kDefaultOmega, DriveMode::Bare};
  BathConfig bath{kDefaultEta, kDefaultOmegaC, 1.0};
  double T = kDefaultTemperature;
  Variant variant = Variant::Paper;
  Grids grids;
  std::string output_dir = "phonon_thermo_out";
  bool emit_svg = false;

  OperatingPoint operating_point() const { return {probe, bath, T, variant}; }
};

inline Variant parse_variant(std::string_view s) {
  if (s == "paper") return Variant::Paper;
  if (s == "rederived") return Variant::Rederived;
  throw ConfigError("variant must be 'paper' or 'rederived', got '" + std::string(s) + "'", "variant");
}

inline Parameter parse_parameter(std::string_view s) {
  if (s == "temperature") return Parameter::Temperature;
  if (s == "coupling" || s == "eta") return Parameter::Coupling;
  if (s == "cutoff" || s == "omega_c") return Parameter::Cutoff;
  if (s == "drive" || s == "Omega") return Parameter::Drive;
  throw ConfigError("unknown axis '" + std::string(s) + "'", "axis");
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object", path);
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      const std::string full = path.empty() ? key : path + "." + key;
      throw ConfigError("unknown key '" + full + "'", full);
    }
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline double number_or(const json& obj, std::string_view key, const std::string& path, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError("'" + join(path, key) + "' must be a number", join(path, key));
  return it->get<double>();
}

inline std::string string_or(const json& obj, std::string_view key, const std::string& path,
                             std::string fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError("'" + join(path, key) + "' must be a string", join(path, key));
  return it->get<std::string>();
}

inline void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError("invalid '" + key + "': " + message, key);
}

inline AxisSpec parse_axis(const json& obj, const std::string& path, const AxisSpec& fallback) {
  reject_unknown(obj, path, {"start", "stop", "count", "scale"});
  const double start = number_or(obj, "start", path, fallback.start());
  const double stop = number_or(obj, "stop", path, fallback.stop());
  double count = fallback.count();
  if (auto it = obj.find("count"); it != obj.end()) {
    if (!it->is_number_integer())
      throw ConfigError("'" + join(path, "count") + "' must be an integer", join(path, "count"));
    count = it->get<double>();
  }
  const std::string scale_name = string_or(obj, "scale", path, to_string(fallback.scale()));
  require(scale_name == "linear" || scale_name == "log", join(path, "scale"),
          "must be 'linear' or 'log'");
  require(start < stop, path, "start must be below stop");
  require(count >= 2 && count <= 1e6, join(path, "count"), "must be in [2, 1e6]");
  const Scale scale = scale_name == "log" ? Scale::Log : Scale::Linear;
  require(scale == Scale::Linear || start > 0.0, join(path, "start"), "log scale needs start > 0");
  return {fallback.parameter(), start, stop, static_cast<int>(count), scale};
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace detail

/// Parses and validates a JSON configuration document. Missing keys take the defaults above.
inline RunConfig parse_config(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config (line " + std::to_string(detail::line_of_offset(text, e.byte)) +
                      "): " + e.what());
  }
  detail::reject_unknown(doc, "", {"probe", "bath", "temperature", "variant", "grids", "output"});

  RunConfig cfg;
  if (auto it = doc.find("probe"); it != doc.end()) {
    detail::reject_unknown(*it, "probe", {"omega0", "Omega", "drive_mode"});
    const double omega0 = detail::number_or(*it, "omega0", "probe", kDefaultOmega0);
    const double Omega = detail::number_or(*it, "Omega", "probe", kDefaultOmega);
    const std::string mode = detail::string_or(*it, "drive_mode", "probe", "bare");
    detail::require(omega0 > 0.0, "probe.omega0", "must be positive");
    detail::require(Omega > 0.0, "probe.Omega", "must be positive");
    detail::require(mode == "bare" || mode == "renormalized", "probe.drive_mode",
                    "must be 'bare' or 'renormalized'");
    cfg.probe = ProbeConfig(omega0, Omega, mode == "bare" ? DriveMode::Bare : DriveMode::Renormalized);
  }
  if (auto it = doc.find("bath"); it != doc.end()) {
    detail::reject_unknown(*it, "bath", {"eta", "omega_c", "s"});
    const double eta = detail::number_or(*it, "eta", "bath", kDefaultEta);
    const double omega_c = detail::number_or(*it, "omega_c", "bath", kDefaultOmegaC);
    const double s = detail::number_or(*it, "s", "bath", 1.0);
    detail::require(eta >= 0.0, "bath.eta", "eta must be non-negative");
    detail::require(omega_c > 0.0, "bath.omega_c", "must be positive");
    detail::require(s == 1.0, "bath.s", "only s = 1 (Ohmic) is supported");
    cfg.bath = BathConfig(eta, omega_c, s);
  }
  cfg.T = detail::number_or(doc, "temperature", "", kDefaultTemperature);
  detail::require(cfg.T > 0.0, "temperature", "must be positive");
  cfg.variant = parse_variant(detail::string_or(doc, "variant", "", "paper"));

  if (auto it = doc.find("grids"); it != doc.end()) {
    detail::reject_unknown(*it, "grids",
                           {"temperature", "coupling", "cutoff", "drive", "validate_temperature",
                            "validate_coupling", "ode_temperature", "ode_coupling"});
    const auto grid = [&](std::string_view name, AxisSpec& target) {
      if (auto g = it->find(name); g != it->end())
        target = detail::parse_axis(*g, "grids." + std::string(name), target);
    };
    grid("temperature", cfg.grids.temperature);
    grid("coupling", cfg.grids.coupling);
    grid("cutoff", cfg.grids.cutoff);
    grid("drive", cfg.grids.drive);
    grid("validate_temperature", cfg.grids.validate_temperature);
    grid("validate_coupling", cfg.grids.validate_coupling);
    grid("ode_temperature", cfg.grids.ode_temperature);
    grid("ode_coupling", cfg.grids.ode_coupling);
  }
  if (auto it = doc.find("output"); it != doc.end()) {
    detail::reject_unknown(*it, "output", {"dir", "svg"});
    cfg.output_dir = detail::string_or(*it, "dir", "output", cfg.output_dir);
    if (auto svg = it->find("svg"); svg != it->end()) {
      if (!svg->is_boolean()) throw ConfigError("'output.svg' must be a boolean", "output.svg");
      cfg.emit_svg = svg->get<bool>();
    }
  }
  return cfg;
}

}  // namespace phonon_thermo
