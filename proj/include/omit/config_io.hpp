#pragma once

#include "omit/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace omit {

/// Parse the flat config format:
///
///   [cavity]    kappa_hz, delta_c_hz | delta_eff_hz, wavelength_m, cavity_length_m
///   [drive]     power_pump_w, probe_ratio
///   [mode.K]    omega_hz, gamma_hz | q_factor, g_hz | mass_kg
///   [coupling.K] eta_hz, theta_rad | theta_pi_units
///
/// Frequencies are ordinary (Hz) and converted by 2 pi. Unknown keys, duplicates and
/// ambiguous pairs are ConfigError with the offending line.
SystemConfig parse_config(std::string_view text);

SystemConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(emit_config(c)) == c for any canonicalized config.
std::string emit_config(const SystemConfig& config);

/// Set one scalar addressed by a dotted key (e.g. "drive.power_pump_w", "coupling.1.theta_pi_units",
/// "coupling.*.eta_hz"). A pinned effective detuning is re-resolved afterwards.
void set_parameter(SystemConfig& config, std::string_view path, double value);

/// Shortest decimal that parses back to the same double ("nan" for NaN).
std::string format_double(double value);

} // namespace omit
