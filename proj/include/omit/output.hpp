#pragma once

#include "omit/sidebands.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace omit {

inline constexpr std::string_view kSpectrumHeader =
    "omega_over_omega_m,transmission,efficiency_percent,phase_rad,group_delay_s,route_discrepancy";

/// One header row plus one row per grid point; absent values are "nan".
std::string spectrum_csv(const Spectrum& spectrum);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace omit
