#pragma once

#include "omit/sidebands.hpp"
#include "omit/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omit {

/// Bright/dark and phase-dressed description of the two-mode system.
struct HybridModeReport {
    // bright/dark hybridization (eta = 0 picture)
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double zeta = 0.0;
    double g_plus = 0.0;
    // phase-dressed modes
    double f = 0.0;
    double h = 0.0;
    cd g_tilde_plus;
    cd g_tilde_minus;
    double omega_tilde_plus = 0.0;
    double omega_tilde_minus = 0.0;
    // linearized couplings G_l = g_l |alpha|
    double g1 = 0.0;
    double g2 = 0.0;
};

HybridModeReport hybridize_two_mode(const SystemConfig& config, const SteadyState& steady);

struct DarkModeStatus {
    bool broken = false;
    double min_coupling = 0.0; // min(|G~+|, |G~-|)
};

/// Broken iff min(|G~+|, |G~-|) > tolerance * G_+.
DarkModeStatus dark_mode_broken(const SystemConfig& config, const SteadyState& steady,
                                double tolerance = 1e-6);

struct AdiabaticParams {
    std::optional<cd> xi1;
    std::optional<cd> xi2;
    std::vector<double> gamma_opt;
    std::vector<double> omega_opt;
    // Only defined when all modes are identical.
    std::optional<double> gamma_eff;
    std::optional<double> omega_eff;
    std::vector<std::string> warnings;
};

/// Cavity eliminated adiabatically (eta = 0). Exact expressions, no asymptotics.
AdiabaticParams adiabatic_elimination(const SystemConfig& config, const SteadyState& steady);

/// gamma_m + N gamma_opt for N identical, uncoupled modes.
double predict_linewidth(const SystemConfig& config, const SteadyState& steady);

struct LinewidthFit {
    double center = 0.0;                // rad/s
    double fwhm = 0.0;                  // Lorentzian full width from the peak core, rad/s
    double half_prominence_width = 0.0; // raw width at half prominence, rad/s
    double peak_height = 0.0;
    double baseline = 0.0;
    std::size_t window_count = 0;
};

struct PeakOptions {
    double prominence = 0.05; // fraction of the spectrum's full scale
    double core_fraction = 0.1; // top fraction of the prominence used by the Lorentzian fit
};

/// Transparency windows of a dense |t_p|^2 trace, sorted by center.
std::vector<LinewidthFit> fit_linewidth(std::span<const double> omega, std::span<const double> rate,
                                        const PeakOptions& options = {});

std::vector<LinewidthFit> fit_linewidth(const Spectrum& spectrum, const PeakOptions& options = {});

} // namespace omit
