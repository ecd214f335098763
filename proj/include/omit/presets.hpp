#pragma once

#include "omit/darkmode.hpp"
#include "omit/sidebands.hpp"
#include "omit/types.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace omit {

/// Reference device: lambda = 1064 nm, L = 25 mm, kappa = 2 pi 215 kHz, omega_m = 2 pi 947 kHz,
/// m = 145 ng, Q = 6700, identical modes, Delta = omega_m, eps_p = 0.05 eps_L.
SystemConfig reference_config(std::size_t modes = 2, double eta_over_omega_m = 0.0, double theta = 0.0,
                              double power = 1.5e-3);

struct Extremum {
    double at = 0.0;
    double value = 0.0;
};

/// Maximum of f over [lo, hi]: uniform scan, then repeated zooming around the best sample.
Extremum maximize_scan(const std::function<double(double)>& f, double lo, double hi, std::size_t samples,
                       int refinements = 8, int jobs = 1);

/// Largest Lambda_p on the grid (fraction).
double max_efficiency(const SystemConfig& config, std::span<const double> grid, int jobs = 1);

/// Group delay at fixed Omega as a function of theta (first coupling).
double group_delay_vs_theta(const SystemConfig& config, double omega, double theta);

std::vector<std::string> figure_names();

struct FigureOutput {
    std::vector<std::string> files;
    std::string summary_json;
};

/// Runs the sweeps behind one figure, writes CSVs and summary.json into out_dir.
FigureOutput figure_preset(const std::string& name, const std::filesystem::path& out_dir, int jobs = 1);

} // namespace omit
