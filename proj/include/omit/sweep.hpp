#pragma once

#include "omit/sidebands.hpp"
#include "omit/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace omit {

/// Probe-detuning grid in units of the first mechanical frequency.
struct GridSpec {
    double start = 0.8;
    double stop = 1.2;
    std::size_t count = 4001;

    std::vector<double> absolute(double omega_ref) const;
};

/// "start:stop:count"
GridSpec parse_grid(const std::string& text);

struct SweepSpec {
    std::string parameter; // dotted config key, see set_parameter
    std::vector<double> values;
    GridSpec grid;
    bool second_order = true;
};

std::vector<double> sweep_values(double start, double stop, std::size_t count, bool logarithmic);

struct SweepPoint {
    std::size_t index = 0;
    double value = 0.0;
    bool ok = false;
    std::string error;
    bool converged = false;
    bool multistable = false;
    int iterations = 0;
    double residual = 0.0;
    std::optional<double> max_route_discrepancy;
    std::optional<Spectrum> spectrum;
};

/// Evaluates every point (in parallel) and returns them in sweep order. Failures are recorded
/// per point and never abort the sweep.
std::vector<SweepPoint> evaluate_sweep(const SystemConfig& config, const SweepSpec& spec, int jobs = 1);

struct SweepBundle {
    std::vector<SweepPoint> points;
    std::vector<std::string> files;     // relative to the output directory, empty for failed points
    std::vector<std::string> checksums; // FNV-1a of each file
    std::string bundle_checksum;
    std::filesystem::path manifest;

    /// 0 all points ok, 4 some failed, 3 all failed.
    int exit_code() const;
};

/// Writes point_NNNN.csv files and manifest.json into out_dir from a single writer.
SweepBundle run_sweep(const SystemConfig& config, const SweepSpec& spec, const std::filesystem::path& out_dir,
                      int jobs = 1);

} // namespace omit
