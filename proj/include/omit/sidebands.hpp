#pragma once

#include "omit/core_model.hpp"
#include "omit/sideband_model.hpp"
#include "omit/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace omit {

/// Physical amplitudes of one sideband order: delta a = A^- e^{-i n Omega t} + A^+ e^{i n Omega t}.
struct SidebandOrder {
    cd a_minus;
    cd a_plus;
    Eigen::VectorXcd b_minus;
    Eigen::VectorXcd b_plus;
};

struct SidebandAmplitudes {
    SidebandOrder first;
    SidebandOrder second;
};

struct AuxCoefficients {
    TCoefficients<double> order1; // at Omega
    TCoefficients<double> order2; // at 2 Omega
    VCoefficients<double> v;
    cd chi1;
    cd chi2;
};

SidebandModel<double> make_sideband_model(const SystemConfig& config, const SteadyState& steady);

SidebandOrder to_order(const SidebandUnknowns<double>& u);

/// Closed-form A_1^- (two-mode only).
cd first_order_closed_form(const SystemConfig& config, const SteadyState& steady, double omega);

/// Direct solve of the 2(N+1) first-order equations, any N.
SidebandOrder solve_first_order_linear(const SystemConfig& config, const SteadyState& steady,
                                       double omega);

struct SecondOrderResult {
    SidebandOrder direct;        // canonical value
    cd a_minus_closed_form;      // closed form evaluated on the same first-order block
    double route_discrepancy;    // |closed - direct| / |direct|, 0 when both vanish
};

/// Second order for N <= 2. The closed form is only available (and only recorded) for N == 2.
SecondOrderResult solve_second_order(const SystemConfig& config, const SteadyState& steady,
                                     const SidebandOrder& first, double omega);

AuxCoefficients aux_coefficients(const SystemConfig& config, const SteadyState& steady, double omega);

struct Transmission {
    cd t;
    double rate;
};

Transmission transmission(cd a1_minus, double eps_probe, double kappa);

/// Lambda_p as a fraction (CSV output multiplies by 100).
double second_order_efficiency(cd a2_minus, double eps_probe, double kappa);

std::vector<double> unwrap_phase(std::span<const double> phase);

struct GroupDelay {
    double value; // seconds
    double step;  // finest finite-difference step used (rad/s)
};

/// d arg(t_p)/d Omega on a uniform grid: central differences at h, 2h, 4h with two
/// Richardson levels. Off-node points are linearly interpolated between nodes.
GroupDelay group_delay(std::span<const double> grid, std::span<const cd> t, double at);

/// Same estimator on a stencil evaluated directly around `at`.
/// step <= 0 picks 2% of the narrowest mechanical linewidth.
GroupDelay group_delay_at(const SystemConfig& config, const SteadyState& steady, double at,
                          double step = 0.0);

struct SpectrumPoint {
    double omega = 0.0; // probe-pump detuning Omega (rad/s)
    cd t;
    double transmission = 0.0;
    std::optional<double> efficiency; // fraction
    double phase = 0.0;               // arg t_p in (-pi, pi]
    double unwrapped_phase = 0.0;
    std::optional<double> group_delay;
    std::optional<double> route_discrepancy;
};

struct Spectrum {
    std::vector<SpectrumPoint> points;
    SteadyState steady;
    double omega_ref = 0.0; // first mechanical frequency, used for normalized output
    bool second_order = false;
    std::optional<double> max_route_discrepancy;
};

struct SpectrumOptions {
    int jobs = 1;
    bool second_order = true; // silently skipped for N >= 3
    bool group_delay = true;
};

Spectrum compute_spectrum(const SystemConfig& config, std::span<const double> grid,
                          const SpectrumOptions& options = {});

/// Same, reusing an already solved steady state.
Spectrum compute_spectrum(const SystemConfig& config, const SteadyState& steady,
                          std::span<const double> grid, const SpectrumOptions& options = {});

/// Evenly spaced grid including both ends.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

} // namespace omit
