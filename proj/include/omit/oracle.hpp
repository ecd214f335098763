#pragma once

#include "omit/sidebands.hpp"
#include "omit/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omit {

/// Uniformly sampled mean-field trajectory in the frame rotating at the pump.
struct TimeTrace {
    std::vector<double> times;
    std::vector<cd> a;
    std::vector<Eigen::VectorXcd> b;
    double step = 0.0;
    std::string method;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

struct IntegrationOptions {
    double probe_detuning = 0.0; // Omega; the probe term is eps_p e^{-i Omega t}
    double rtol = 1e-10;
    double atol = 0.0;           // 0: rtol times the drive scale
    double record_from = 0.0;    // samples before this time are not stored
    bool start_from_steady = true;
    std::optional<cd> initial_a;
    std::optional<Eigen::VectorXcd> initial_b;
};

/// Dormand-Prince 5(4) with the 4th-order continuous extension, resampled onto
/// t = record_from + k step.
TimeTrace integrate_mean_field(const SystemConfig& config, double t_final, double step,
                               const IntegrationOptions& options = {});

/// Largest admissible output step: 2 pi / (50 max(omega_l, |Delta_c|, Omega)).
double max_oracle_step(const SystemConfig& config, double probe_detuning);

/// Output step dividing one probe period into an integer number of samples, within the bound above.
double oracle_step(const SystemConfig& config, double probe_detuning);

/// 20 slowest decay times: 20 / min(kappa, gamma_l).
double settle_time(const SystemConfig& config);

struct DemodResult {
    cd a1_minus; // e^{-i Omega t}
    cd a1_plus;  // e^{+i Omega t}
    cd a2_minus; // e^{-2i Omega t}
    cd a2_plus;  // e^{+2i Omega t}
    cd mean;
    double residual = 0.0; // power outside DC and the four tones, relative to the fluctuation power
    std::size_t periods = 0;
    bool reliable = true;  // residual < 0.05
};

/// Least-squares projection of the samples after settle_time onto DC and the four tones,
/// over the longest whole number of probe periods (at least 50).
DemodResult demodulate(const TimeTrace& trace, double omega, double settle_time);

struct OracleCheckOptions {
    double probe_ratio = 0.01;
    std::size_t periods = 64;
    std::optional<double> settle; // default: settle_time(config)
    double rtol = 1e-10;
    int jobs = 1;
};

struct OracleComparison {
    double omega = 0.0;
    cd a1_frequency;
    cd a1_time;
    cd a2_frequency;
    cd a2_time;
    double error1 = 0.0;
    double error2 = 0.0;
    double residual = 0.0;
    bool reliable = true;
};

/// Frequency-domain sidebands against the demodulated time-domain trajectory.
std::vector<OracleComparison> oracle_check(const SystemConfig& config, std::span<const double> omegas,
                                           const OracleCheckOptions& options = {});

} // namespace omit
