#pragma once

#include "omit/constants.hpp"
#include "omit/core_model.hpp"
#include "omit/types.hpp"

#include <random>

namespace omit::testing {

inline constexpr double kOmegaM = 2.0 * constants::pi * 947e3;
inline constexpr double kKappa = 2.0 * constants::pi * 215e3;
inline constexpr double kGamma = kOmegaM / 6700.0;

// Frozen by independent evaluation: (2 pi c / 1064 nm) / 25 mm * sqrt(hbar / (2 * 145 ng * omega_m)).
inline constexpr double kPaperG = 17.506248640006515;
// sqrt(2 kappa P / (hbar omega_L)) at 1.5 mW.
inline constexpr double kPaperEps = 147333748844.16378;

/// Two identical modes at the operating point Delta = omega_m.
inline SystemConfig paper_config(std::size_t n = 2, double eta = 0.0, double theta = 0.0,
                                 double power = 1.5e-3) {
    SystemConfig c;
    c.cavity.kappa = kKappa;
    c.cavity.wavelength = 1064e-9;
    c.cavity.cavity_length = 25e-3;
    for (std::size_t i = 0; i < n; ++i) {
        c.modes.push_back({kOmegaM, kGamma, kPaperG});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c.couplings.push_back({eta, theta});
    }
    c.drive.power_pump = power;
    c.drive.probe_ratio = 0.05;
    c.drive.omega_pump = optical_angular_frequency(1064e-9);
    c.cavity.delta_c = bare_detuning_for_effective(c, kOmegaM);
    c.cavity.pinned_delta_eff = kOmegaM;
    return c;
}

/// Random two-mode draw with moderate dimensionless ratios (units of omega = 1).
inline SystemConfig random_config(std::mt19937_64& rng, std::size_t n = 2) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
    SystemConfig c;
    c.cavity.kappa = log_uniform(1e-2, 1.0);
    c.cavity.delta_c = -3.0 + 6.0 * u(rng);
    for (std::size_t i = 0; i < n; ++i) {
        c.modes.push_back({0.5 + u(rng), log_uniform(1e-4, 1e-1), log_uniform(1e-4, 1e-2)});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c.couplings.push_back({log_uniform(1e-3, 0.3), constants::two_pi * u(rng)});
    }
    c.drive.omega_pump = 1.0;
    // pick a power giving |alpha| of order 1..10
    c.drive.power_pump = log_uniform(1e-1, 1e2) * constants::hbar * c.cavity.kappa / 2.0;
    c.drive.probe_ratio = 0.05;
    return c;
}

} // namespace omit::testing
