#pragma once

#include "omit/linalg.hpp"
#include "omit/types.hpp"

#include <string>
#include <vector>

namespace omit {

/// Drive amplitude sqrt(2 kappa P / (hbar omega)) in s^-1.
double drive_amplitude(double power, double kappa, double omega);

/// Fabry-Perot single-photon coupling g = (omega_c / L) sqrt(hbar / (2 m omega_m)),
/// with omega_c = 2 pi c / lambda.
double derive_single_photon_coupling(double wavelength, double cavity_length, double mass,
                                     double omega_m);

double optical_angular_frequency(double wavelength);

/// Reduce to [0, 2pi), snapped to a 2^-36 turn grid so that theta and theta + 2pi
/// map to the same double.
double canonical_phase(double theta);

SystemConfig canonicalized(SystemConfig config);

/// Throws InvalidParameter on a violated invariant; returns non-fatal warnings.
std::vector<std::string> validate(const SystemConfig& config);

double pump_amplitude(const SystemConfig& config);
double probe_amplitude(const SystemConfig& config);

/// gamma_l + i omega_l on the diagonal, i eta_j e^{+-i theta_j} on the off-diagonals.
/// Multiplying the vector of mechanical amplitudes gives minus their time derivative
/// (without optical terms).
CMatrixd mechanical_dynamics_matrix(const SystemConfig& config);

struct SteadyStateOptions {
    double damping = 0.5;
    double tolerance = 1e-12;
    int max_iters = 10000;
    bool check_multistability = true;
};

SteadyState solve_steady_state(const SystemConfig& config, const SteadyStateOptions& options = {});

/// Largest relative residual of the alpha, beta and Delta defining equations.
double steady_state_residual(const SystemConfig& config, const SteadyState& steady);

/// Bare detuning Delta_c for which the self-consistent effective detuning equals delta_eff.
double bare_detuning_for_effective(const SystemConfig& config, double delta_eff);

/// G_l = g_l |alpha|.
Eigen::VectorXd linearized_couplings(const SystemConfig& config, const SteadyState& steady);

} // namespace omit
