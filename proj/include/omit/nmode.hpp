#pragma once

#include "omit/darkmode.hpp"
#include "omit/sidebands.hpp"
#include "omit/types.hpp"

#include <span>

namespace omit {

/// Normal modes of a uniform phonon chain with per-link phases.
///
/// transform(j, k) = e^{-i phi_j} sin(j k pi / (N + 1)) / A, A = sqrt((N + 1) / 2),
/// so that the bare amplitudes are delta b = transform * B.
struct NormalModeBasis {
    std::size_t n = 0;
    Eigen::VectorXd frequencies;         // Omega_k = omega_m + 2 eta cos(k pi / (N + 1))
    Eigen::MatrixXcd transform;
    Eigen::VectorXcd effective_couplings; // cavity -> B_k, multiplies a B_k^dagger
    Eigen::VectorXd phase_accumulator;   // phi_j = sum_{nu < j} theta_nu, phi_1 = 0
};

/// thetas has N - 1 entries. g is the (uniform, real) linearized coupling G.
NormalModeBasis build_normal_modes(std::size_t n, double omega_m, double eta, std::span<const double> thetas,
                                   double g);

/// Closed form for even k with theta_j = 0 for j >= 2.
cd even_mode_coupling(std::size_t n, std::size_t k, double g, double theta1);

/// Basis of a uniform config at its steady state. Non-uniform chains are rejected.
NormalModeBasis normal_modes_from(const SystemConfig& config, const SteadyState& steady);

/// A_1^- with the cavity coupled to the normal modes through the effective couplings.
cd solve_first_order_normal_basis(const SystemConfig& config, const SteadyState& steady,
                                  const NormalModeBasis& basis, double omega);

/// First-order spectrum for any N (second order is not evaluated).
Spectrum n_mode_spectrum(const SystemConfig& config, std::span<const double> grid, int jobs = 1);

std::size_t count_windows(const Spectrum& spectrum, const PeakOptions& options = {});

} // namespace omit
