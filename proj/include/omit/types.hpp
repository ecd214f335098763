#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace omit {

// All frequencies are angular (rad/s), all other quantities SI.

struct CavityParams {
    double kappa = 0.0;   // amplitude decay rate
    double delta_c = 0.0; // bare cavity-pump detuning
    std::optional<double> wavelength;
    std::optional<double> cavity_length;
    // When set, delta_c was resolved so that the effective detuning equals this value.
    std::optional<double> pinned_delta_eff;

    bool operator==(const CavityParams&) const = default;
};

struct MechanicalMode {
    double omega = 0.0;
    double gamma = 0.0;
    double g = 0.0; // single-photon optomechanical coupling

    bool operator==(const MechanicalMode&) const = default;
};

// Chain coupling between mode j and j+1: eta (e^{i theta} b_j^+ b_{j+1} + h.c.).
struct PhononCoupling {
    double eta = 0.0;
    double theta = 0.0;

    bool operator==(const PhononCoupling&) const = default;
};

struct DriveSpec {
    double power_pump = 0.0;  // W
    double probe_ratio = 0.0; // eps_p / eps_L
    double omega_pump = 0.0;  // laser angular frequency

    bool operator==(const DriveSpec&) const = default;
};

struct SystemConfig {
    CavityParams cavity;
    std::vector<MechanicalMode> modes;
    std::vector<PhononCoupling> couplings; // size modes.size() - 1
    DriveSpec drive;

    std::size_t mode_count() const { return modes.size(); }
    bool operator==(const SystemConfig&) const = default;
};

struct SteadyState {
    std::complex<double> alpha;
    Eigen::VectorXcd betas;
    double delta_eff = 0.0;
    bool converged = false;
    bool multistable = false;
    int iterations = 0;
    double residual = 0.0;
};

} // namespace omit
