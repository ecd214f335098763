#include "omit/core_model.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omit {

namespace {

constexpr double kTurnQuantum = 1.0 / 68719476736.0; // 2^-36

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be positive and finite");
    }
}

// beta per unit intracavity photon number: M beta_hat = -i g.
Eigen::VectorXcd unit_betas(const SystemConfig& config) {
    const auto n = static_cast<Eigen::Index>(config.modes.size());
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        rhs(l) = cd(0.0, -config.modes[l].g);
    }
    Eigen::PartialPivLU<CMatrixd> lu(mechanical_dynamics_matrix(config));
    if (!(lu.rcond() > 1e-15)) {
        throw NumericalSingularity("mechanical steady-state system is singular");
    }
    return lu.solve(rhs);
}

double optical_shift_per_photon(const Eigen::VectorXcd& unit, const SystemConfig& config) {
    double s = 0.0;
    for (std::size_t l = 0; l < config.modes.size(); ++l) {
        s += 2.0 * config.modes[l].g * unit(static_cast<Eigen::Index>(l)).real();
    }
    return s;
}

struct FixedPoint {
    double delta;
    double residual;
    int iterations;
    bool converged;
};

FixedPoint iterate_detuning(double start, double delta_c, double shift, double eps2, double kappa,
                            const SteadyStateOptions& opt) {
    auto map = [&](double d) { return delta_c + shift * eps2 / (kappa * kappa + d * d); };
    auto rel = [&](double d, double f) { return std::abs(f - d) / std::max(std::abs(d), kappa); };

    double d = start;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iters; ++it) {
        const double f = map(d);
        const double r = rel(d, f);
        best = std::min(best, r);
        if (r < opt.tolerance) {
            // one undamped step: the map is contracting near a stable fixed point
            const double next = f;
            const double r_next = rel(next, map(next));
            if (r_next <= r) {
                return {next, r_next, it + 1, true};
            }
            return {d, r, it + 1, true};
        }
        if (!std::isfinite(f)) {
            break;
        }
        d += opt.damping * (f - d);
    }
    return {d, best, opt.max_iters, false};
}

} // namespace

double drive_amplitude(double power, double kappa, double omega) {
    require_positive(kappa, "kappa");
    require_positive(omega, "omega");
    if (!(power >= 0.0)) {
        throw InvalidParameter("power must be non-negative");
    }
    return std::sqrt(2.0 * kappa * power / (constants::hbar * omega));
}

double optical_angular_frequency(double wavelength) {
    require_positive(wavelength, "wavelength");
    return constants::two_pi * constants::speed_of_light / wavelength;
}

double derive_single_photon_coupling(double wavelength, double cavity_length, double mass,
                                     double omega_m) {
    require_positive(wavelength, "wavelength");
    require_positive(cavity_length, "cavity_length");
    require_positive(mass, "mass");
    require_positive(omega_m, "omega_m");
    const double omega_c = optical_angular_frequency(wavelength);
    const double x_zpf = std::sqrt(constants::hbar / (2.0 * mass * omega_m));
    return omega_c / cavity_length * x_zpf;
}

double canonical_phase(double theta) {
    if (!std::isfinite(theta)) {
        throw InvalidParameter("phase must be finite");
    }
    double turns = theta / constants::two_pi;
    turns -= std::floor(turns);
    turns = std::round(turns / kTurnQuantum) * kTurnQuantum;
    if (turns >= 1.0) {
        turns = 0.0;
    }
    return turns * constants::two_pi;
}

SystemConfig canonicalized(SystemConfig config) {
    for (auto& c : config.couplings) {
        c.theta = canonical_phase(c.theta);
    }
    return config;
}

std::vector<std::string> validate(const SystemConfig& config) {
    std::vector<std::string> warnings;
    require_positive(config.cavity.kappa, "kappa");
    if (config.cavity.wavelength) {
        require_positive(*config.cavity.wavelength, "wavelength");
    }
    if (config.cavity.cavity_length) {
        require_positive(*config.cavity.cavity_length, "cavity_length");
    }
    if (!std::isfinite(config.cavity.delta_c)) {
        throw InvalidParameter("delta_c must be finite");
    }
    if (config.modes.empty()) {
        throw InvalidParameter("at least one mechanical mode is required");
    }
    for (const auto& m : config.modes) {
        require_positive(m.omega, "mode omega");
        require_positive(m.gamma, "mode gamma");
        if (!std::isfinite(m.g)) {
            throw InvalidParameter("mode g must be finite");
        }
    }
    if (config.couplings.size() + 1 != config.modes.size()) {
        throw InvalidParameter("couplings must number modes - 1 (chain topology)");
    }
    for (const auto& c : config.couplings) {
        if (!(c.eta >= 0.0) || !std::isfinite(c.eta)) {
            throw InvalidParameter("coupling eta must be non-negative");
        }
        if (!std::isfinite(c.theta)) {
            throw InvalidParameter("coupling theta must be finite");
        }
    }
    if (!(config.drive.power_pump >= 0.0) || !std::isfinite(config.drive.power_pump)) {
        throw InvalidParameter("power_pump must be non-negative");
    }
    require_positive(config.drive.omega_pump, "omega_pump");
    const double r = config.drive.probe_ratio;
    if (!(r >= 0.0) || r > 0.1) {
        throw InvalidParameter("probe_ratio must lie in [0, 0.1]");
    }
    if (r > 0.05) {
        warnings.emplace_back("probe_ratio above 0.05: second-order truncation error grows");
    }
    return warnings;
}

double pump_amplitude(const SystemConfig& config) {
    return drive_amplitude(config.drive.power_pump, config.cavity.kappa, config.drive.omega_pump);
}

double probe_amplitude(const SystemConfig& config) {
    return config.drive.probe_ratio * pump_amplitude(config);
}

CMatrixd mechanical_dynamics_matrix(const SystemConfig& config) {
    const auto n = static_cast<Eigen::Index>(config.modes.size());
    CMatrixd m = CMatrixd::Zero(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        m(l, l) = cd(config.modes[l].gamma, config.modes[l].omega);
    }
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const auto& c = config.couplings[j];
        m(j, j + 1) = cd(0.0, 1.0) * c.eta * std::polar(1.0, c.theta);
        m(j + 1, j) = cd(0.0, 1.0) * c.eta * std::polar(1.0, -c.theta);
    }
    return m;
}

SteadyState solve_steady_state(const SystemConfig& raw, const SteadyStateOptions& options) {
    const SystemConfig config = canonicalized(raw);
    validate(config);

    const double kappa = config.cavity.kappa;
    const double delta_c = config.cavity.delta_c;
    const double eps = pump_amplitude(config);
    const double eps2 = eps * eps;
    const Eigen::VectorXcd unit = unit_betas(config);
    const double shift = optical_shift_per_photon(unit, config);

    FixedPoint fp = iterate_detuning(delta_c, delta_c, shift, eps2, kappa, options);
    if (!fp.converged) {
        throw NonConvergent("steady-state detuning iteration did not converge", fp.residual);
    }

    SteadyState s;
    s.delta_eff = fp.delta;
    s.alpha = eps / cd(kappa, fp.delta);
    s.betas = std::norm(s.alpha) * unit;
    s.converged = true;
    s.iterations = fp.iterations;
    s.residual = fp.residual;

    if (options.check_multistability && eps2 > 0.0) {
        const double decoupled = delta_c + shift * eps2 / (kappa * kappa + delta_c * delta_c);
        const FixedPoint alt = iterate_detuning(decoupled, delta_c, shift, eps2, kappa, options);
        if (alt.converged) {
            const double scale = std::max({std::abs(fp.delta), std::abs(alt.delta), kappa});
            s.multistable = std::abs(alt.delta - fp.delta) > 1e-6 * scale;
        }
    }
    return s;
}

double steady_state_residual(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    const double kappa = config.cavity.kappa;
    const double eps = pump_amplitude(config);

    double worst = 0.0;
    const cd alpha_rhs = eps / cd(kappa, steady.delta_eff);
    if (eps > 0.0) {
        worst = std::max(worst, std::abs(steady.alpha - alpha_rhs) / std::abs(alpha_rhs));
    } else {
        worst = std::max(worst, std::abs(steady.alpha));
    }

    const auto n = static_cast<Eigen::Index>(config.modes.size());
    const CMatrixd m = mechanical_dynamics_matrix(config);
    const double photons = std::norm(steady.alpha);
    Eigen::VectorXcd drive(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        drive(l) = cd(0.0, -config.modes[l].g * photons);
    }
    const Eigen::VectorXcd r = m * steady.betas - drive;
    const double scale = (m.cwiseAbs() * steady.betas.cwiseAbs()).maxCoeff() + drive.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
        worst = std::max(worst, r.cwiseAbs().maxCoeff() / scale);
    }

    double delta = config.cavity.delta_c;
    for (Eigen::Index l = 0; l < n; ++l) {
        delta += 2.0 * config.modes[l].g * steady.betas(l).real();
    }
    worst = std::max(worst, std::abs(delta - steady.delta_eff) /
                                std::max(std::abs(steady.delta_eff), kappa));
    return worst;
}

double bare_detuning_for_effective(const SystemConfig& raw, double delta_eff) {
    const SystemConfig config = canonicalized(raw);
    validate(config);
    const double kappa = config.cavity.kappa;
    const double eps = pump_amplitude(config);
    const Eigen::VectorXcd unit = unit_betas(config);
    const double shift = optical_shift_per_photon(unit, config);
    return delta_eff - shift * eps * eps / (kappa * kappa + delta_eff * delta_eff);
}

Eigen::VectorXd linearized_couplings(const SystemConfig& config, const SteadyState& steady) {
    const double amp = std::abs(steady.alpha);
    Eigen::VectorXd g(static_cast<Eigen::Index>(config.modes.size()));
    for (std::size_t l = 0; l < config.modes.size(); ++l) {
        g(static_cast<Eigen::Index>(l)) = config.modes[l].g * amp;
    }
    return g;
}

} // namespace omit
