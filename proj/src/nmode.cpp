#include "omit/nmode.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"

#include <cmath>

namespace omit {

NormalModeBasis build_normal_modes(std::size_t n, double omega_m, double eta, std::span<const double> thetas,
                                   double g) {
    if (n < 2) {
        throw InvalidParameter("normal-mode basis needs at least two modes");
    }
    if (thetas.size() + 1 != n) {
        throw InvalidParameter("normal-mode basis needs N - 1 phases");
    }
    if (!(eta >= 0.0)) {
        throw InvalidParameter("eta must be non-negative");
    }
    const auto size = static_cast<Eigen::Index>(n);
    const double np1 = static_cast<double>(n + 1);
    const double norm = std::sqrt(np1 / 2.0);

    NormalModeBasis b;
    b.n = n;
    b.phase_accumulator = Eigen::VectorXd::Zero(size);
    for (Eigen::Index j = 1; j < size; ++j) {
        b.phase_accumulator(j) = b.phase_accumulator(j - 1) + canonical_phase(thetas[j - 1]);
    }
    b.frequencies.resize(size);
    b.transform.resize(size, size);
    for (Eigen::Index k = 0; k < size; ++k) {
        const double kk = static_cast<double>(k + 1);
        b.frequencies(k) = omega_m + 2.0 * eta * std::cos(kk * constants::pi / np1);
    }
    for (Eigen::Index j = 0; j < size; ++j) {
        const cd phase = std::polar(1.0, -b.phase_accumulator(j));
        const double jj = static_cast<double>(j + 1);
        for (Eigen::Index k = 0; k < size; ++k) {
            const double kk = static_cast<double>(k + 1);
            b.transform(j, k) = phase * std::sin(jj * kk * constants::pi / np1) / norm;
        }
    }
    // a^dagger sum_j G b_j + h.c. = sum_k c_k a B_k^dagger + h.c. with c = transform^dagger (G ... G)
    b.effective_couplings = b.transform.adjoint() * Eigen::VectorXcd::Constant(size, cd(g, 0.0));
    return b;
}

cd even_mode_coupling(std::size_t n, std::size_t k, double g, double theta1) {
    if (k == 0 || k > n || k % 2 != 0) {
        throw InvalidParameter("even_mode_coupling needs an even k in [1, N]");
    }
    const double np1 = static_cast<double>(n + 1);
    const double norm = std::sqrt(np1 / 2.0);
    const cd e = std::polar(1.0, canonical_phase(theta1));
    return g / norm * (1.0 - e) * std::sin(static_cast<double>(k) * constants::pi / np1);
}

NormalModeBasis normal_modes_from(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    validate(config);
    const auto& ref = config.modes.front();
    for (const auto& m : config.modes) {
        if (m.omega != ref.omega || m.gamma != ref.gamma || m.g != ref.g) {
            throw UnsupportedTopology("normal-mode analytics need identical mechanical modes");
        }
    }
    std::vector<double> thetas;
    for (const auto& c : config.couplings) {
        if (c.eta != config.couplings.front().eta) {
            throw UnsupportedTopology("normal-mode analytics need a uniform exchange strength");
        }
        thetas.push_back(c.theta);
    }
    const double eta = config.couplings.empty() ? 0.0 : config.couplings.front().eta;
    return build_normal_modes(config.modes.size(), ref.omega, eta, thetas, ref.g * std::abs(steady.alpha));
}

cd solve_first_order_normal_basis(const SystemConfig& raw, const SteadyState& steady,
                                  const NormalModeBasis& basis, double omega) {
    const SystemConfig config = canonicalized(raw);
    const auto n = static_cast<Eigen::Index>(basis.n);
    if (static_cast<std::size_t>(n) != config.modes.size()) {
        throw InvalidParameter("basis size differs from the configuration");
    }
    const cd i(0.0, 1.0);
    const double kappa = config.cavity.kappa;
    const double delta = steady.delta_eff;
    const double gamma = config.modes.front().gamma;
    const cd p = std::abs(steady.alpha) > 0.0 ? steady.alpha / std::abs(steady.alpha) : cd(1.0);
    const cd pc = std::conj(p);
    auto bm = [](Eigen::Index k) { return 2 + k; };
    auto bp = [n](Eigen::Index k) { return 2 + n + k; };

    CMatrixd mat = CMatrixd::Zero(2 * n + 2, 2 * n + 2);
    mat(0, 0) = cd(kappa, delta - omega);
    mat(1, 1) = cd(kappa, -(delta + omega));
    for (Eigen::Index k = 0; k < n; ++k) {
        const cd c = basis.effective_couplings(k);
        const cd cc = std::conj(c);
        mat(0, bm(k)) = i * p * cc;
        mat(0, bp(k)) = i * p * c;
        mat(1, bm(k)) = -i * pc * cc;
        mat(1, bp(k)) = -i * pc * c;
        mat(bm(k), 0) = i * pc * c;
        mat(bm(k), 1) = i * p * c;
        mat(bp(k), 0) = -i * pc * cc;
        mat(bp(k), 1) = -i * p * cc;
        mat(bm(k), bm(k)) = cd(gamma, basis.frequencies(k) - omega);
        mat(bp(k), bp(k)) = cd(gamma, -(basis.frequencies(k) + omega));
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * n + 2);
    rhs(0) = probe_amplitude(config);
    return solve_dense<double>(mat, rhs)(0);
}

Spectrum n_mode_spectrum(const SystemConfig& config, std::span<const double> grid, int jobs) {
    SpectrumOptions options;
    options.jobs = jobs;
    options.second_order = false;
    return compute_spectrum(config, grid, options);
}

std::size_t count_windows(const Spectrum& spectrum, const PeakOptions& options) {
    return fit_linewidth(spectrum, options).size();
}

} // namespace omit
