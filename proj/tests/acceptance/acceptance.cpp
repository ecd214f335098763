// One line per acceptance criterion. Exit status is the number of failures.
#include "fixtures.hpp"

#include "omit/darkmode.hpp"
#include "omit/nmode.hpp"
#include "omit/oracle.hpp"
#include "omit/presets.hpp"
#include "omit/sidebands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace omit;
using namespace omit::testing;

namespace {

// Tolerances
constexpr double kRouteFirst = 1e-10;
constexpr double kRouteSecond = 1e-9;
constexpr double kBrightPointwise = 1e-8;
constexpr double kDoublingLo = 1.8, kDoublingHi = 2.05;
constexpr double kNScaling = 0.10;
constexpr double kWindowCenter = 0.005;
constexpr double kParity = 1e-10;
constexpr double kEvenCoupling = 1e-12;
constexpr double kNonzeroCoupling = 1e-6;
constexpr double kEnhanceLo = 2.2, kEnhanceHi = 4.0;
constexpr double kHalfPiLo = 0.06, kHalfPiHi = 0.12;
constexpr double kPiLo = 0.09, kPiHi = 0.16;
constexpr double kLeftLo = 350e-6, kLeftHi = 700e-6;
constexpr double kRightLo = 430e-6, kRightHi = 810e-6;
constexpr double kDelayRatio = 10.0;
constexpr double kOracle = 0.01;
constexpr double kAdiabaticLimit = 5e-3;
constexpr double kGammaEff = 0.15;
constexpr double kDelayHalving = 1e-3;
constexpr double kSteadyResidual = 1e-12;
constexpr double kUnitary = 1e-12;

const int kJobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, auto... args) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += buf;
        pass = pass && ok;
    }
};

double rel(cd a, cd b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

std::vector<double> window_grid(double lo = 0.8, double hi = 1.2, std::size_t n = 4001) {
    return linear_grid(lo * kOmegaM, hi * kOmegaM, n);
}

SpectrumOptions first_only() { return {kJobs, false, false}; }

// Most prominent window.
LinewidthFit main_window(const Spectrum& s) {
    const auto fits = fit_linewidth(s);
    if (fits.empty()) {
        return {};
    }
    return *std::max_element(fits.begin(), fits.end(), [](const LinewidthFit& a, const LinewidthFit& b) {
        return a.peak_height - a.baseline < b.peak_height - b.baseline;
    });
}

Verdict route_equivalence() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_config(rng);
        const auto s = solve_steady_state(c);
        const double w = u(rng);
        const auto direct = solve_first_order_linear(c, s, w);
        worst1 = std::max(worst1, rel(first_order_closed_form(c, s, w), direct.a_minus));
        worst2 = std::max(worst2, solve_second_order(c, s, direct, w).route_discrepancy);
    }
    Verdict v;
    v.require(worst1 < kRouteFirst, "first order %.2e < %.0e", worst1, kRouteFirst);
    v.require(worst2 < kRouteSecond, "second order %.2e < %.0e", worst2, kRouteSecond);
    return v;
}

Verdict bright_mode_reduction() {
    Verdict v;
    const auto grid = window_grid(0.8, 1.2, 2001);
    for (std::size_t n : {2, 3, 4}) {
        const auto multi = paper_config(n);
        auto single = paper_config(1);
        single.modes[0].g = std::sqrt(static_cast<double>(n)) * kPaperG;
        single.cavity.delta_c = bare_detuning_for_effective(single, kOmegaM);
        SpectrumOptions o{kJobs, n == 2, false};
        const auto a = compute_spectrum(multi, grid, o);
        const auto b = compute_spectrum(single, grid, o);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(a.points[i].t - b.points[i].t));
            if (n == 2) {
                worst = std::max(worst, std::abs(*a.points[i].efficiency - *b.points[i].efficiency));
            }
        }
        v.require(worst < kBrightPointwise, "N=%zu %.2e", n, worst);
    }
    return v;
}

Verdict linewidth_doubling() {
    Verdict v;
    const auto grid = window_grid();
    for (double p : {0.5e-3, 1.0e-3, 1.5e-3, 2.0e-3}) {
        const double one = main_window(compute_spectrum(paper_config(1, 0, 0, p), grid, first_only())).fwhm;
        const double two = main_window(compute_spectrum(paper_config(2, 0, 0, p), grid, first_only())).fwhm;
        const double r = two / one;
        v.require(r >= kDoublingLo && r <= kDoublingHi, "%.1f mW %.3f", p * 1e3, r);
    }
    return v;
}

Verdict n_scaling() {
    Verdict v;
    const auto grid = window_grid();
    const double one = main_window(n_mode_spectrum(paper_config(1), grid, kJobs)).fwhm;
    for (std::size_t n : {2, 3, 4}) {
        const double r = main_window(n_mode_spectrum(paper_config(n), grid, kJobs)).fwhm / one;
        const double dev = std::abs(r / static_cast<double>(n) - 1.0);
        v.require(dev <= kNScaling, "N=%zu ratio %.3f", n, r);
    }
    return v;
}

Verdict window_splitting() {
    Verdict v;
    const auto grid = window_grid();
    const double eta = 0.05 * kOmegaM;
    const auto broken = compute_spectrum(paper_config(2, eta, 0.5 * constants::pi), grid, first_only());
    const auto fits = fit_linewidth(broken);
    v.require(fits.size() == 2, "theta=pi/2 %zu windows", fits.size());
    if (fits.size() == 2) {
        const double l = fits[0].center / kOmegaM, r = fits[1].center / kOmegaM;
        v.require(std::abs(l - 0.95) <= kWindowCenter && std::abs(r - 1.05) <= kWindowCenter,
                  "centers %.4f %.4f", l, r);
    }
    for (double theta : {0.0, constants::pi}) {
        const auto s = compute_spectrum(paper_config(2, eta, theta), grid, first_only());
        const auto k = count_windows(s);
        v.require(k == 1, "theta=%.0fpi %zu window", theta / constants::pi, k);
    }
    for (std::size_t n : {3, 4}) {
        const auto k = count_windows(n_mode_spectrum(paper_config(n, eta, 0.5 * constants::pi), grid, kJobs));
        v.require(k == n, "N=%zu broken %zu windows", n, k);
    }
    return v;
}

Verdict theta_symmetry() {
    Verdict v;
    const auto grid = window_grid(0.7, 1.3, 601);
    double worst = 0.0;
    for (double theta : {0.1, 0.37, 0.5 * constants::pi, 2.0, 3.0}) {
        for (double eta : {0.02, 0.1}) {
            for (double mirrored : {constants::two_pi - theta, theta + constants::two_pi}) {
                SpectrumOptions o{kJobs, true, false};
                const auto a = compute_spectrum(paper_config(2, eta * kOmegaM, theta), grid, o);
                const auto b = compute_spectrum(paper_config(2, eta * kOmegaM, mirrored), grid, o);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    worst = std::max(worst, std::abs(a.points[i].transmission - b.points[i].transmission));
                    worst = std::max(worst, std::abs(*a.points[i].efficiency - *b.points[i].efficiency));
                }
            }
        }
    }
    v.require(worst < kParity, "max change %.2e", worst);
    return v;
}

Verdict even_mode_decoupling() {
    Verdict v;
    const double g = 1.0;
    double worst_even = 0.0, weakest = INFINITY;
    for (std::size_t n = 2; n <= 16; ++n) {
        std::vector<double> zero(n - 1, 0.0), half(n - 1, 0.0);
        half[0] = 0.5 * constants::pi;
        const auto a = build_normal_modes(n, kOmegaM, 0.05 * kOmegaM, zero, g);
        const auto b = build_normal_modes(n, kOmegaM, 0.05 * kOmegaM, half, g);
        for (std::size_t k = 1; k <= n; ++k) {
            if (k % 2 == 0) {
                worst_even = std::max(worst_even, std::abs(a.effective_couplings(k - 1)));
            }
            weakest = std::min(weakest, std::abs(b.effective_couplings(k - 1)));
        }
    }
    v.require(worst_even < kEvenCoupling * g, "theta1=0 even max %.2e", worst_even);
    v.require(weakest > kNonzeroCoupling * g, "theta1=pi/2 min %.3f", weakest);
    return v;
}

Verdict second_order_enhancement() {
    Verdict v;
    const auto grid = window_grid(0.5, 1.5, 4001);
    const double pi_max = max_efficiency(paper_config(2, 0.2 * kOmegaM, constants::pi), grid, kJobs);
    const double zero_max = max_efficiency(paper_config(2, 0.2 * kOmegaM, 0.0), grid, kJobs);
    const auto etas = linear_grid(0.0, 0.2, 81);
    std::vector<double> best(etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) {
        best[i] = max_efficiency(paper_config(2, etas[i] * kOmegaM, 0.5 * constants::pi), grid, kJobs);
    }
    const double half_pi_max = *std::max_element(best.begin(), best.end());
    const double r = pi_max / zero_max;
    v.require(r >= kEnhanceLo && r <= kEnhanceHi, "ratio %.2f", r);
    v.require(half_pi_max >= kHalfPiLo && half_pi_max <= kHalfPiHi, "theta=pi/2 sweep %.2f%%", 100 * half_pi_max);
    v.require(pi_max >= kPiLo && pi_max <= kPiHi, "theta=pi %.2f%%", 100 * pi_max);
    return v;
}

Verdict group_delay_extrema() {
    Verdict v;
    const auto base = paper_config(2, 0.05 * kOmegaM);
    const auto left = maximize_scan([&](double t) { return group_delay_vs_theta(base, 0.95 * kOmegaM, t); }, 0.0,
                                    constants::two_pi, 2001, 8, kJobs);
    const auto right = maximize_scan([&](double t) { return group_delay_vs_theta(base, 1.05 * kOmegaM, t); }, 0.0,
                                     constants::two_pi, 2001, 8, kJobs);
    const auto u = paper_config(2);
    const double unbroken = group_delay_at(u, solve_steady_state(u), kOmegaM).value;
    const double ratio = std::max(std::abs(left.value), std::abs(right.value)) / std::abs(unbroken);
    v.require(left.value >= kLeftLo && left.value <= kLeftHi, "left %.1f us at %.4fpi", left.value * 1e6,
              left.at / constants::pi);
    v.require(right.value >= kRightLo && right.value <= kRightHi, "right %.1f us at %.4fpi", right.value * 1e6,
              right.at / constants::pi);
    v.require(ratio > kDelayRatio, "broken/unbroken %.0f", ratio);
    return v;
}

Verdict oracle_closure() {
    Verdict v;
    const auto c = paper_config(2, 0.05 * kOmegaM, 0.5 * constants::pi);
    std::vector<double> omegas;
    for (double r : {0.94, 0.95, 1.0, 1.05, 1.06}) {
        omegas.push_back(r * kOmegaM);
    }
    OracleCheckOptions o;
    o.probe_ratio = 0.01;
    o.jobs = kJobs;
    for (const auto& r : oracle_check(c, omegas, o)) {
        v.require(r.error1 < kOracle && r.error2 < kOracle && r.reliable, "%.2f: %.1e/%.1e",
                  r.omega / kOmegaM, r.error1, r.error2);
    }
    return v;
}

Verdict adiabatic_prediction() {
    Verdict v;
    SystemConfig r;
    r.cavity.kappa = 1e-3;
    r.cavity.delta_c = 1.0;
    r.modes = {{1.0, 1e-9, 1e-6}};
    r.drive.omega_pump = 1.0;
    r.drive.power_pump = 1e4 * constants::hbar * r.cavity.kappa / 2.0;
    SteadyState s = solve_steady_state(r);
    s.delta_eff = 1.0;
    const double big_g = 1e-6 * std::abs(s.alpha);
    const double limit = big_g * big_g / r.cavity.kappa;
    const double dev = std::abs(adiabatic_elimination(r, s).gamma_opt[0] / limit - 1.0);
    v.require(dev < kAdiabaticLimit, "gamma_opt/(G^2/kappa)-1 = %.1e", dev);

    const auto grid = window_grid();
    for (std::size_t n : {1, 2}) {
        const auto c = paper_config(n);
        const auto st = solve_steady_state(c);
        const double predicted = predict_linewidth(c, st);
        const double fitted = 0.5 * main_window(compute_spectrum(c, st, grid, first_only())).fwhm;
        const double d = std::abs(fitted / predicted - 1.0);
        v.require(d < kGammaEff, "N=%zu fit/predicted %.3f", n, fitted / predicted);
    }
    return v;
}

Verdict numerical_hygiene() {
    Verdict v;
    // Delay extrema come from the stencil estimator; check it under step halving.
    struct Point {
        SystemConfig config;
        double omega;
    };
    const double eta = 0.05 * kOmegaM;
    std::vector<Point> extrema{{paper_config(2), kOmegaM},
                               {paper_config(2, eta, 0.5 * constants::pi), 0.95 * kOmegaM},
                               {paper_config(2, eta, 0.5 * constants::pi), 1.05 * kOmegaM},
                               {paper_config(2, eta, 0.0306 * constants::pi), 0.95 * kOmegaM},
                               {paper_config(2, eta, 1.028 * constants::pi), 1.05 * kOmegaM}};
    double worst_stencil = 0.0;
    for (const auto& p : extrema) {
        const auto s = solve_steady_state(p.config);
        const auto coarse = group_delay_at(p.config, s, p.omega);
        const auto fine = group_delay_at(p.config, s, p.omega, 0.5 * coarse.step);
        worst_stencil = std::max(worst_stencil, std::abs(fine.value / coarse.value - 1.0));
    }
    v.require(worst_stencil < kDelayHalving, "stencil halving %.1e", worst_stencil);

    // Grid delays of the window spectra, at every window center snapped to a shared node.
    std::vector<SystemConfig> spectra{paper_config(1), paper_config(2), paper_config(3), paper_config(4),
                                      paper_config(2, eta, 0.5 * constants::pi), paper_config(2, eta, 0.0),
                                      paper_config(2, eta, constants::pi), paper_config(3, eta, 0.5 * constants::pi),
                                      paper_config(4, eta, 0.5 * constants::pi)};
    for (double p : {0.5e-3, 1.0e-3, 2.0e-3}) {
        spectra.push_back(paper_config(1, 0, 0, p));
        spectra.push_back(paper_config(2, 0, 0, p));
    }
    const auto g1 = window_grid(0.8, 1.2, 4001);
    const auto g2 = window_grid(0.8, 1.2, 8001);
    double worst_grid = 0.0;
    std::size_t checked = 0;
    for (const auto& c : spectra) {
        const auto a = n_mode_spectrum(c, g1, kJobs);
        const auto b = n_mode_spectrum(c, g2, kJobs);
        for (const auto& w : fit_linewidth(a)) {
            const auto i = static_cast<std::size_t>(std::lround((w.center - g1.front()) / (g1[1] - g1[0])));
            const double da = *a.points[i].group_delay;
            const double db = *b.points[2 * i].group_delay;
            worst_grid = std::max(worst_grid, std::abs(db / da - 1.0));
            ++checked;
        }
    }
    v.require(worst_grid < kDelayHalving, "grid halving %.1e over %zu windows", worst_grid, checked);

    double worst_residual = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (double p : {0.5e-3, 1.5e-3, 3.0e-3}) {
            for (double theta : {0.0, 0.5 * constants::pi, constants::pi}) {
                const auto c = paper_config(n, 0.05 * kOmegaM, theta, p);
                worst_residual = std::max(worst_residual, steady_state_residual(c, solve_steady_state(c)));
            }
        }
    }
    v.require(worst_residual < kSteadyResidual, "steady residual %.1e", worst_residual);

    double worst_unitary = 0.0;
    for (std::size_t n = 2; n <= 64; ++n) {
        std::vector<double> thetas(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            thetas[j] = 0.3 + 0.7 * static_cast<double>(j);
        }
        const auto b = build_normal_modes(n, kOmegaM, 0.05 * kOmegaM, thetas, 1.0);
        const Eigen::MatrixXcd e = b.transform.adjoint() * b.transform - Eigen::MatrixXcd::Identity(n, n);
        worst_unitary = std::max(worst_unitary, e.cwiseAbs().maxCoeff());
    }
    v.require(worst_unitary < kUnitary, "unitarity %.1e", worst_unitary);
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"route equivalence", route_equivalence},
        {"bright-mode reduction", bright_mode_reduction},
        {"linewidth doubling", linewidth_doubling},
        {"N-scaling", n_scaling},
        {"window splitting", window_splitting},
        {"theta parity and periodicity", theta_symmetry},
        {"even-mode decoupling", even_mode_decoupling},
        {"second-order enhancement", second_order_enhancement},
        {"group delay", group_delay_extrema},
        {"time-domain oracle closure", oracle_closure},
        {"adiabatic prediction", adiabatic_prediction},
        {"numerical hygiene", numerical_hygiene},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures;
}
