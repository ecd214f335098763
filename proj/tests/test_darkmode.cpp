#include "fixtures.hpp"

#include "omit/constants.hpp"
#include "omit/darkmode.hpp"
#include "omit/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace omit;
using namespace omit::testing;

TEST_CASE("degenerate symmetric hybridization") {
    const auto c = paper_config();
    const auto s = solve_steady_state(c);
    const auto r = hybridize_two_mode(c, s);
    const double g = kPaperG * std::abs(s.alpha);
    CHECK(r.zeta == 0.0);
    CHECK(r.g_plus == doctest::Approx(std::sqrt(2.0) * g).epsilon(1e-14));
    CHECK(std::abs(r.g_tilde_minus) <= 1e-14 * g);
    CHECK(r.f * r.f + r.h * r.h == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase-dressed couplings vanish at theta = n pi") {
    for (double theta : {0.0, constants::two_pi, 2.0 * constants::two_pi}) {
        const auto c = paper_config(2, 0.1 * kOmegaM, theta);
        const auto s = solve_steady_state(c);
        const auto r = hybridize_two_mode(c, s);
        CHECK(std::abs(r.g_tilde_minus) <= 1e-14 * r.g1);
        CHECK_FALSE(dark_mode_broken(c, s).broken);
    }
    const auto c = paper_config(2, 0.1 * kOmegaM, constants::pi);
    const auto s = solve_steady_state(c);
    const auto r = hybridize_two_mode(c, s);
    CHECK(std::abs(r.g_tilde_plus) <= 1e-14 * r.g1);
    CHECK_FALSE(dark_mode_broken(c, s).broken);
}

TEST_CASE("theta = pi/2 splits the weight evenly") {
    const auto c = paper_config(2, 0.05 * kOmegaM, 0.5 * constants::pi);
    const auto s = solve_steady_state(c);
    const auto r = hybridize_two_mode(c, s);
    CHECK(std::abs(r.g_tilde_plus) == doctest::Approx(r.g1).epsilon(1e-12));
    CHECK(std::abs(r.g_tilde_minus) == doctest::Approx(r.g1).epsilon(1e-12));
    CHECK(dark_mode_broken(c, s).broken);
    CHECK(r.omega_tilde_plus == doctest::Approx(1.05 * kOmegaM).epsilon(1e-14));
    CHECK(r.omega_tilde_minus == doctest::Approx(0.95 * kOmegaM).epsilon(1e-14));
}

TEST_CASE("coupling weight is conserved for arbitrary draws") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        auto c = random_config(rng);
        if (i % 5 == 0) {
            c.couplings[0].eta = 0.0;
        }
        const auto s = solve_steady_state(c);
        const auto r = hybridize_two_mode(c, s);
        const double total = r.g1 * r.g1 + r.g2 * r.g2;
        CHECK(std::norm(r.g_tilde_plus) + std::norm(r.g_tilde_minus) ==
              doctest::Approx(total).epsilon(1e-12));
        CHECK(r.f * r.f + r.h * r.h == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("non-degenerate uncoupled limits") {
    auto c = paper_config();
    c.modes[1].omega = 1.1 * kOmegaM;
    const auto s = solve_steady_state(c);
    auto r = hybridize_two_mode(c, s);
    CHECK(r.f == 0.0);
    CHECK(r.h == -1.0);
    CHECK(r.zeta != 0.0);
    c.modes[1].omega = 0.9 * kOmegaM;
    r = hybridize_two_mode(c, solve_steady_state(c));
    CHECK(r.f == 1.0);
    CHECK(r.h == 0.0);
}

TEST_CASE("hybridization needs two modes") {
    const auto c = paper_config(3);
    CHECK_THROWS_AS(hybridize_two_mode(c, solve_steady_state(c)), UnsupportedTopology);
}

TEST_CASE("adiabatic elimination") {
    auto c = paper_config();
    c.modes[0].g = 0.0;
    c.modes[1].g = 0.0;
    auto p = adiabatic_elimination(c, solve_steady_state(c));
    CHECK(*p.gamma_eff == kGamma);
    CHECK(*p.omega_eff == kOmegaM);

    c = paper_config(2, 0.1 * kOmegaM);
    CHECK_THROWS_AS(adiabatic_elimination(c, solve_steady_state(c)), RegimeViolation);

    // resolved-sideband asymptotes
    SystemConfig r;
    r.cavity.kappa = 1e-3;
    r.cavity.delta_c = 1.0;
    r.modes = {{1.0, 1e-9, 1e-6}, {1.0, 1e-9, 1e-6}};
    r.couplings = {{0.0, 0.0}};
    r.drive.omega_pump = 1.0;
    r.drive.power_pump = 1e4 * constants::hbar * r.cavity.kappa / 2.0;
    SteadyState s = solve_steady_state(r);
    s.delta_eff = 1.0; // evaluate exactly at Delta = omega
    p = adiabatic_elimination(r, s);
    const double g = 1e-6 * std::abs(s.alpha);
    CHECK(p.gamma_opt[0] == doctest::Approx(g * g / r.cavity.kappa).epsilon(5e-3));
    CHECK(p.omega_opt[0] == doctest::Approx(g * g / 2.0).epsilon(5e-3));
    const cd xi_asym = -cd(g * g / r.cavity.kappa, -g * g / 2.0);
    CHECK(std::abs(*p.xi1 - xi_asym) <= 5e-3 * std::abs(xi_asym));
}

TEST_CASE("linewidth prediction scales with mode number") {
    std::vector<double> widths;
    for (std::size_t n : {1, 2, 4}) {
        const auto c = paper_config(n);
        widths.push_back(predict_linewidth(c, solve_steady_state(c)));
    }
    const double gamma_opt = widths[0] - kGamma;
    CHECK(gamma_opt > 100.0 * kGamma);
    CHECK(widths[1] == doctest::Approx(kGamma + 2.0 * gamma_opt));
    CHECK(widths[1] / widths[0] == doctest::Approx(2.0).epsilon(0.01));
    CHECK(widths[2] / widths[0] == doctest::Approx(4.0).epsilon(0.01));

    auto c = paper_config();
    c.modes[1].omega *= 1.01;
    CHECK_THROWS_AS(predict_linewidth(c, solve_steady_state(c)), UnsupportedTopology);
}

TEST_CASE("peak fitting on synthetic traces") {
    const auto x = linear_grid(-10.0, 10.0, 2001);
    std::vector<double> y(x.size());
    for (double w : {0.5, 1.0, 2.5}) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = (x[i] - 1.0) / (w / 2.0);
            y[i] = 0.1 + 0.7 / (1.0 + u * u);
        }
        const auto fits = fit_linewidth(x, y);
        REQUIRE(fits.size() == 1);
        CHECK(fits[0].fwhm == doctest::Approx(w).epsilon(0.01));
        CHECK(fits[0].center == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fits[0].window_count == 1);
        CHECK(fits[0].half_prominence_width > 0.0);
    }

    std::fill(y.begin(), y.end(), 0.3);
    CHECK(fit_linewidth(x, y).empty());

    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = (x[i] + 3.0) / 0.5, b = (x[i] - 3.0) / 0.8;
        y[i] = 1.0 / (1.0 + a * a) + 0.6 / (1.0 + b * b);
    }
    const auto two = fit_linewidth(x, y);
    REQUIRE(two.size() == 2);
    CHECK(two[0].center < two[1].center);
    CHECK(two[1].window_count == 2);
}

TEST_CASE("degenerate modes reduce to one bright mode") {
    const auto grid = linear_grid(0.8 * kOmegaM, 1.2 * kOmegaM, 401);
    for (std::size_t n : {2, 3, 4}) {
        const auto multi = paper_config(n);
        auto single = paper_config(1);
        single.modes[0].g = std::sqrt(static_cast<double>(n)) * kPaperG;
        single.cavity.delta_c = bare_detuning_for_effective(single, kOmegaM);
        const auto a = compute_spectrum(multi, grid);
        const auto b = compute_spectrum(single, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(a.points[i].transmission - b.points[i].transmission));
        }
        CHECK(worst < 1e-8);
    }
}
