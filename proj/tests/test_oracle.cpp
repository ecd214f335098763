#include "fixtures.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"
#include "omit/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace omit;
using namespace omit::testing;

namespace {

TimeTrace synthetic(double omega, std::size_t periods, std::size_t per_period, cd c1, cd c2, cd dc) {
    TimeTrace t;
    t.step = constants::two_pi / omega / static_cast<double>(per_period);
    for (std::size_t k = 0; k <= periods * per_period; ++k) {
        const double time = 0.37 + t.step * static_cast<double>(k);
        t.times.push_back(time);
        t.a.push_back(dc + c1 * std::polar(1.0, -omega * time) + c2 * std::polar(1.0, 2.0 * omega * time));
        t.b.push_back(Eigen::VectorXcd::Zero(1));
    }
    return t;
}

} // namespace

TEST_CASE("demodulation of a synthetic trace") {
    const cd c1(0.3, -1.2), c2(-0.05, 0.02), dc(40.0, 7.0);
    const auto d = demodulate(synthetic(3.0, 60, 37, c1, c2, dc), 3.0, 0.0);
    CHECK(std::abs(d.a1_minus - c1) < 1e-10);
    CHECK(std::abs(d.a1_plus) < 1e-10);
    CHECK(std::abs(d.a2_minus) < 1e-10);
    CHECK(std::abs(d.a2_plus - c2) < 1e-10);
    CHECK(std::abs(d.mean - dc) < 1e-10);
    CHECK(d.residual < 1e-20);
    CHECK(d.reliable);
    CHECK(d.periods == 60);
    CHECK_THROWS_AS(demodulate(synthetic(3.0, 40, 37, c1, c2, dc), 3.0, 0.0), InvalidParameter);
}

TEST_CASE("undriven system stays at rest") {
    auto c = paper_config(1);
    c.drive.power_pump = 0.0;
    const double step = oracle_step(c, 0.0);
    const auto t = integrate_mean_field(c, 200 * step, step);
    for (std::size_t k = 0; k < t.a.size(); ++k) {
        CHECK(t.a[k] == cd(0.0));
        CHECK(t.b[k].cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("free cavity energy decays at 2 kappa") {
    auto c = paper_config(2);
    c.drive.power_pump = 0.0;
    IntegrationOptions o;
    o.initial_a = cd(3.0, 1.0);
    const double step = oracle_step(c, 0.0);
    const double t_final = 4.0 / c.cavity.kappa;
    const auto t = integrate_mean_field(c, t_final, step, o);
    // least-squares slope of log |a|^2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t.times.size());
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        const double x = t.times[k], y = std::log(std::norm(t.a[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(-slope == doctest::Approx(2.0 * c.cavity.kappa).epsilon(0.01));
}

TEST_CASE("step bounds are enforced") {
    const auto c = paper_config();
    const double bound = max_oracle_step(c, 1.1 * kOmegaM);
    CHECK(oracle_step(c, 1.1 * kOmegaM) <= bound);
    CHECK_THROWS_AS(integrate_mean_field(c, 1e-6, 1.01 * bound, {1.1 * kOmegaM}), InvalidParameter);
}

TEST_CASE("trace settles onto the steady state") {
    auto c = paper_config(2, 0.05 * kOmegaM, 0.5 * constants::pi);
    c.drive.probe_ratio = 0.0;
    const auto s = solve_steady_state(c);
    IntegrationOptions o;
    o.start_from_steady = false;
    const double settle = settle_time(c);
    o.record_from = settle;
    const double step = oracle_step(c, 0.0);
    const auto t = integrate_mean_field(c, settle + 100 * step, step, o);
    CHECK(std::abs(t.a.back() - s.alpha) < 1e-6 * std::abs(s.alpha));
    CHECK((t.b.back() - s.betas).cwiseAbs().maxCoeff() < 1e-6 * s.betas.cwiseAbs().maxCoeff());
}

TEST_CASE("time-domain sidebands match the frequency-domain solve") {
    const auto c = paper_config(2, 0.05 * kOmegaM, 0.5 * constants::pi);
    const std::vector<double> omegas{0.95 * kOmegaM, 1.02 * kOmegaM};
    OracleCheckOptions o;
    o.jobs = 2;
    const auto rows = oracle_check(c, omegas, o);
    for (const auto& r : rows) {
        CHECK(r.error1 < 0.01);
        CHECK(r.error2 < 0.01);
        CHECK(r.reliable);
    }
}

TEST_CASE("demodulated amplitudes do not depend on the output step") {
    const auto c = paper_config(1);
    const double w = 0.98 * kOmegaM;
    IntegrationOptions o;
    o.probe_detuning = w;
    const double settle = settle_time(c);
    o.record_from = settle;
    const double step = oracle_step(c, w);
    const double t_final = settle + 60.0 * constants::two_pi / w;
    const auto a = demodulate(integrate_mean_field(c, t_final, step, o), w, settle);
    const auto b = demodulate(integrate_mean_field(c, t_final, step / 2.0, o), w, settle);
    CHECK(std::abs(a.a1_minus - b.a1_minus) < 1e-8 * std::abs(a.a1_minus));
    CHECK(std::abs(a.a2_minus - b.a2_minus) < 1e-8 * std::abs(a.a2_minus));
}
