#include "omit/oracle.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"
#include "omit/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace omit {

namespace {

using State = Eigen::VectorXcd; // [a, b_1 .. b_N]

// Dormand-Prince tableau and Hairer's dense-output weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct MeanFieldRhs {
    double kappa, delta_c, eps_l, eps_p, omega_p;
    Eigen::VectorXd g;
    CMatrixd mech; // gamma + i omega with chain terms

    void operator()(double t, const State& y, State& dy) const {
        const auto n = g.size();
        const cd a = y(0);
        const auto b = y.tail(n);
        double x = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
            x += 2.0 * g(l) * b(l).real();
        }
        dy(0) = -cd(kappa, delta_c + x) * a + eps_l + eps_p * std::polar(1.0, -omega_p * t);
        dy.tail(n).noalias() = -(mech * b);
        const double photons = std::norm(a);
        for (Eigen::Index l = 0; l < n; ++l) {
            dy(1 + l) += cd(0.0, -g(l) * photons);
        }
    }
};

struct DenseSegment {
    double t0, h;
    State r1, r2, r3, r4, r5;

    State at(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
    }
};

double error_norm(const State& err, const State& y0, const State& y1, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = std::abs(err(i)) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

} // namespace

double max_oracle_step(const SystemConfig& config, double probe_detuning) {
    double fastest = std::max(std::abs(config.cavity.delta_c), std::abs(probe_detuning));
    for (const auto& m : config.modes) {
        fastest = std::max(fastest, m.omega);
    }
    return constants::two_pi / (50.0 * fastest);
}

double oracle_step(const SystemConfig& config, double probe_detuning) {
    const double bound = max_oracle_step(config, probe_detuning);
    if (probe_detuning == 0.0) {
        return bound;
    }
    const double period = constants::two_pi / std::abs(probe_detuning);
    const double samples = std::ceil(period / bound * (1.0 + 1e-12));
    return period / samples;
}

double settle_time(const SystemConfig& config) {
    double slowest = config.cavity.kappa;
    for (const auto& m : config.modes) {
        slowest = std::min(slowest, m.gamma);
    }
    return 20.0 / slowest;
}

TimeTrace integrate_mean_field(const SystemConfig& raw, double t_final, double step,
                               const IntegrationOptions& options) {
    const SystemConfig config = canonicalized(raw);
    validate(config);
    if (!(step > 0.0) || step > max_oracle_step(config, options.probe_detuning) * (1.0 + 1e-12)) {
        throw InvalidParameter("output step does not resolve the fastest frequency (needs <= 2 pi / (50 w_max))");
    }
    if (!(t_final >= options.record_from) || !(options.record_from >= 0.0)) {
        throw InvalidParameter("need 0 <= record_from <= t_final");
    }
    const auto n = static_cast<Eigen::Index>(config.modes.size());

    MeanFieldRhs rhs;
    rhs.kappa = config.cavity.kappa;
    rhs.delta_c = config.cavity.delta_c;
    rhs.eps_l = pump_amplitude(config);
    rhs.eps_p = probe_amplitude(config);
    rhs.omega_p = options.probe_detuning;
    rhs.g.resize(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        rhs.g(l) = config.modes[static_cast<std::size_t>(l)].g;
    }
    rhs.mech = mechanical_dynamics_matrix(config);

    State y = State::Zero(n + 1);
    double scale = (rhs.eps_l + rhs.eps_p) / rhs.kappa;
    if (options.start_from_steady && rhs.eps_l > 0.0) {
        const auto s = solve_steady_state(config);
        y(0) = s.alpha;
        y.tail(n) = s.betas;
        scale = std::max(scale, std::abs(s.alpha));
    }
    if (options.initial_a) {
        y(0) = *options.initial_a;
    }
    if (options.initial_b) {
        if (options.initial_b->size() != n) {
            throw InvalidParameter("initial mechanical state has the wrong size");
        }
        y.tail(n) = *options.initial_b;
    }
    scale = std::max(scale, y.cwiseAbs().maxCoeff());
    const double atol = options.atol > 0.0 ? options.atol : options.rtol * std::max(scale, 1e-300);
    const double blowup = 1e6 * scale;

    TimeTrace trace;
    trace.step = step;
    trace.method = "dopri5-dense";
    const auto samples = static_cast<std::size_t>(std::floor((t_final - options.record_from) / step * (1.0 + 1e-12))) + 1;
    trace.times.reserve(samples);
    trace.a.reserve(samples);
    trace.b.reserve(samples);
    std::size_t next = 0;
    auto sample_time = [&](std::size_t k) { return options.record_from + step * static_cast<double>(k); };
    auto record = [&](double t, const State& s) {
        trace.times.push_back(t);
        trace.a.push_back(s(0));
        trace.b.push_back(s.tail(n));
    };

    double t = 0.0;
    State k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), k5(n + 1), k6(n + 1), k7(n + 1), tmp(n + 1), y1(n + 1);
    rhs(t, y, k1);
    double h = std::min(step, t_final > 0.0 ? t_final : step);
    while (next < samples && sample_time(next) <= t) {
        record(sample_time(next), y);
        ++next;
    }

    while (next < samples) {
        if (t + h > t_final) {
            h = t_final - t;
        }
        if (!(h > 0.0)) {
            // round-off at the very end: the last sample coincides with t
            record(sample_time(next), y);
            ++next;
            continue;
        }
        tmp = y + h * a21 * k1;
        rhs(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, tmp, k6);
        y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, y1, k7);
        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, y1, options.rtol, atol);
        if (!std::isfinite(en)) {
            throw InstabilityError("mean-field integration produced non-finite values");
        }
        if (en <= 1.0) {
            DenseSegment seg{t, h, y, y1 - y, {}, {}, {}};
            seg.r3 = h * k1 - seg.r2;
            seg.r4 = seg.r2 - h * k7 - seg.r3;
            seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            const double t_new = t + h;
            while (next < samples && sample_time(next) <= t_new) {
                record(sample_time(next), seg.at(sample_time(next)));
                ++next;
            }
            t = t_new;
            y = y1;
            k1 = k7;
            ++trace.accepted_steps;
            if (std::abs(y(0)) > blowup) {
                throw InstabilityError("cavity field diverged during integration");
            }
        } else {
            ++trace.rejected_steps;
        }
        const double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < 1e-14 * std::max(t, step)) {
            throw InstabilityError("integration step underflow");
        }
    }
    return trace;
}

DemodResult demodulate(const TimeTrace& trace, double omega, double settle) {
    if (!(omega > 0.0)) {
        throw InvalidParameter("demodulation frequency must be positive");
    }
    const double period = constants::two_pi / omega;
    if (trace.times.empty() || !(trace.step > 0.0)) {
        throw InvalidParameter("empty trace");
    }
    const double t_end = trace.times.back();
    const double available = t_end - std::max(settle, trace.times.front());
    const auto periods = static_cast<std::size_t>(std::floor(available / period * (1.0 + 1e-9)));
    if (periods < 50) {
        throw InvalidParameter("analysis window shorter than 50 probe periods");
    }
    const auto count = static_cast<std::size_t>(std::llround(static_cast<double>(periods) * period / trace.step));
    if (count < 8 || count > trace.times.size()) {
        throw InvalidParameter("analysis window does not fit the trace");
    }
    const std::size_t first = trace.times.size() - count;
    const auto rows = static_cast<Eigen::Index>(count);

    cd mean = 0.0;
    for (std::size_t k = first; k < trace.times.size(); ++k) {
        mean += trace.a[k];
    }
    mean /= static_cast<double>(count);

    Eigen::MatrixXcd basis(rows, 5);
    Eigen::VectorXcd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t k = first + static_cast<std::size_t>(r);
        const double t = trace.times[k];
        basis(r, 0) = 1.0;
        basis(r, 1) = std::polar(1.0, -omega * t);
        basis(r, 2) = std::polar(1.0, omega * t);
        basis(r, 3) = std::polar(1.0, -2.0 * omega * t);
        basis(r, 4) = std::polar(1.0, 2.0 * omega * t);
        y(r) = trace.a[k] - mean;
    }
    const Eigen::VectorXcd c = basis.colPivHouseholderQr().solve(y);
    const Eigen::VectorXcd rest = y - basis * c;

    DemodResult d;
    d.mean = mean + c(0);
    d.a1_minus = c(1);
    d.a1_plus = c(2);
    d.a2_minus = c(3);
    d.a2_plus = c(4);
    const double power = y.squaredNorm();
    d.residual = power > 0.0 ? rest.squaredNorm() / power : 0.0;
    d.periods = periods;
    d.reliable = d.residual < 0.05;
    return d;
}

std::vector<OracleComparison> oracle_check(const SystemConfig& raw, std::span<const double> omegas,
                                           const OracleCheckOptions& options) {
    SystemConfig config = canonicalized(raw);
    config.drive.probe_ratio = options.probe_ratio;
    validate(config);
    const auto steady = solve_steady_state(config);
    const double settle = options.settle.value_or(settle_time(config));
    if (config.modes.size() > 2) {
        throw UnsupportedTopology("oracle comparison covers N <= 2 (second order is needed)");
    }

    std::vector<OracleComparison> rows(omegas.size());
    detail::parallel_for(omegas.size(), options.jobs, [&](std::size_t i) {
        const double w = omegas[i];
        const auto first = solve_first_order_linear(config, steady, w);
        const auto second = solve_second_order(config, steady, first, w);

        IntegrationOptions io;
        io.probe_detuning = w;
        io.rtol = options.rtol;
        io.record_from = settle;
        const double period = constants::two_pi / w;
        const double step = oracle_step(config, w);
        const double t_final = settle + static_cast<double>(options.periods) * period;
        const auto trace = integrate_mean_field(config, t_final, step, io);
        const auto d = demodulate(trace, w, settle);

        OracleComparison& r = rows[i];
        r.omega = w;
        r.a1_frequency = first.a_minus;
        r.a2_frequency = second.direct.a_minus;
        r.a1_time = d.a1_minus;
        r.a2_time = d.a2_minus;
        r.error1 = std::abs(d.a1_minus - first.a_minus) / std::abs(first.a_minus);
        r.error2 = std::abs(d.a2_minus - second.direct.a_minus) / std::abs(second.direct.a_minus);
        r.residual = d.residual;
        r.reliable = d.reliable;
    });
    return rows;
}

} // namespace omit
