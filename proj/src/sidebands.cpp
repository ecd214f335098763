#include "omit/sidebands.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"
#include "omit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omit {

namespace {

double relative_difference(cd a, cd b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

struct RichardsonStencil {
    double d1, d2, d4; // central differences at h, 2h, 4h
};

double richardson(const RichardsonStencil& s) {
    const double r1a = (4.0 * s.d1 - s.d2) / 3.0;
    const double r1b = (4.0 * s.d2 - s.d4) / 3.0;
    return (16.0 * r1a - r1b) / 15.0;
}

bool is_uniform(std::span<const double> grid, double& step) {
    if (grid.size() < 2) {
        return false;
    }
    step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    if (!(step > 0.0)) {
        return false;
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-6 * step) {
            return false;
        }
    }
    return true;
}

double node_delay(std::span<const double> unwrapped, std::size_t i, double h) {
    const RichardsonStencil s{(unwrapped[i + 1] - unwrapped[i - 1]) / (2.0 * h),
                              (unwrapped[i + 2] - unwrapped[i - 2]) / (4.0 * h),
                              (unwrapped[i + 4] - unwrapped[i - 4]) / (8.0 * h)};
    return richardson(s);
}

constexpr double kPhaseFloor = 1e-10; // |t_p| below this: phase undefined

} // namespace

SidebandModel<double> make_sideband_model(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    SidebandModel<double> m;
    m.kappa = config.cavity.kappa;
    m.delta = steady.delta_eff;
    m.alpha = steady.alpha;
    for (const auto& mode : config.modes) {
        m.g.push_back(mode.g);
        m.gamma.push_back(mode.gamma);
        m.omega.push_back(mode.omega);
    }
    for (const auto& c : config.couplings) {
        m.eta.push_back(c.eta);
        m.theta.push_back(c.theta);
    }
    return m;
}

SidebandOrder to_order(const SidebandUnknowns<double>& u) {
    return {u.a_minus, std::conj(u.a_plus_conj), u.b_minus, u.b_plus_conj.conjugate()};
}

namespace {

SidebandUnknowns<double> to_unknowns(const SidebandOrder& o) {
    return {o.a_minus, std::conj(o.a_plus), o.b_minus, o.b_plus.conjugate()};
}

} // namespace

cd first_order_closed_form(const SystemConfig& config, const SteadyState& steady, double omega) {
    require_two_modes(config.modes.size());
    const auto model = make_sideband_model(config, steady);
    return first_order_closed(model, omega, probe_amplitude(config)).a_minus;
}

SidebandOrder solve_first_order_linear(const SystemConfig& config, const SteadyState& steady,
                                       double omega) {
    const auto model = make_sideband_model(config, steady);
    return to_order(solve_first_order_system(model, omega, probe_amplitude(config)));
}

SecondOrderResult solve_second_order(const SystemConfig& config, const SteadyState& steady,
                                     const SidebandOrder& first, double omega) {
    if (config.modes.size() > 2) {
        throw UnsupportedTopology("second-order sidebands are only provided for N <= 2 modes");
    }
    const auto model = make_sideband_model(config, steady);
    const auto first_u = to_unknowns(first);
    SecondOrderResult out;
    out.direct = to_order(solve_second_order_system(model, omega, first_u));
    if (config.modes.size() == 2) {
        out.a_minus_closed_form = second_order_closed(model, omega, first_u).a_minus;
        out.route_discrepancy = relative_difference(out.a_minus_closed_form, out.direct.a_minus);
    } else {
        out.a_minus_closed_form = std::numeric_limits<double>::quiet_NaN();
        out.route_discrepancy = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

AuxCoefficients aux_coefficients(const SystemConfig& config, const SteadyState& steady, double omega) {
    require_two_modes(config.modes.size());
    const auto model = make_sideband_model(config, steady);
    AuxCoefficients aux;
    aux.order1 = t_coefficients(model, omega);
    aux.order2 = t_coefficients(model, 2.0 * omega);
    aux.v = v_coefficients(model, omega);
    const auto first = first_order_closed(model, omega, probe_amplitude(config));
    const auto second = second_order_closed(model, omega, first);
    aux.chi1 = second.chi1;
    aux.chi2 = second.chi2;
    return aux;
}

Transmission transmission(cd a1_minus, double eps_probe, double kappa) {
    if (!(eps_probe > 0.0)) {
        throw InvalidParameter("probe amplitude must be positive to define transmission");
    }
    const cd t = 1.0 - kappa / eps_probe * a1_minus;
    return {t, std::norm(t)};
}

double second_order_efficiency(cd a2_minus, double eps_probe, double kappa) {
    if (!(eps_probe > 0.0)) {
        throw InvalidParameter("probe amplitude must be positive to define efficiency");
    }
    return std::abs(kappa / eps_probe * a2_minus);
}

std::vector<double> unwrap_phase(std::span<const double> phase) {
    std::vector<double> out(phase.begin(), phase.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double jump = phase[i] - phase[i - 1];
        if (jump > constants::pi) {
            offset -= constants::two_pi;
        } else if (jump < -constants::pi) {
            offset += constants::two_pi;
        }
        out[i] = phase[i] + offset;
    }
    return out;
}

GroupDelay group_delay(std::span<const double> grid, std::span<const cd> t, double at) {
    if (grid.size() != t.size()) {
        throw InvalidParameter("grid and transmission sizes differ");
    }
    double h = 0.0;
    if (!is_uniform(grid, h)) {
        throw InvalidParameter("group delay needs a uniform increasing grid");
    }
    const std::size_t n = grid.size();
    if (n < 9 || at < grid[4] - 1e-9 * h || at > grid[n - 5] + 1e-9 * h) {
        throw DegeneratePoint("group delay point lacks 4 grid points on each side");
    }
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
        phase[i] = std::arg(t[i]);
    }
    const auto unwrapped = unwrap_phase(phase);

    auto i = static_cast<std::size_t>(std::floor((at - grid[0]) / h));
    i = std::clamp<std::size_t>(i, 4, n - 5);
    const double frac = (at - grid[i]) / h;
    auto checked = [&](std::size_t k) {
        if (std::abs(t[k]) < kPhaseFloor) {
            throw DegeneratePoint("transmission vanishes at the group-delay point");
        }
        return node_delay(unwrapped, k, h);
    };
    if (std::abs(frac) < 1e-9 || i + 1 > n - 5) {
        return {checked(i), h};
    }
    if (std::abs(frac - 1.0) < 1e-9) {
        return {checked(i + 1), h};
    }
    return {(1.0 - frac) * checked(i) + frac * checked(i + 1), h};
}

GroupDelay group_delay_at(const SystemConfig& config, const SteadyState& steady, double at, double step) {
    const auto model = make_sideband_model(config, steady);
    const double eps = probe_amplitude(config);
    if (step <= 0.0) {
        double narrowest = config.cavity.kappa;
        for (const auto& m : config.modes) {
            narrowest = std::min(narrowest, m.gamma);
        }
        step = 0.02 * narrowest;
    }
    auto t_at = [&](double w) {
        return transmission(solve_first_order_system(model, w, eps).a_minus, eps, model.kappa).t;
    };
    if (std::abs(t_at(at)) < kPhaseFloor) {
        throw DegeneratePoint("transmission vanishes at the group-delay point");
    }
    auto diff = [&](double h) { return std::arg(t_at(at + h) / t_at(at - h)) / (2.0 * h); };
    return {richardson({diff(step), diff(2.0 * step), diff(4.0 * step)}), step};
}

Spectrum compute_spectrum(const SystemConfig& config, std::span<const double> grid,
                          const SpectrumOptions& options) {
    return compute_spectrum(config, solve_steady_state(config), grid, options);
}

Spectrum compute_spectrum(const SystemConfig& raw, const SteadyState& steady, std::span<const double> grid,
                          const SpectrumOptions& options) {
    const SystemConfig config = canonicalized(raw);
    validate(config);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InvalidParameter("probe detuning grid must be strictly increasing");
        }
    }

    Spectrum spec;
    spec.steady = steady;
    spec.omega_ref = config.modes.front().omega;
    const std::size_t n_modes = config.modes.size();
    spec.second_order = options.second_order && n_modes <= 2;
    const bool two_mode = n_modes == 2;

    const auto model = make_sideband_model(config, steady);
    const double eps = probe_amplitude(config);
    const double kappa = config.cavity.kappa;
    if (!(eps > 0.0)) {
        throw InvalidParameter("spectrum needs a positive probe amplitude");
    }

    spec.points.resize(grid.size());
    detail::parallel_for(grid.size(), options.jobs, [&](std::size_t i) {
        const double w = grid[i];
        SpectrumPoint& p = spec.points[i];
        p.omega = w;
        const auto first = solve_first_order_system(model, w, eps);
        const auto tr = transmission(first.a_minus, eps, kappa);
        p.t = tr.t;
        p.transmission = tr.rate;
        p.phase = std::arg(tr.t);

        double discrepancy = 0.0;
        std::optional<SidebandUnknowns<double>> closed_first;
        if (two_mode) {
            closed_first = first_order_closed(model, w, eps);
            discrepancy = relative_difference(closed_first->a_minus, first.a_minus);
        }
        if (spec.second_order) {
            const auto second = solve_second_order_system(model, w, first);
            p.efficiency = second_order_efficiency(second.a_minus, eps, kappa);
            if (two_mode) {
                const auto closed = second_order_closed(model, w, *closed_first);
                discrepancy = std::max(discrepancy, relative_difference(closed.a_minus, second.a_minus));
            }
        }
        if (two_mode) {
            p.route_discrepancy = discrepancy;
        }
    });

    std::vector<double> phase(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        phase[i] = spec.points[i].phase;
    }
    const auto unwrapped = unwrap_phase(phase);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        spec.points[i].unwrapped_phase = unwrapped[i];
    }

    double h = 0.0;
    if (options.group_delay && grid.size() >= 9 && is_uniform(grid, h)) {
        for (std::size_t i = 4; i + 4 < grid.size(); ++i) {
            if (std::abs(spec.points[i].t) >= kPhaseFloor) {
                spec.points[i].group_delay = node_delay(unwrapped, i, h);
            }
        }
    }

    if (two_mode && !spec.points.empty()) {
        double worst = 0.0;
        for (const auto& p : spec.points) {
            worst = std::max(worst, *p.route_discrepancy);
        }
        spec.max_route_discrepancy = worst;
    }
    return spec;
}

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = start;
        return grid;
    }
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = start + step * static_cast<double>(i);
    }
    if (count > 1) {
        grid.back() = stop;
    }
    return grid;
}

} // namespace omit
