#include "omit/darkmode.hpp"

#include "omit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace omit {

namespace {

void require_identical(const SystemConfig& config) {
    const auto& ref = config.modes.front();
    for (const auto& m : config.modes) {
        if (m.omega != ref.omega || m.gamma != ref.gamma || m.g != ref.g) {
            throw UnsupportedTopology("linewidth prediction assumes identical mechanical modes");
        }
    }
}

bool all_uncoupled(const SystemConfig& config) {
    return std::all_of(config.couplings.begin(), config.couplings.end(),
                       [](const PhononCoupling& c) { return c.eta == 0.0; });
}

double gamma_opt_exact(double g_lin, double kappa, double delta, double omega) {
    const double g2 = g_lin * g_lin;
    return g2 * kappa / (kappa * kappa + (delta - omega) * (delta - omega)) -
           g2 * kappa / (kappa * kappa + (delta + omega) * (delta + omega));
}

double omega_opt_exact(double g_lin, double kappa, double delta, double omega) {
    const double g2 = g_lin * g_lin;
    return g2 * (delta + omega) / (kappa * kappa + (delta + omega) * (delta + omega)) +
           g2 * (delta - omega) / (kappa * kappa + (delta - omega) * (delta - omega));
}

cd xi_exact(double g1, double g2, double kappa, double delta, double omega_other) {
    const double p = delta + omega_other;
    const double m = delta - omega_other;
    return g1 * g2 * cd(kappa, p) / (kappa * kappa + p * p) -
           g1 * g2 * cd(kappa, -m) / (kappa * kappa + m * m);
}

} // namespace

HybridModeReport hybridize_two_mode(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    if (config.modes.size() != 2) {
        throw UnsupportedTopology("two-mode hybridization needs exactly two mechanical modes");
    }
    const auto g = linearized_couplings(config, steady);
    const double g1 = g(0), g2 = g(1);
    const double w1 = config.modes[0].omega, w2 = config.modes[1].omega;
    const double eta = config.couplings[0].eta;
    const double theta = config.couplings[0].theta;

    HybridModeReport r;
    r.g1 = g1;
    r.g2 = g2;
    const double weight = g1 * g1 + g2 * g2;
    r.g_plus = std::sqrt(weight);
    if (weight > 0.0) {
        r.omega_plus = (g1 * g1 * w1 + g2 * g2 * w2) / weight;
        r.omega_minus = (g2 * g2 * w1 + g1 * g1 * w2) / weight;
        r.zeta = g1 * g2 * (w1 - w2) / weight;
    } else {
        r.omega_plus = w1;
        r.omega_minus = w2;
        r.zeta = 0.0;
    }

    const double split = std::sqrt((w1 - w2) * (w1 - w2) + 4.0 * eta * eta);
    r.omega_tilde_plus = 0.5 * (w1 + w2 + split);
    r.omega_tilde_minus = 0.5 * (w1 + w2 - split);
    const double offset = r.omega_tilde_minus - w1;
    if (eta > 0.0 && offset != 0.0) {
        r.f = std::abs(offset) / std::hypot(offset, eta);
        r.h = eta * r.f / offset;
    } else if (w1 == w2) {
        // eta -> 0 limit of the degenerate pair
        r.f = 1.0 / std::sqrt(2.0);
        r.h = -1.0 / std::sqrt(2.0);
    } else if (w1 < w2 || eta > 0.0) {
        r.f = 0.0;
        r.h = -1.0;
    } else {
        r.f = 1.0;
        r.h = 0.0;
    }
    const cd e = std::polar(1.0, theta);
    r.g_tilde_plus = r.f * g1 - std::conj(e) * r.h * g2;
    r.g_tilde_minus = e * r.h * g1 + r.f * g2;

    if (w1 == w2 && g1 == g2) {
        const cd plus = std::sqrt(2.0) * g1 * (1.0 + std::conj(e)) / 2.0;
        const cd minus = std::sqrt(2.0) * g1 * (1.0 - e) / 2.0;
        const double tol = 1e-12 * std::max(g1, 1e-300);
        if (std::abs(plus - r.g_tilde_plus) > tol || std::abs(minus - r.g_tilde_minus) > tol) {
            throw Error("phase-dressed couplings disagree with the degenerate special case");
        }
    }
    return r;
}

DarkModeStatus dark_mode_broken(const SystemConfig& config, const SteadyState& steady, double tolerance) {
    const auto r = hybridize_two_mode(config, steady);
    DarkModeStatus s;
    s.min_coupling = std::min(std::abs(r.g_tilde_plus), std::abs(r.g_tilde_minus));
    s.broken = s.min_coupling > tolerance * r.g_plus;
    return s;
}

AdiabaticParams adiabatic_elimination(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    if (!all_uncoupled(config)) {
        throw RegimeViolation("adiabatic elimination is derived for eta = 0");
    }
    if (config.modes.size() > 2) {
        throw UnsupportedTopology("adiabatic elimination is provided for one or two modes");
    }
    const double kappa = config.cavity.kappa;
    const double delta = steady.delta_eff;
    const auto g = linearized_couplings(config, steady);

    AdiabaticParams p;
    for (std::size_t l = 0; l < config.modes.size(); ++l) {
        const auto& m = config.modes[l];
        const double gl = g(static_cast<Eigen::Index>(l));
        p.gamma_opt.push_back(gamma_opt_exact(gl, kappa, delta, m.omega));
        p.omega_opt.push_back(omega_opt_exact(gl, kappa, delta, m.omega));
        if (!(m.omega > 10.0 * kappa && kappa > 10.0 * gl && gl > 10.0 * m.gamma)) {
            p.warnings.push_back("mode " + std::to_string(l + 1) +
                                 " outside omega >> kappa >> G >> gamma; elimination is approximate");
        }
    }
    if (config.modes.size() == 2) {
        p.xi1 = xi_exact(g(0), g(1), kappa, delta, config.modes[1].omega);
        p.xi2 = xi_exact(g(0), g(1), kappa, delta, config.modes[0].omega);
    }

    const auto& ref = config.modes.front();
    const bool identical = std::all_of(config.modes.begin(), config.modes.end(), [&](const MechanicalMode& m) {
        return m.omega == ref.omega && m.gamma == ref.gamma && m.g == ref.g;
    });
    if (identical) {
        const double n = static_cast<double>(config.modes.size());
        p.gamma_eff = ref.gamma + n * p.gamma_opt.front();
        p.omega_eff = ref.omega - n * p.omega_opt.front();
    }
    return p;
}

double predict_linewidth(const SystemConfig& raw, const SteadyState& steady) {
    const SystemConfig config = canonicalized(raw);
    require_identical(config);
    if (!all_uncoupled(config)) {
        throw RegimeViolation("linewidth prediction is derived for eta = 0");
    }
    const auto& m = config.modes.front();
    const double g_lin = m.g * std::abs(steady.alpha);
    const double gamma_opt = gamma_opt_exact(g_lin, config.cavity.kappa, steady.delta_eff, m.omega);
    return m.gamma + static_cast<double>(config.modes.size()) * gamma_opt;
}

namespace {

double crossing(std::span<const double> x, std::span<const double> y, std::size_t inside,
                std::size_t outside, double level) {
    const double y0 = y[inside], y1 = y[outside];
    if (y0 == y1) {
        return x[outside];
    }
    const double s = (y0 - level) / (y0 - y1);
    return x[inside] + s * (x[outside] - x[inside]);
}

// Lorentzian core: 1/(y - base) is quadratic in x near the top of a Lorentzian peak.
// Returns the full width, or nothing if the curvature has the wrong sign.
std::optional<std::pair<double, double>> lorentzian_core(std::span<const double> x, std::span<const double> y,
                                                         std::size_t peak, std::size_t left, std::size_t right,
                                                         double base, double level) {
    std::size_t lo = peak, hi = peak;
    while (lo > left && y[lo - 1] >= level) {
        --lo;
    }
    while (hi < right && y[hi + 1] >= level) {
        ++hi;
    }
    while (hi - lo + 1 < 5 && (lo > left || hi < right)) {
        if (lo > left) {
            --lo;
        }
        if (hi - lo + 1 < 5 && hi < right) {
            ++hi;
        }
    }
    const auto count = static_cast<Eigen::Index>(hi - lo + 1);
    if (count < 3) {
        return std::nullopt;
    }
    const double x0 = x[peak];
    const double scale = std::max(std::abs(x[hi] - x0), std::abs(x[lo] - x0));
    Eigen::MatrixXd a(count, 3);
    Eigen::VectorXd b(count);
    for (Eigen::Index r = 0; r < count; ++r) {
        const auto k = lo + static_cast<std::size_t>(r);
        const double u = (x[k] - x0) / scale;
        const double v = y[k] - base;
        if (!(v > 0.0)) {
            return std::nullopt;
        }
        a(r, 0) = 1.0;
        a(r, 1) = u;
        a(r, 2) = u * u;
        b(r) = 1.0 / v;
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    if (!(c(2) > 0.0)) {
        return std::nullopt;
    }
    const double vertex = -c(1) / (2.0 * c(2));
    const double floor = c(0) - c(1) * c(1) / (4.0 * c(2));
    if (!(floor > 0.0)) {
        return std::nullopt;
    }
    const double half_width = std::sqrt(floor / c(2)) * scale;
    return std::make_pair(x0 + vertex * scale, 2.0 * half_width);
}

} // namespace

std::vector<LinewidthFit> fit_linewidth(std::span<const double> x, std::span<const double> y,
                                        const PeakOptions& options) {
    if (x.size() != y.size()) {
        throw InvalidParameter("frequency and transmission sizes differ");
    }
    std::vector<LinewidthFit> fits;
    const std::size_t n = y.size();
    if (n < 3) {
        return fits;
    }
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    const double full_scale = *max_it - *min_it;
    if (!(full_scale > 1e-12)) {
        return fits;
    }
    const double threshold = options.prominence * full_scale;

    std::size_t i = 1;
    while (i + 1 < n) {
        // plateau-aware interior maximum
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) {
            ++j;
        }
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t peak = (i + j) / 2;
        const double top = y[peak];

        // topographic bases: lowest point before reaching higher ground (or the edge)
        std::size_t l = i;
        std::size_t l_min = i;
        while (l > 0 && y[l - 1] <= top) {
            --l;
            if (y[l] < y[l_min]) {
                l_min = l;
            }
        }
        std::size_t r = j;
        std::size_t r_min = j;
        while (r + 1 < n && y[r + 1] <= top) {
            ++r;
            if (y[r] < y[r_min]) {
                r_min = r;
            }
        }
        const double base = std::max(y[l_min], y[r_min]);
        const double prominence = top - base;
        if (prominence >= threshold) {
            LinewidthFit fit;
            fit.peak_height = top;
            fit.baseline = base;
            const double half = top - 0.5 * prominence;
            std::size_t a = peak;
            while (a > l_min && y[a - 1] > half) {
                --a;
            }
            std::size_t b = peak;
            while (b < r_min && y[b + 1] > half) {
                ++b;
            }
            const double left_x = a > l_min ? crossing(x, y, a, a - 1, half) : x[l_min];
            const double right_x = b < r_min ? crossing(x, y, b, b + 1, half) : x[r_min];
            fit.half_prominence_width = right_x - left_x;

            const double core_level = top - options.core_fraction * prominence;
            const auto core = lorentzian_core(x, y, peak, l_min, r_min, base, core_level);
            if (core && core->first >= x.front() && core->first <= x.back()) {
                fit.center = core->first;
                fit.fwhm = core->second;
            } else {
                fit.center = x[peak];
                fit.fwhm = fit.half_prominence_width;
            }
            if (fit.fwhm > 0.0) {
                fits.push_back(fit);
            }
        }
        i = j + 1;
    }
    std::sort(fits.begin(), fits.end(),
              [](const LinewidthFit& p, const LinewidthFit& q) { return p.center < q.center; });
    for (auto& f : fits) {
        f.window_count = fits.size();
    }
    return fits;
}

std::vector<LinewidthFit> fit_linewidth(const Spectrum& spectrum, const PeakOptions& options) {
    std::vector<double> x, y;
    x.reserve(spectrum.points.size());
    y.reserve(spectrum.points.size());
    for (const auto& p : spectrum.points) {
        x.push_back(p.omega);
        y.push_back(p.transmission);
    }
    return fit_linewidth(x, y, options);
}

} // namespace omit
