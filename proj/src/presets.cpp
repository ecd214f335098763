#include "omit/presets.hpp"

#include "omit/constants.hpp"
#include "omit/errors.hpp"
#include "omit/nmode.hpp"
#include "omit/output.hpp"
#include "omit/parallel.hpp"
#include "omit/config_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace omit {

namespace {

constexpr double kOmegaM = constants::two_pi * 947e3;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Json = nlohmann::ordered_json;

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += (i ? "," : "") + header[i];
    }
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

struct Writer {
    std::filesystem::path dir;
    FigureOutput out;

    void put(const std::string& name, const std::string& text) {
        write_text(dir / name, text);
        out.files.push_back(name);
    }
    void spectrum(const std::string& name, const Spectrum& s) { put(name, spectrum_csv(s)); }
};

std::vector<double> grid(double lo, double hi, std::size_t n) { return linear_grid(lo * kOmegaM, hi * kOmegaM, n); }

Json windows_json(const Spectrum& s) {
    Json arr = Json::array();
    for (const auto& f : fit_linewidth(s)) {
        arr.push_back({{"center_over_omega_m", f.center / kOmegaM},
                       {"fwhm_hz", f.fwhm / constants::two_pi},
                       {"half_prominence_width_hz", f.half_prominence_width / constants::two_pi},
                       {"peak_height", f.peak_height}});
    }
    return arr;
}

double main_fwhm(const Spectrum& s) {
    const auto fits = fit_linewidth(s);
    if (fits.empty()) {
        return kNan;
    }
    return std::max_element(fits.begin(), fits.end(), [](const LinewidthFit& a, const LinewidthFit& b) {
               return a.peak_height - a.baseline < b.peak_height - b.baseline;
           })->fwhm;
}

std::vector<Spectrum> param_maps(const SystemConfig& base, const std::string& key, std::span<const double> values,
                                 std::span<const double> g, bool second, int jobs) {
    std::vector<Spectrum> out(values.size());
    detail::parallel_for(values.size(), jobs, [&](std::size_t i) {
        SystemConfig c = base;
        set_parameter(c, key, values[i]);
        SpectrumOptions o;
        o.second_order = second;
        o.group_delay = false;
        out[i] = compute_spectrum(c, g, o);
    });
    return out;
}

// long format: one row per (parameter, Omega)
std::string map_csv(const std::string& name, std::span<const double> values, const std::vector<Spectrum>& maps) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (const auto& p : maps[i].points) {
            rows.push_back({values[i], p.omega / kOmegaM, p.transmission, p.efficiency ? 100.0 * *p.efficiency : kNan});
        }
    }
    return csv_table({name, "omega_over_omega_m", "transmission", "efficiency_percent"}, rows);
}

FigureOutput fig2(Writer& w, int jobs) {
    const auto powers = linear_grid(0.1e-3, 3.0e-3, 30);
    const auto g = grid(0.8, 1.2, 4001);
    std::vector<std::vector<double>> rows(powers.size());
    detail::parallel_for(powers.size(), jobs, [&](std::size_t i) {
        std::vector<double> row{powers[i] * 1e3};
        for (std::size_t n : {1, 2}) {
            const auto c = reference_config(n, 0.0, 0.0, powers[i]);
            const auto s = solve_steady_state(c);
            SpectrumOptions o;
            o.second_order = false;
            o.group_delay = false;
            row.push_back(main_fwhm(compute_spectrum(c, s, g, o)) / constants::two_pi);
            row.push_back(2.0 * predict_linewidth(c, s) / constants::two_pi);
        }
        rows[i] = row;
    });
    w.put("fig2a_linewidth.csv",
          csv_table({"power_mw", "fwhm_single_hz", "predicted_fwhm_single_hz", "fwhm_double_hz",
                     "predicted_fwhm_double_hz"},
                    rows));

    const auto single = compute_spectrum(reference_config(1), g, {jobs});
    const auto two = compute_spectrum(reference_config(2), g, {jobs});
    w.spectrum("fig2bc_single.csv", single);
    w.spectrum("fig2bc_double.csv", two);

    Json ratios = Json::array();
    for (double p : {0.5e-3, 1.0e-3, 1.5e-3, 2.0e-3}) {
        SpectrumOptions o{jobs, false, false};
        const double a = main_fwhm(compute_spectrum(reference_config(1, 0, 0, p), g, o));
        const double b = main_fwhm(compute_spectrum(reference_config(2, 0, 0, p), g, o));
        ratios.push_back({{"power_mw", p * 1e3}, {"fwhm_ratio_double_over_single", b / a}});
    }
    Json s;
    s["figure"] = "fig2";
    s["linewidth_ratios"] = ratios;
    s["max_efficiency_percent_single"] = 100.0 * max_efficiency(reference_config(1), g, jobs);
    s["max_efficiency_percent_double"] = 100.0 * max_efficiency(reference_config(2), g, jobs);
    w.out.summary_json = s.dump(2);
    return w.out;
}

FigureOutput fig3(Writer& w, int jobs) {
    const auto g = grid(0.8, 1.2, 4001);
    const auto powers = linear_grid(0.5e-3, 2.5e-3, 21);
    const auto coarse = grid(0.8, 1.2, 801);
    const auto unbroken = reference_config(2);
    const auto broken = reference_config(2, 0.05, 0.5 * constants::pi);
    w.put("fig3ac_unbroken_map.csv",
          map_csv("power_w", powers, param_maps(unbroken, "drive.power_pump_w", powers, coarse, true, jobs)));
    w.put("fig3bd_broken_map.csv",
          map_csv("power_w", powers, param_maps(broken, "drive.power_pump_w", powers, coarse, true, jobs)));
    const auto su = compute_spectrum(unbroken, g, {jobs});
    const auto sb = compute_spectrum(broken, g, {jobs});
    w.spectrum("fig3ef_unbroken.csv", su);
    w.spectrum("fig3ef_broken.csv", sb);

    Json s;
    s["figure"] = "fig3";
    s["unbroken_windows"] = windows_json(su);
    s["broken_windows"] = windows_json(sb);
    s["broken_window_count"] = count_windows(sb);
    s["unbroken_window_count"] = count_windows(su);
    s["theta_pi_window_count"] = count_windows(compute_spectrum(reference_config(2, 0.05, constants::pi), g, {jobs}));
    w.out.summary_json = s.dump(2);
    return w.out;
}

FigureOutput fig4(Writer& w, int jobs) {
    const auto coarse = grid(0.8, 1.2, 801);
    const auto etas = linear_grid(0.0, 0.1, 21);
    std::vector<double> eta_hz(etas);
    for (auto& e : eta_hz) {
        e *= 947e3;
    }
    const auto thetas = linear_grid(0.0, 2.0, 101);
    w.put("fig4a_eta_map.csv", map_csv("eta_hz", eta_hz,
                                       param_maps(reference_config(2, 0.0, 0.5 * constants::pi), "coupling.1.eta_hz",
                                                  eta_hz, coarse, false, jobs)));
    w.put("fig4b_theta_map.csv", map_csv("theta_pi_units", thetas,
                                         param_maps(reference_config(2, 0.05), "coupling.1.theta_pi_units", thetas,
                                                    coarse, false, jobs)));
    const auto g = grid(0.8, 1.2, 4001);
    Json counts;
    for (double eta : {0.0, 0.02, 0.1}) {
        const auto sp = compute_spectrum(reference_config(2, eta, 0.5 * constants::pi), g, {jobs, false, true});
        char name[64];
        std::snprintf(name, sizeof name, "fig4c_eta_%.2f.csv", eta);
        w.spectrum(name, sp);
        counts[format_double(eta)] = count_windows(sp);
    }

    const auto fine = linear_grid(0.0, 2.0, 401);
    std::vector<std::vector<double>> rows(fine.size());
    detail::parallel_for(fine.size(), jobs, [&](std::size_t i) {
        const auto c = reference_config(2, 0.05, fine[i] * constants::pi);
        const auto s = solve_steady_state(c);
        const auto m = make_sideband_model(c, s);
        const double eps = probe_amplitude(c);
        auto rate = [&](double om) {
            return transmission(solve_first_order_system(m, om, eps).a_minus, eps, c.cavity.kappa).rate;
        };
        rows[i] = {fine[i], rate(0.95 * kOmegaM), rate(1.05 * kOmegaM)};
    });
    w.put("fig4d_theta_windows.csv", csv_table({"theta_pi_units", "transmission_left", "transmission_right"}, rows));

    Json switches = Json::array();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a = rows[i - 1][1] - rows[i - 1][2];
        const double b = rows[i][1] - rows[i][2];
        if ((a < 0.0) != (b < 0.0)) {
            switches.push_back(rows[i - 1][0] + (rows[i][0] - rows[i - 1][0]) * a / (a - b));
        }
    }
    Json s;
    s["figure"] = "fig4";
    s["window_count_by_eta_over_omega_m"] = counts;
    s["switch_points_theta_pi_units"] = switches;
    w.out.summary_json = s.dump(2);
    return w.out;
}

FigureOutput fig5(Writer& w, int jobs) {
    const auto coarse = grid(0.5, 1.5, 1001);
    const auto etas = linear_grid(0.0, 0.2, 41);
    std::vector<double> eta_hz(etas);
    for (auto& e : eta_hz) {
        e *= 947e3;
    }
    const auto thetas = linear_grid(0.0, 2.0, 101);
    const auto map_a = param_maps(reference_config(2), "coupling.1.eta_hz", eta_hz, coarse, true, jobs);
    const auto map_b =
        param_maps(reference_config(2, 0.0, 0.5 * constants::pi), "coupling.1.eta_hz", eta_hz, coarse, true, jobs);
    w.put("fig5a_eta_map_theta0.csv", map_csv("eta_hz", eta_hz, map_a));
    w.put("fig5b_eta_map_theta_half_pi.csv", map_csv("eta_hz", eta_hz, map_b));
    w.put("fig5c_theta_map.csv", map_csv("theta_pi_units", thetas,
                                         param_maps(reference_config(2, 0.05), "coupling.1.theta_pi_units", thetas,
                                                    coarse, true, jobs)));
    const auto g = grid(0.5, 1.5, 4001);
    for (double eta : {0.1, 0.2}) {
        char name[64];
        std::snprintf(name, sizeof name, "fig5d_theta_pi_eta_%.1f.csv", eta);
        w.spectrum(name, compute_spectrum(reference_config(2, eta, constants::pi), g, {jobs, true, false}));
    }
    auto sweep_max = [&](double theta) {
        double best = 0.0;
        for (double eta : etas) {
            best = std::max(best, max_efficiency(reference_config(2, eta, theta), g, jobs));
        }
        return best;
    };
    const double pi_max = max_efficiency(reference_config(2, 0.2, constants::pi), g, jobs);
    const double zero_max = max_efficiency(reference_config(2, 0.2, 0.0), g, jobs);
    Json s;
    s["figure"] = "fig5";
    s["max_efficiency_percent_theta_pi_eta_0.2"] = 100.0 * pi_max;
    s["max_efficiency_percent_theta_0_eta_0.2"] = 100.0 * zero_max;
    s["enhancement_ratio"] = pi_max / zero_max;
    s["max_efficiency_percent_theta_0_eta_sweep"] = 100.0 * sweep_max(0.0);
    s["max_efficiency_percent_theta_half_pi_eta_sweep"] = 100.0 * sweep_max(0.5 * constants::pi);
    w.out.summary_json = s.dump(2);
    return w.out;
}

FigureOutput fig6(Writer& w, int jobs) {
    const auto powers = linear_grid(0.1e-3, 3.0e-3, 30);
    std::vector<std::vector<double>> rows(powers.size());
    detail::parallel_for(powers.size(), jobs, [&](std::size_t i) {
        const auto u = reference_config(2, 0.0, 0.0, powers[i]);
        const auto b = reference_config(2, 0.05, 0.5 * constants::pi, powers[i]);
        const auto su = solve_steady_state(u);
        const auto sb = solve_steady_state(b);
        rows[i] = {powers[i] * 1e3, group_delay_at(u, su, kOmegaM).value,
                   group_delay_at(b, sb, 0.95 * kOmegaM).value, group_delay_at(b, sb, 1.05 * kOmegaM).value};
    });
    w.put("fig6a_delay_vs_power.csv",
          csv_table({"power_mw", "delay_unbroken_s", "delay_left_s", "delay_right_s"}, rows));

    const auto base = reference_config(2, 0.05);
    const auto thetas = linear_grid(0.0, 2.0, 2001);
    std::vector<std::vector<double>> trows(thetas.size());
    detail::parallel_for(thetas.size(), jobs, [&](std::size_t i) {
        const double t = thetas[i] * constants::pi;
        trows[i] = {thetas[i], group_delay_vs_theta(base, 0.95 * kOmegaM, t),
                    group_delay_vs_theta(base, 1.05 * kOmegaM, t)};
    });
    w.put("fig6bc_delay_vs_theta.csv", csv_table({"theta_pi_units", "delay_left_s", "delay_right_s"}, trows));

    const auto left = maximize_scan([&](double t) { return group_delay_vs_theta(base, 0.95 * kOmegaM, t); }, 0.0,
                                    constants::two_pi, 2001, 8, jobs);
    const auto right = maximize_scan([&](double t) { return group_delay_vs_theta(base, 1.05 * kOmegaM, t); }, 0.0,
                                     constants::two_pi, 2001, 8, jobs);
    const auto u = reference_config(2);
    const double unbroken = group_delay_at(u, solve_steady_state(u), kOmegaM).value;
    Json s;
    s["figure"] = "fig6";
    s["max_delay_left_s"] = left.value;
    s["max_delay_left_theta_pi_units"] = left.at / constants::pi;
    s["max_delay_right_s"] = right.value;
    s["max_delay_right_theta_pi_units"] = right.at / constants::pi;
    s["unbroken_delay_s"] = unbroken;
    s["broken_over_unbroken"] = std::max(std::abs(left.value), std::abs(right.value)) / std::abs(unbroken);
    w.out.summary_json = s.dump(2);
    return w.out;
}

FigureOutput fig7(Writer& w, int jobs) {
    const auto g = grid(0.8, 1.2, 4001);
    Json widths = Json::array();
    double single = kNan;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto c = reference_config(n);
        const auto s = solve_steady_state(c);
        const auto sp = n_mode_spectrum(c, g, jobs);
        w.spectrum("fig7a_n" + std::to_string(n) + ".csv", sp);
        const double f = main_fwhm(sp);
        if (n == 1) {
            single = f;
        }
        widths.push_back({{"n", n},
                          {"fwhm_hz", f / constants::two_pi},
                          {"predicted_fwhm_hz", 2.0 * predict_linewidth(c, s) / constants::two_pi},
                          {"ratio_to_single", f / single}});
    }
    Json counts;
    for (std::size_t n : {3, 4}) {
        const auto sp = n_mode_spectrum(reference_config(n, 0.05, 0.5 * constants::pi), g, jobs);
        w.spectrum("fig7" + std::string(n == 3 ? "b" : "c") + "_broken_n" + std::to_string(n) + ".csv", sp);
        w.spectrum("fig7" + std::string(n == 3 ? "b" : "c") + "_unbroken_n" + std::to_string(n) + ".csv",
                   n_mode_spectrum(reference_config(n), g, jobs));
        counts[std::to_string(n)] = count_windows(sp);
    }
    Json s;
    s["figure"] = "fig7";
    s["linewidths"] = widths;
    s["broken_window_counts"] = counts;
    w.out.summary_json = s.dump(2);
    return w.out;
}

} // namespace

SystemConfig reference_config(std::size_t modes, double eta_over_omega_m, double theta, double power) {
    if (modes == 0) {
        throw InvalidParameter("need at least one mode");
    }
    SystemConfig c;
    c.cavity.kappa = constants::two_pi * 215e3;
    c.cavity.wavelength = 1064e-9;
    c.cavity.cavity_length = 25e-3;
    const double g = derive_single_photon_coupling(1064e-9, 25e-3, 145e-12, kOmegaM);
    for (std::size_t i = 0; i < modes; ++i) {
        c.modes.push_back({kOmegaM, kOmegaM / 6700.0, g});
    }
    for (std::size_t i = 0; i + 1 < modes; ++i) {
        c.couplings.push_back({eta_over_omega_m * kOmegaM,
                               i == 0 ? canonical_phase(theta) : 0.0});
    }
    c.drive.power_pump = power;
    c.drive.probe_ratio = 0.05;
    c.drive.omega_pump = optical_angular_frequency(1064e-9);
    c.cavity.pinned_delta_eff = kOmegaM;
    c.cavity.delta_c = bare_detuning_for_effective(c, kOmegaM);
    return c;
}

Extremum maximize_scan(const std::function<double(double)>& f, double lo, double hi, std::size_t samples,
                       int refinements, int jobs) {
    if (samples < 3 || !(hi > lo)) {
        throw InvalidParameter("scan needs at least three samples on a non-empty interval");
    }
    Extremum best{lo, -std::numeric_limits<double>::infinity()};
    double a = lo, b = hi;
    std::size_t n = samples;
    for (int level = 0; level <= refinements; ++level) {
        const auto xs = linear_grid(a, b, n);
        std::vector<double> ys(xs.size());
        detail::parallel_for(xs.size(), jobs, [&](std::size_t i) { ys[i] = f(xs[i]); });
        std::size_t k = 0;
        for (std::size_t i = 1; i < ys.size(); ++i) {
            if (ys[i] > ys[k]) {
                k = i;
            }
        }
        if (ys[k] > best.value) {
            best = {xs[k], ys[k]};
        }
        const double h = xs[1] - xs[0];
        a = std::max(lo, best.at - h);
        b = std::min(hi, best.at + h);
        n = 41;
    }
    return best;
}

double max_efficiency(const SystemConfig& config, std::span<const double> grid, int jobs) {
    SpectrumOptions o;
    o.jobs = jobs;
    o.group_delay = false;
    const auto s = compute_spectrum(config, grid, o);
    double best = 0.0;
    for (const auto& p : s.points) {
        best = std::max(best, p.efficiency.value_or(0.0));
    }
    return best;
}

double group_delay_vs_theta(const SystemConfig& config, double omega, double theta) {
    SystemConfig c = config;
    c.couplings.at(0).theta = canonical_phase(theta);
    return group_delay_at(c, solve_steady_state(c), omega).value;
}

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

FigureOutput figure_preset(const std::string& name, const std::filesystem::path& out_dir, int jobs) {
    Writer w{out_dir, {}};
    FigureOutput out;
    if (name == "fig2") {
        out = fig2(w, jobs);
    } else if (name == "fig3") {
        out = fig3(w, jobs);
    } else if (name == "fig4") {
        out = fig4(w, jobs);
    } else if (name == "fig5") {
        out = fig5(w, jobs);
    } else if (name == "fig6") {
        out = fig6(w, jobs);
    } else if (name == "fig7") {
        out = fig7(w, jobs);
    } else {
        throw ConfigError("unknown figure preset '" + name + "' (expected fig2..fig7)");
    }
    write_text(out_dir / "summary.json", out.summary_json + "\n");
    out.files.push_back("summary.json");
    return out;
}

} // namespace omit
