#include "omit/config_io.hpp"
#include "omit/constants.hpp"
#include "omit/core_model.hpp"
#include "omit/darkmode.hpp"
#include "omit/errors.hpp"
#include "omit/nmode.hpp"
#include "omit/oracle.hpp"
#include "omit/output.hpp"
#include "omit/presets.hpp"
#include "omit/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kPartial = 4 };

struct Common {
    std::string config;
    std::string out_dir;
    std::string grid = "0.8:1.2:4001";
    std::string format = "csv";
    int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_grid) {
    cmd->add_option("--config", c.config, "config file");
    cmd->add_option("--out-dir", c.out_dir, "output directory (default: stdout)");
    cmd->add_option("--jobs", c.jobs, "worker threads")->envname("OMIT_LAB_JOBS")->check(CLI::PositiveNumber);
    if (with_grid) {
        cmd->add_option("--omega-grid", c.grid, "probe detuning grid start:stop:count in units of omega_m");
    }
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

omit::SystemConfig require_config(const Common& c) {
    if (c.config.empty()) {
        throw omit::ConfigError("--config is required");
    }
    return omit::load_config(c.config);
}

void emit(const Common& c, const std::string& name, const std::string& text) {
    if (c.out_dir.empty()) {
        std::cout << text;
    } else {
        omit::write_text(std::filesystem::path(c.out_dir) / name, text);
    }
}

Json cjson(omit::cd z) { return Json::array({z.real(), z.imag()}); }

Json spectrum_json(const omit::Spectrum& s) {
    Json j;
    j["omega_m_rad_s"] = s.omega_ref;
    j["delta_eff_rad_s"] = s.steady.delta_eff;
    j["alpha"] = cjson(s.steady.alpha);
    j["multistable"] = s.steady.multistable;
    if (s.max_route_discrepancy) {
        j["max_route_discrepancy"] = *s.max_route_discrepancy;
    }
    auto& pts = j["points"] = Json::array();
    for (const auto& p : s.points) {
        Json q;
        q["omega_over_omega_m"] = p.omega / s.omega_ref;
        q["transmission"] = p.transmission;
        q["efficiency_percent"] = p.efficiency ? Json(100.0 * *p.efficiency) : Json(nullptr);
        q["phase_rad"] = p.phase;
        q["group_delay_s"] = p.group_delay ? Json(*p.group_delay) : Json(nullptr);
        q["route_discrepancy"] = p.route_discrepancy ? Json(*p.route_discrepancy) : Json(nullptr);
        pts.push_back(q);
    }
    return j;
}

void emit_spectrum(const Common& c, const omit::Spectrum& s) {
    if (c.format == "json") {
        emit(c, "spectrum.json", spectrum_json(s).dump(2) + "\n");
    } else {
        emit(c, "spectrum.csv", omit::spectrum_csv(s));
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') {
            throw omit::ConfigError("'" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw omit::ConfigError("empty value list");
    }
    return out;
}

Json darkmode_report(const omit::SystemConfig& c) {
    const auto s = omit::solve_steady_state(c);
    Json j;
    j["delta_eff_rad_s"] = s.delta_eff;
    j["alpha"] = cjson(s.alpha);
    if (c.modes.size() == 2) {
        const auto r = omit::hybridize_two_mode(c, s);
        Json h;
        h["omega_plus_rad_s"] = r.omega_plus;
        h["omega_minus_rad_s"] = r.omega_minus;
        h["zeta_rad_s"] = r.zeta;
        h["g_plus_rad_s"] = r.g_plus;
        h["f"] = r.f;
        h["h"] = r.h;
        h["g_tilde_plus_rad_s"] = cjson(r.g_tilde_plus);
        h["g_tilde_minus_rad_s"] = cjson(r.g_tilde_minus);
        h["omega_tilde_plus_rad_s"] = r.omega_tilde_plus;
        h["omega_tilde_minus_rad_s"] = r.omega_tilde_minus;
        h["g1_rad_s"] = r.g1;
        h["g2_rad_s"] = r.g2;
        j["hybrid_modes"] = h;
        const auto b = omit::dark_mode_broken(c, s);
        j["dark_mode_broken"] = b.broken;
        j["min_phase_dressed_coupling_rad_s"] = b.min_coupling;
    }
    try {
        const auto a = omit::adiabatic_elimination(c, s);
        Json p;
        if (a.xi1) {
            p["xi1_rad_s"] = cjson(*a.xi1);
            p["xi2_rad_s"] = cjson(*a.xi2);
        }
        p["gamma_opt_rad_s"] = a.gamma_opt;
        p["omega_opt_rad_s"] = a.omega_opt;
        p["gamma_eff_rad_s"] = a.gamma_eff ? Json(*a.gamma_eff) : Json(nullptr);
        p["omega_eff_rad_s"] = a.omega_eff ? Json(*a.omega_eff) : Json(nullptr);
        p["warnings"] = a.warnings;
        j["adiabatic"] = p;
    } catch (const omit::Error& e) {
        j["adiabatic"] = nullptr;
        j["adiabatic_unavailable"] = e.what();
    }
    return j;
}

Json basis_json(const omit::NormalModeBasis& b) {
    Json j;
    j["n"] = b.n;
    j["frequencies_rad_s"] = std::vector<double>(b.frequencies.data(), b.frequencies.data() + b.frequencies.size());
    j["phase_accumulator_rad"] =
        std::vector<double>(b.phase_accumulator.data(), b.phase_accumulator.data() + b.phase_accumulator.size());
    auto& m = j["transform_row_major"] = Json::array();
    for (Eigen::Index r = 0; r < b.transform.rows(); ++r) {
        for (Eigen::Index k = 0; k < b.transform.cols(); ++k) {
            m.push_back(cjson(b.transform(r, k)));
        }
    }
    auto& g = j["effective_couplings_rad_s"] = Json::array();
    for (Eigen::Index k = 0; k < b.effective_couplings.size(); ++k) {
        g.push_back(cjson(b.effective_couplings(k)));
    }
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"omit-lab: optomechanical transparency and sideband simulator"};
    app.require_subcommand(1);

    Common spectrum_opts;
    auto* spectrum = app.add_subcommand("spectrum", "transmission, efficiency and group delay over an Omega grid");
    add_common(spectrum, spectrum_opts, true);

    Common sweep_opts;
    std::string sweep_param, sweep_values_text, sweep_range;
    bool first_order_only = false;
    auto* sweep = app.add_subcommand("sweep", "spectra over a swept config parameter");
    add_common(sweep, sweep_opts, true);
    sweep->add_option("--param", sweep_param, "dotted key, e.g. drive.power_pump_w or coupling.1.theta_pi_units")
        ->required();
    auto* values_opt = sweep->add_option("--values", sweep_values_text, "comma-separated values");
    auto* range_opt = sweep->add_option("--range", sweep_range, "start:stop:count[:log]");
    values_opt->excludes(range_opt);
    sweep->add_flag("--first-order-only", first_order_only, "skip second-order sidebands");

    Common dark_opts;
    auto* dark = app.add_subcommand("darkmode", "dark-mode analytics");
    auto* dark_report = dark->add_subcommand("report", "hybridization and adiabatic-elimination report (JSON)");
    add_common(dark_report, dark_opts, false);
    dark->require_subcommand(1);

    Common nmode_opts;
    std::size_t n_modes = 3;
    double eta_over = 0.0, theta1_pi = 0.0;
    auto* nmode = app.add_subcommand("nmode", "N-mechanical-mode chain");
    nmode->require_subcommand(1);
    auto* nmode_spec = nmode->add_subcommand("spectrum", "first-order N-mode transmission");
    auto* nmode_basis = nmode->add_subcommand("basis", "normal-mode basis (JSON)");
    for (auto* cmd : {nmode_spec, nmode_basis}) {
        add_common(cmd, nmode_opts, cmd == nmode_spec);
        cmd->add_option("--n", n_modes, "number of mechanical modes (reference device)")->check(CLI::PositiveNumber);
        cmd->add_option("--eta-over-omegam", eta_over, "exchange strength in units of omega_m");
        cmd->add_option("--theta1-pi", theta1_pi, "first-link phase in units of pi");
    }

    Common oracle_opts;
    std::string oracle_omegas = "0.94,0.95,1.0,1.05,1.06";
    double oracle_ratio = 0.01;
    auto* oracle = app.add_subcommand("oracle", "time-domain cross-check");
    oracle->require_subcommand(1);
    auto* oracle_check = oracle->add_subcommand("check", "demodulated trajectory vs frequency-domain sidebands (JSON)");
    add_common(oracle_check, oracle_opts, false);
    oracle_check->add_option("--omegas", oracle_omegas, "probe detunings in units of omega_m");
    oracle_check->add_option("--probe-ratio", oracle_ratio, "eps_p / eps_L for the comparison");

    Common figure_opts;
    std::string figure_name;
    auto* figure = app.add_subcommand("figure", "reproduce a figure's sweeps");
    add_common(figure, figure_opts, false);
    figure->add_option("name", figure_name, "fig2 .. fig7")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*spectrum) {
            const auto c = require_config(spectrum_opts);
            const auto g = omit::parse_grid(spectrum_opts.grid).absolute(c.modes.front().omega);
            omit::SpectrumOptions o;
            o.jobs = spectrum_opts.jobs;
            emit_spectrum(spectrum_opts, omit::compute_spectrum(c, g, o));
            return kOk;
        }
        if (*sweep) {
            const auto c = require_config(sweep_opts);
            if (sweep_opts.out_dir.empty()) {
                throw omit::ConfigError("sweep needs --out-dir");
            }
            omit::SweepSpec spec;
            spec.parameter = sweep_param;
            spec.grid = omit::parse_grid(sweep_opts.grid);
            spec.second_order = !first_order_only;
            if (!sweep_values_text.empty()) {
                spec.values = parse_list(sweep_values_text);
            } else if (!sweep_range.empty()) {
                double a = 0, b = 0;
                unsigned long long n = 0;
                char mode[8] = {0};
                const int got = std::sscanf(sweep_range.c_str(), "%lf:%lf:%llu:%7s", &a, &b, &n, mode);
                if (got < 3 || (got == 4 && std::string(mode) != "log" && std::string(mode) != "linear")) {
                    throw omit::ConfigError("--range must be start:stop:count[:log|linear]");
                }
                spec.values = omit::sweep_values(a, b, static_cast<std::size_t>(n), std::string(mode) == "log");
            } else {
                throw omit::ConfigError("sweep needs --values or --range");
            }
            const auto bundle = omit::run_sweep(c, spec, sweep_opts.out_dir, sweep_opts.jobs);
            for (const auto& p : bundle.points) {
                if (!p.ok) {
                    std::cerr << "point " << p.index << " (" << p.value << "): " << p.error << "\n";
                }
            }
            std::cout << bundle.manifest.string() << "\n";
            return bundle.exit_code();
        }
        if (*dark_report) {
            const auto c = require_config(dark_opts);
            emit(dark_opts, "darkmode.json", darkmode_report(c).dump(2) + "\n");
            return kOk;
        }
        if (*nmode_spec || *nmode_basis) {
            omit::SystemConfig c = nmode_opts.config.empty()
                                       ? omit::reference_config(n_modes, eta_over, theta1_pi * omit::constants::pi)
                                       : omit::load_config(nmode_opts.config);
            if (*nmode_spec) {
                const auto g = omit::parse_grid(nmode_opts.grid).absolute(c.modes.front().omega);
                emit_spectrum(nmode_opts, omit::n_mode_spectrum(c, g, nmode_opts.jobs));
            } else {
                const auto s = omit::solve_steady_state(c);
                emit(nmode_opts, "basis.json", basis_json(omit::normal_modes_from(c, s)).dump(2) + "\n");
            }
            return kOk;
        }
        if (*oracle_check) {
            const auto c = require_config(oracle_opts);
            auto omegas = parse_list(oracle_omegas);
            for (auto& w : omegas) {
                w *= c.modes.front().omega;
            }
            omit::OracleCheckOptions o;
            o.probe_ratio = oracle_ratio;
            o.jobs = oracle_opts.jobs;
            const auto rows = omit::oracle_check(c, omegas, o);
            Json j = Json::array();
            for (const auto& r : rows) {
                j.push_back({{"omega_over_omega_m", r.omega / c.modes.front().omega},
                             {"a1_minus_frequency_domain", cjson(r.a1_frequency)},
                             {"a1_minus_time_domain", cjson(r.a1_time)},
                             {"a1_relative_error", r.error1},
                             {"a2_minus_frequency_domain", cjson(r.a2_frequency)},
                             {"a2_minus_time_domain", cjson(r.a2_time)},
                             {"a2_relative_error", r.error2},
                             {"demodulation_residual", r.residual},
                             {"reliable", r.reliable}});
            }
            emit(oracle_opts, "oracle.json", j.dump(2) + "\n");
            return kOk;
        }
        if (*figure) {
            if (figure_opts.out_dir.empty()) {
                throw omit::ConfigError("figure needs --out-dir");
            }
            const auto out = omit::figure_preset(figure_name, figure_opts.out_dir, figure_opts.jobs);
            std::cout << out.summary_json << "\n";
            return kOk;
        }
    } catch (const omit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const omit::InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return kConfig;
    } catch (const omit::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
