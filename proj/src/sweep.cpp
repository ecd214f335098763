#include "omit/sweep.hpp"

#include "omit/config_io.hpp"
#include "omit/errors.hpp"
#include "omit/output.hpp"
#include "omit/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace omit {

std::vector<double> GridSpec::absolute(double omega_ref) const {
    auto g = linear_grid(start, stop, count);
    for (auto& w : g) {
        w *= omega_ref;
    }
    return g;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    char tail = 0;
    unsigned long long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%llu%c", &g.start, &g.stop, &count, &tail) != 3 || count == 0 ||
        !(g.stop >= g.start) || (count > 1 && !(g.stop > g.start))) {
        throw ConfigError("grid must be start:stop:count with start < stop and count >= 1");
    }
    g.count = static_cast<std::size_t>(count);
    return g;
}

std::vector<double> sweep_values(double start, double stop, std::size_t count, bool logarithmic) {
    if (count == 0) {
        throw ConfigError("sweep needs at least one value");
    }
    if (!logarithmic) {
        return linear_grid(start, stop, count);
    }
    if (!(start > 0.0) || !(stop > 0.0)) {
        throw ConfigError("logarithmic sweep needs positive bounds");
    }
    auto v = linear_grid(std::log(start), std::log(stop), count);
    for (auto& x : v) {
        x = std::exp(x);
    }
    v.front() = start;
    v.back() = stop;
    return v;
}

std::vector<SweepPoint> evaluate_sweep(const SystemConfig& config, const SweepSpec& spec, int jobs) {
    if (spec.values.empty()) {
        throw ConfigError("sweep needs at least one value");
    }
    if (spec.grid.count == 0) {
        throw ConfigError("grid needs at least one point");
    }
    {
        // reject bad paths up front instead of failing every point
        SystemConfig probe = config;
        set_parameter(probe, spec.parameter, spec.values.front());
    }
    std::vector<SweepPoint> points(spec.values.size());
    detail::parallel_for(points.size(), jobs, [&](std::size_t i) {
        SweepPoint& p = points[i];
        p.index = i;
        p.value = spec.values[i];
        try {
            SystemConfig c = config;
            set_parameter(c, spec.parameter, p.value);
            const auto steady = solve_steady_state(c);
            p.converged = steady.converged;
            p.multistable = steady.multistable;
            p.iterations = steady.iterations;
            p.residual = steady.residual;
            SpectrumOptions o;
            o.second_order = spec.second_order;
            auto spectrum = compute_spectrum(c, steady, spec.grid.absolute(c.modes.front().omega), o);
            p.max_route_discrepancy = spectrum.max_route_discrepancy;
            p.spectrum = std::move(spectrum);
            p.ok = true;
        } catch (const NonConvergent& e) {
            p.error = e.what();
            p.residual = e.best_residual();
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    });
    return points;
}

int SweepBundle::exit_code() const {
    std::size_t failed = 0;
    for (const auto& p : points) {
        failed += p.ok ? 0 : 1;
    }
    if (failed == 0) {
        return 0;
    }
    return failed == points.size() ? 3 : 4;
}

SweepBundle run_sweep(const SystemConfig& config, const SweepSpec& spec, const std::filesystem::path& out_dir,
                      int jobs) {
    SweepBundle bundle;
    bundle.points = evaluate_sweep(config, spec, jobs);

    nlohmann::ordered_json manifest;
    manifest["generator"] = "omit-lab";
    manifest["format_version"] = 1;
    manifest["config"] = emit_config(config);
    manifest["parameter"] = spec.parameter;
    manifest["grid"] = {{"start_over_omega_m", spec.grid.start},
                        {"stop_over_omega_m", spec.grid.stop},
                        {"count", spec.grid.count}};
    manifest["tolerances"] = {{"steady_state_relative", 1e-12}, {"steady_state_damping", 0.5},
                              {"group_delay", "richardson-2-level"}};
    manifest["columns"] = std::string(kSpectrumHeader);

    std::string all_sums;
    auto& rows = manifest["points"] = nlohmann::ordered_json::array();
    for (const auto& p : bundle.points) {
        nlohmann::ordered_json row;
        row["index"] = p.index;
        row["value"] = p.value;
        row["ok"] = p.ok;
        row["converged"] = p.converged;
        row["multistable"] = p.multistable;
        row["iterations"] = p.iterations;
        row["residual"] = p.residual;
        if (p.max_route_discrepancy) {
            row["max_route_discrepancy"] = *p.max_route_discrepancy;
        }
        std::string file, sum;
        if (p.ok) {
            char name[32];
            std::snprintf(name, sizeof name, "point_%04zu.csv", p.index);
            file = name;
            const std::string csv = spectrum_csv(*p.spectrum);
            sum = hex64(fnv1a64(csv));
            write_text(out_dir / file, csv);
            row["file"] = file;
            row["fnv1a64"] = sum;
        } else {
            row["error"] = p.error;
        }
        all_sums += sum;
        all_sums += '\n';
        bundle.files.push_back(file);
        bundle.checksums.push_back(sum);
        rows.push_back(std::move(row));
    }
    bundle.bundle_checksum = hex64(fnv1a64(all_sums));
    manifest["bundle_fnv1a64"] = bundle.bundle_checksum;
    bundle.manifest = out_dir / "manifest.json";
    write_text(bundle.manifest, manifest.dump(2) + "\n");
    return bundle;
}

} // namespace omit
