#include "omit/config_io.hpp"

#include "omit/constants.hpp"
#include "omit/core_model.hpp"
#include "omit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace omit {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    double value;
    int line;
};

struct Section {
    std::map<std::string, Entry, std::less<>> keys;
    int line = 0;
};

double parse_number(std::string_view text, int line, const std::string& key) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError("'" + std::string(text) + "' is not a finite number", line, key);
    }
    return v;
}

std::size_t parse_index(std::string_view text, int line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
        throw ConfigError("section index must be a positive integer", line);
    }
    return v;
}

class Reader {
public:
    Reader(const Section& s, std::string name) : section_(s), name_(std::move(name)) {}

    std::optional<Entry> get(const std::string& key) {
        used_.push_back(key);
        const auto it = section_.keys.find(key);
        if (it == section_.keys.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    Entry require(const std::string& key) {
        auto e = get(key);
        if (!e) {
            throw ConfigError("[" + name_ + "] is missing " + key, section_.line, key);
        }
        return *e;
    }

    // exactly one of a/b, or neither when optional
    std::pair<std::optional<Entry>, std::optional<Entry>> either(const std::string& a, const std::string& b,
                                                                 bool required) {
        auto ea = get(a);
        auto eb = get(b);
        if (ea && eb) {
            throw ConfigError("both " + a + " and " + b + " given (ambiguous)", std::max(ea->line, eb->line), b);
        }
        if (required && !ea && !eb) {
            throw ConfigError("[" + name_ + "] needs " + a + " or " + b, section_.line, a);
        }
        return {ea, eb};
    }

    void reject_unknown() const {
        for (const auto& [k, e] : section_.keys) {
            if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
                throw ConfigError("unknown key '" + k + "' in [" + name_ + "]", e.line, k);
            }
        }
    }

private:
    const Section& section_;
    std::string name_;
    std::vector<std::string> used_;
};

double hz(double v) { return constants::two_pi * v; }

// Smallest-representation x with x * 2 pi == w exactly.
double to_hz(double w) {
    double x = w / constants::two_pi;
    if (hz(x) == w) {
        return x;
    }
    double up = x, down = x;
    for (int i = 0; i < 16; ++i) {
        up = std::nextafter(up, HUGE_VAL);
        down = std::nextafter(down, -HUGE_VAL);
        if (hz(up) == w) {
            return up;
        }
        if (hz(down) == w) {
            return down;
        }
    }
    return x;
}

double pi_units(double v) { return v * constants::pi; }

void resolve_detuning(SystemConfig& c) {
    if (c.cavity.pinned_delta_eff) {
        c.cavity.delta_c = bare_detuning_for_effective(c, *c.cavity.pinned_delta_eff);
    }
}

} // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

SystemConfig parse_config(std::string_view text) {
    std::map<std::string, Section, std::less<>> sections;
    Section* current = nullptr;
    std::string current_name;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header", line_no);
            }
            current_name = std::string(trim(line.substr(1, line.size() - 2)));
            if (sections.count(current_name)) {
                throw ConfigError("duplicate section [" + current_name + "]", line_no);
            }
            current = &sections[current_name];
            current->line = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key = value", line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("empty key", line_no);
        }
        if (!current) {
            if (key == "unit") {
                if (value != "Hz") {
                    throw ConfigError("only 'unit = Hz' is supported", line_no, key);
                }
                continue;
            }
            throw ConfigError("key '" + key + "' outside any section", line_no, key);
        }
        if (current->keys.count(key)) {
            throw ConfigError("duplicate key '" + key + "'", line_no, key);
        }
        current->keys.emplace(key, Entry{parse_number(value, line_no, key), line_no});
    }

    SystemConfig c;
    std::map<std::size_t, const Section*> modes, couplings;
    for (const auto& [name, sec] : sections) {
        if (name == "cavity" || name == "drive") {
            continue;
        }
        if (name.rfind("mode.", 0) == 0) {
            modes[parse_index(std::string_view(name).substr(5), sec.line)] = &sec;
        } else if (name.rfind("coupling.", 0) == 0) {
            couplings[parse_index(std::string_view(name).substr(9), sec.line)] = &sec;
        } else {
            throw ConfigError("unknown section [" + name + "]", sec.line);
        }
    }
    const auto cav_it = sections.find("cavity");
    const auto drive_it = sections.find("drive");
    if (cav_it == sections.end()) {
        throw ConfigError("missing [cavity] section");
    }
    if (drive_it == sections.end()) {
        throw ConfigError("missing [drive] section");
    }

    Reader cav(cav_it->second, "cavity");
    c.cavity.kappa = hz(cav.require("kappa_hz").value);
    const auto [dc, deff] = cav.either("delta_c_hz", "delta_eff_hz", true);
    if (dc) {
        c.cavity.delta_c = hz(dc->value);
    }
    if (auto w = cav.get("wavelength_m")) {
        c.cavity.wavelength = w->value;
    }
    if (auto l = cav.get("cavity_length_m")) {
        c.cavity.cavity_length = l->value;
    }
    cav.reject_unknown();
    if (!c.cavity.wavelength) {
        throw ConfigError("[cavity] needs wavelength_m (sets the pump frequency)", cav_it->second.line,
                          "wavelength_m");
    }

    Reader drive(drive_it->second, "drive");
    c.drive.power_pump = drive.require("power_pump_w").value;
    c.drive.probe_ratio = drive.require("probe_ratio").value;
    drive.reject_unknown();

    std::size_t expected = 1;
    for (const auto& [index, sec] : modes) {
        if (index != expected++) {
            throw ConfigError("mode sections must be numbered 1..N without gaps", sec->line);
        }
        Reader r(*sec, "mode." + std::to_string(index));
        MechanicalMode m;
        m.omega = hz(r.require("omega_hz").value);
        const auto [gamma, q] = r.either("gamma_hz", "q_factor", true);
        if (gamma) {
            m.gamma = hz(gamma->value);
        } else {
            if (!(q->value > 0.0)) {
                throw ConfigError("q_factor must be positive", q->line, "q_factor");
            }
            m.gamma = m.omega / q->value;
        }
        const auto [g, mass] = r.either("g_hz", "mass_kg", true);
        if (g) {
            m.g = hz(g->value);
        } else {
            if (!c.cavity.cavity_length) {
                throw ConfigError("mass_kg needs cavity_length_m in [cavity]", mass->line, "mass_kg");
            }
            try {
                m.g = derive_single_photon_coupling(*c.cavity.wavelength, *c.cavity.cavity_length, mass->value,
                                                    m.omega);
            } catch (const InvalidParameter& e) {
                throw ConfigError(e.what(), mass->line, "mass_kg");
            }
        }
        r.reject_unknown();
        c.modes.push_back(m);
    }
    if (c.modes.empty()) {
        throw ConfigError("at least one [mode.K] section is required");
    }
    expected = 1;
    for (const auto& [index, sec] : couplings) {
        if (index != expected++) {
            throw ConfigError("coupling sections must be numbered 1..N-1 without gaps", sec->line);
        }
        Reader r(*sec, "coupling." + std::to_string(index));
        PhononCoupling p;
        p.eta = hz(r.require("eta_hz").value);
        const auto [rad, pis] = r.either("theta_rad", "theta_pi_units", false);
        p.theta = rad ? rad->value : pis ? pi_units(pis->value) : 0.0;
        r.reject_unknown();
        c.couplings.push_back(p);
    }
    if (c.couplings.size() + 1 != c.modes.size()) {
        throw ConfigError("need exactly N-1 [coupling.K] sections for N modes");
    }

    try {
        c.drive.omega_pump = optical_angular_frequency(*c.cavity.wavelength);
        c = canonicalized(c);
        validate(c);
        if (deff) {
            c.cavity.pinned_delta_eff = hz(deff->value);
            resolve_detuning(c);
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    return c;
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const SystemConfig& raw) {
    const SystemConfig c = canonicalized(raw);
    std::ostringstream out;
    out << "unit = Hz\n\n[cavity]\n";
    out << "kappa_hz = " << format_double(to_hz(c.cavity.kappa)) << "\n";
    if (c.cavity.pinned_delta_eff) {
        out << "delta_eff_hz = " << format_double(to_hz(*c.cavity.pinned_delta_eff)) << "\n";
    } else {
        out << "delta_c_hz = " << format_double(to_hz(c.cavity.delta_c)) << "\n";
    }
    if (c.cavity.wavelength) {
        out << "wavelength_m = " << format_double(*c.cavity.wavelength) << "\n";
    }
    if (c.cavity.cavity_length) {
        out << "cavity_length_m = " << format_double(*c.cavity.cavity_length) << "\n";
    }
    out << "\n[drive]\n";
    out << "power_pump_w = " << format_double(c.drive.power_pump) << "\n";
    out << "probe_ratio = " << format_double(c.drive.probe_ratio) << "\n";
    for (std::size_t k = 0; k < c.modes.size(); ++k) {
        const auto& m = c.modes[k];
        out << "\n[mode." << k + 1 << "]\n";
        out << "omega_hz = " << format_double(to_hz(m.omega)) << "\n";
        out << "gamma_hz = " << format_double(to_hz(m.gamma)) << "\n";
        out << "g_hz = " << format_double(to_hz(m.g)) << "\n";
    }
    for (std::size_t k = 0; k < c.couplings.size(); ++k) {
        const auto& p = c.couplings[k];
        out << "\n[coupling." << k + 1 << "]\n";
        out << "eta_hz = " << format_double(to_hz(p.eta)) << "\n";
        out << "theta_rad = " << format_double(p.theta) << "\n";
    }
    return out.str();
}

void set_parameter(SystemConfig& c, std::string_view path, double value) {
    auto fail = [&](const std::string& why) { throw ConfigError("parameter '" + std::string(path) + "': " + why); };
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    auto indices = [&](std::string_view idx, std::size_t count) {
        std::vector<std::size_t> out;
        if (idx == "*") {
            for (std::size_t i = 0; i < count; ++i) {
                out.push_back(i);
            }
            return out;
        }
        const std::size_t k = parse_index(idx, 0);
        if (k > count) {
            fail("index out of range");
        }
        out.push_back(k - 1);
        return out;
    };

    if (parts.size() == 2 && parts[0] == "cavity") {
        if (parts[1] == "kappa_hz") {
            c.cavity.kappa = hz(value);
        } else if (parts[1] == "delta_c_hz") {
            c.cavity.delta_c = hz(value);
            c.cavity.pinned_delta_eff.reset();
        } else if (parts[1] == "delta_eff_hz") {
            c.cavity.pinned_delta_eff = hz(value);
        } else {
            fail("unknown cavity key");
        }
    } else if (parts.size() == 2 && parts[0] == "drive") {
        if (parts[1] == "power_pump_w") {
            c.drive.power_pump = value;
        } else if (parts[1] == "probe_ratio") {
            c.drive.probe_ratio = value;
        } else {
            fail("unknown drive key");
        }
    } else if (parts.size() == 3 && parts[0] == "mode") {
        for (std::size_t k : indices(parts[1], c.modes.size())) {
            auto& m = c.modes[k];
            if (parts[2] == "omega_hz") {
                m.omega = hz(value);
            } else if (parts[2] == "gamma_hz") {
                m.gamma = hz(value);
            } else if (parts[2] == "q_factor") {
                m.gamma = m.omega / value;
            } else if (parts[2] == "g_hz") {
                m.g = hz(value);
            } else {
                fail("unknown mode key");
            }
        }
    } else if (parts.size() == 3 && parts[0] == "coupling") {
        for (std::size_t k : indices(parts[1], c.couplings.size())) {
            auto& p = c.couplings[k];
            if (parts[2] == "eta_hz") {
                p.eta = hz(value);
            } else if (parts[2] == "theta_rad") {
                p.theta = canonical_phase(value);
            } else if (parts[2] == "theta_pi_units") {
                p.theta = canonical_phase(pi_units(value));
            } else {
                fail("unknown coupling key");
            }
        }
    } else {
        fail("not a config key");
    }
    try {
        validate(c);
        resolve_detuning(c);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string(path) + ": " + e.what());
    }
}

} // namespace omit
