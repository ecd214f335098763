#include "omit/output.hpp"

#include "omit/config_io.hpp"
#include "omit/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace omit {

std::string spectrum_csv(const Spectrum& spectrum) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::string out(kSpectrumHeader);
    out += '\n';
    for (const auto& p : spectrum.points) {
        out += format_double(p.omega / spectrum.omega_ref);
        out += ',';
        out += format_double(p.transmission);
        out += ',';
        out += format_double(p.efficiency ? 100.0 * *p.efficiency : nan);
        out += ',';
        out += format_double(p.phase);
        out += ',';
        out += format_double(p.group_delay.value_or(nan));
        out += ',';
        out += format_double(p.route_discrepancy.value_or(nan));
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return s;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

} // namespace omit
