#include "dnstrip/report.hpp"

#include <cstdio>
#include <ostream>

namespace dnstrip {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string provenance_line(std::string_view config_text) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(config_text)));
    return std::string("# dnstrip ") + kVersion + " config=" + hex;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, std::string_view provenance) {
    out << provenance << '\n';
    out << "eps,j,lambda_strip,lambda_1d,remainder_thm2,scaled_thm1,disc_err,trusted\n";
    for (const auto& r : records) {
        for (std::size_t j = 0; j < r.lambda_strip.size(); ++j) {
            out << format_number(r.eps) << ',' << j + 1 << ',' << format_number(r.lambda_strip[j]) << ','
                << format_number(r.lambda_1d[j]) << ',' << format_number(r.remainder_thm2[j]) << ','
                << format_number(r.scaled_thm1[j]) << ',' << format_number(r.disc_err[j]) << ','
                << (r.trusted[j] ? "true" : "false") << '\n';
        }
    }
}

void write_gap_csv(std::ostream& out, const GapSweep& sweep, std::string_view provenance) {
    out << provenance << '\n' << "eps,k,gap,ratio\n";
    for (const auto& p : sweep.points)
        out << format_number(p.eps) << ',' << format_number(p.k) << ',' << format_number(p.gap) << ','
            << format_number(p.ratio) << '\n';
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, std::string_view provenance) {
    out << provenance << '\n' << "j,lambda,residual\n";
    for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j)
        out << j + 1 << ',' << format_number(spectrum.eigenvalues[j]) << ',' << format_number(spectrum.residuals[j])
            << '\n';
}

} // namespace dnstrip
