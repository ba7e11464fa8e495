#pragma once

#include "dnstrip/analysis.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dnstrip {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// "# dnstrip <version> config=<16 hex digits>"
std::string provenance_line(std::string_view config_text);

/// Fixed "%.12g" formatting so equal values print identically.
std::string format_number(double v);

/// eps,j,lambda_strip,lambda_1d,remainder_thm2,scaled_thm1,disc_err,trusted
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, std::string_view provenance);

/// eps,k,gap,ratio
void write_gap_csv(std::ostream& out, const GapSweep& sweep, std::string_view provenance);

/// j,lambda,residual
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, std::string_view provenance);

} // namespace dnstrip
