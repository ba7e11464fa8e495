#pragma once

#include <iosfwd>

namespace dnstrip::cli {

/// Entry point of the command-line tool. Returns 0 on success, 2 on a
/// configuration error and 1 on a numerical failure; diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dnstrip::cli
