#pragma once

#include <iosfwd>

namespace hinf::cli {

/// Subcommands: norm, approx, bench, gain-curve. Exit status 0 on success,
/// 2 for usage, parse and shape errors, 3 for numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hinf::cli
