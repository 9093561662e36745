#pragma once

#include <iosfwd>

namespace rmflab {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // selftest criterion failed
inline constexpr int kExitParameter = 2;
inline constexpr int kExitResource = 3;

/*!
 * Entry point of the `rmflab` tool.
 *
 * Records go to --out (plus a manifest next to it) or to `out` when no path
 * is given. Diagnostics go to `err`, one line each, prefixed
 * "rmflab: error[parameter]:", "rmflab: error[resource]:" or
 * "rmflab: warning:".
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rmflab
