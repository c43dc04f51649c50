#ifndef QND_CLI_HPP
#define QND_CLI_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qnd {

enum ExitCode { kExitOk = 0, kExitInvalidConfig = 1, kExitNoConvergence = 2 };

// key=value lines, '#' starts a comment, blank lines ignored.
// Throws InvalidArgument on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream &in);

// 12 significant digits, '.' decimal point.
std::string format_number(double v);

// Subcommands: transmittance, metrics, sweep, shape, oracle-check.
// Data goes to --output (relative to $QND_OUTPUT_DIR when set) or `out`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace qnd

#endif // QND_CLI_HPP
