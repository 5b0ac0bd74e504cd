// cli.hpp - Entry point of the ncdelay command-line tool.
//
// Exit codes: 0 success, 1 usage/config/parse error, 2 math precondition
// (instability, infeasible source, failed estimation, ...), 3 I/O error.
// Failures print one line "error: <category>: <message>" to `err`.

#ifndef NCDELAY_CLI_HPP
#define NCDELAY_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ncdelay {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMath = 2;
inline constexpr int kExitIo = 3;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ncdelay

#endif
