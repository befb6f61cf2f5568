#ifndef FLAGDECOMP_CLI_HPP
#define FLAGDECOMP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace flagdecomp::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 input or parse error, 2 domain violation, 3 numerical failure.
int run(int argc, const char* const* argv);

/// Same as above with the program name omitted from `args`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flagdecomp::cli

#endif
