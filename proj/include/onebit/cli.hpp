#ifndef ONEBIT_CLI_HPP
#define ONEBIT_CLI_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Full help text: every subcommand and flag.
std::string_view help_text();

/// Entry point of the `onebit` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on validation errors (bad flags, unreadable
/// config, invalid values) and 2 on runtime failures.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace onebit

#endif  // ONEBIT_CLI_HPP
