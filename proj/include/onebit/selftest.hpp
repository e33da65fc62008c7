#ifndef ONEBIT_SELFTEST_HPP
#define ONEBIT_SELFTEST_HPP

#include <ostream>

namespace onebit {

/// Runs the built-in example checks, printing one PASS/FAIL line each.
/// Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace onebit

#endif  // ONEBIT_SELFTEST_HPP
