#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace emodec::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation (`args[0]` is the program name). Diagnostics go to `err`,
/// reports to `out`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Set by the signal handler in main(); polled by `stream`.
std::atomic<bool>& interrupt_flag();

}  // namespace emodec::cli
