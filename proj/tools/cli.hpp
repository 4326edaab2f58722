#pragma once

#include <iosfwd>

namespace owfsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Entry point of the `owfsim` tool:
///   run <preset|config.json>... [--out dir] [--dt s] [--ts s] [--t-end s] [--decimation n] [--jobs n]
///   list-presets
///   show-preset <name>
///   metrics <record.csv>
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace owfsim::cli
