#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dwmf::cli {

inline constexpr int kSuccess = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

/// Runs one `dwmf` invocation; `args` excludes the program name.
/// Returns kSuccess, kUsageError (bad flags or values) or kDataError
/// (unreadable, inconsistent or disconnected inputs).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dwmf::cli
