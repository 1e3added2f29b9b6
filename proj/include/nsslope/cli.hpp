#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsslope::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 runtime or data error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace nsslope::cli
