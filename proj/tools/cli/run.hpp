#pragma once

#include <string>
#include <vector>

namespace gaplabel::cli {

/// Exit codes: 0 success, 1 computation failure, 2 usage or schema error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace gaplabel::cli
