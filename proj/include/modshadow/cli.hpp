#pragma once

#include <string>
#include <vector>

namespace modshadow {

// Batch front door. Exit codes: 0 success, 1 usage/config error,
// 2 verification failure.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace modshadow
