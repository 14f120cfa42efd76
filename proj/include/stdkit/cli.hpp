#pragma once

#include <string>
#include <vector>

namespace stdkit {

// Parses and runs one CLI invocation; `args` excludes the program name.
// Exit codes: 0 success, 64 usage, 65 bad data or format, 66 missing input,
// 70 operation failure, 2 partial benchmark failures, 1 unexpected error.
int dispatch(std::vector<std::string> args);

}  // namespace stdkit
