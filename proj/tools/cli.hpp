#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowagent::cli {

// Exit codes: 0 success, 1 diagnostics or metric-threshold failure, 2 usage error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace flowagent::cli
