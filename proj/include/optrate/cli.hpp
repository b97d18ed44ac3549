#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optrate {

// Exit codes: 0 success, 1 usage or config error, 2 failed check in verify-all.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optrate
