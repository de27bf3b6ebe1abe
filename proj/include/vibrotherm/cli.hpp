#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vibrotherm::cli {

// Exit codes: 0 success, 1 domain/numeric error, 2 usage or config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace vibrotherm::cli
