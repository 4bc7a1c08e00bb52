#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semivalue {

// Exit codes: 0 success, 2 usage error, 3 precondition violation,
// 4 I/O error.  args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace semivalue
