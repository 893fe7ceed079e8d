#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gamelab {

// Full command-line surface, driven in-process so tests can exercise it.
// args excludes the program name. Exit codes: 0 success, 1 validation
// findings, 2 fatal error, 3 campaign completed with agent failures.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gamelab
