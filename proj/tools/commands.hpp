#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlrec::cli {

// Runs one `mlrec` invocation. `args` excludes the program name. Returns the
// process exit code: 0 success, 1 internal error, 2 config or input error,
// 3 unknown entity.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace mlrec::cli
