#pragma once

#include <string_view>

namespace mlrec {

// Library diagnostics go to stderr so they never mix with command output.
// Levels: trace, debug, info, warn, error, off.
void set_log_level(std::string_view level);
void log_warning(std::string_view message);

}  // namespace mlrec
