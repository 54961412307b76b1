#pragma once

#include <spdlog/spdlog.h>

namespace mlrec::detail {

spdlog::logger& logger();

}  // namespace mlrec::detail
