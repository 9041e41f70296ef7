#pragma once

#include <string>

#include <fmt/format.h>

namespace cnls {

/// 17 significant digits: enough to read back the same double.
inline std::string fmt_double(double v) { return fmt::format("{}", v); }

}  // namespace cnls
