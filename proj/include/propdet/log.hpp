#pragma once

#include <string_view>

namespace propdet::log {

/// Warnings go to stderr unless silenced (tests silence them).
void warn(std::string_view message);
void info(std::string_view message);
void set_quiet(bool quiet);

}  // namespace propdet::log
