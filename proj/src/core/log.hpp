#pragma once

#include <string_view>

namespace mcr::log {

enum class Level { quiet = 0, warn = 1, info = 2 };

void set_level(Level level);
Level level();

void warn(std::string_view message);
void info(std::string_view message);

} // namespace mcr::log
