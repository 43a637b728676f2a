#pragma once

#include <string>

namespace gfk::log {

// Verbosity comes from GFK_LOG (trace|debug|info|warn|error|off); default warn.
void init_from_env();

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);
void error(const std::string& msg);

}  // namespace gfk::log
