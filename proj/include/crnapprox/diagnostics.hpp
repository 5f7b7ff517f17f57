#pragma once

#include <functional>
#include <string_view>

namespace crn {

/// Receives advisory warnings from the simulators.  The default handler
/// writes "warning: <message>" to stderr.  Set once at startup.
using WarningHandler = std::function<void(std::string_view)>;

void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace crn
