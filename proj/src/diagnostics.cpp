#include "crnapprox/diagnostics.hpp"

#include <iostream>

namespace crn {

namespace {
WarningHandler& handler() {
  static WarningHandler h = [](std::string_view m) { std::cerr << "warning: " << m << "\n"; };
  return h;
}
}  // namespace

void set_warning_handler(WarningHandler h) { handler() = std::move(h); }

void warn(std::string_view message) {
  if (handler()) handler()(message);
}

}  // namespace crn
