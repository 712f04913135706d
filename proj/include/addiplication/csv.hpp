#pragma once

#include <string>

namespace addi {

/// Shortest form with 17 significant digits; "inf", "-inf" for infinities.
std::string format_double(double v);

}  // namespace addi
