#pragma once

#include <string>

namespace tampersim {

/// Formats a double with 12 significant digits, the pinned precision for CSV
/// report rows.
std::string format_double(double v);

}  // namespace tampersim
