#pragma once

#include <string>

namespace hivemon {

/// Fixed-point rendering with up to `decimals` fractional digits, trailing
/// zeros trimmed, C locale. Shared by the CSV exporter, the SVG renderer
/// and the CLI summary so their output is byte-stable.
std::string format_fixed(double value, int decimals = 6);

}  // namespace hivemon
