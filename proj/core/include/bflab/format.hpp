#pragma once

#include <string>

namespace bflab {

/// Shortest decimal string that round-trips to the same double; "nan",
/// "inf" and "-inf" for non-finite values.
std::string format_double(double v);

}  // namespace bflab
