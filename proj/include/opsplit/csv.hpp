/* CSV export with round-trip-safe floating point formatting. */
#pragma once

#include <iosfwd>
#include <string>

#include "opsplit/splitting.hpp"

namespace opsplit {

/// Shortest-of-17-significant-digits rendering ("%.17g"); guarantees exact
/// round trips through text.
std::string format_double(double v);

/// Columns: k, residual, shadow_error.  The shadow_error column is left
/// empty when the solve ran without a reference.  Header row mandatory.
void write_trace_csv(std::ostream& os, const Trace& trace);
void write_trace_csv_file(const std::string& path, const Trace& trace);

} // namespace opsplit
