#include "opsplit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace opsplit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
    if (!trace.recorded)
        throw std::invalid_argument("write_trace_csv: trace was not recorded");
    os << "k,residual,shadow_error\n";
    const bool has_shadow = !trace.shadow_error.empty();
    for (std::size_t k = 0; k < trace.residual.size(); ++k) {
        os << k << ',' << format_double(trace.residual[k]) << ',';
        if (has_shadow) os << format_double(trace.shadow_error[k]);
        os << '\n';
    }
}

void write_trace_csv_file(const std::string& path, const Trace& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trace_csv_file: cannot open " + path);
    write_trace_csv(os, trace);
}

} // namespace opsplit
