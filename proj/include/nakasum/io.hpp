#pragma once

#include <iosfwd>
#include <string>

#include "nakasum/egc.hpp"
#include "nakasum/linalg.hpp"

namespace nakasum {

// Text format: first line L, then L rows of L whitespace-separated sqrt(rho)
// entries. Everything after '#' on a line is ignored.
CorrelationMatrix parse_correlation_matrix(std::istream& is);
CorrelationMatrix read_correlation_file(const std::string& path);
void write_correlation_matrix(std::ostream& os, const CorrelationMatrix& m);
void write_correlation_file(const std::string& path, const CorrelationMatrix& m);

// Curve CSV with header `snr_db,value,kind,meta`.
void write_curve_csv(std::ostream& os, const PerfCurve& curve, const std::string& kind,
                     const std::string& meta);
std::string curve_to_json(const PerfCurve& curve, const std::string& kind,
                          const std::string& meta);

}  // namespace nakasum
