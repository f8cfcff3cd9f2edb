#include "ergodic/report_io.hpp"

#include <cstdio>
#include <ostream>

namespace ergodic {

std::string format_csv(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
  os << "stamp,beta_estimate,span,sup_change,hjb_residual\n";
  for (const auto& r : report.records) {
    os << format_csv(r.stamp) << ',' << format_csv(r.beta_estimate) << ',' << format_csv(r.span) << ','
       << format_csv(r.sup_change) << ',' << format_csv(r.hjb_residual) << '\n';
  }
}

}  // namespace ergodic
