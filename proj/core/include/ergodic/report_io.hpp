#pragma once

#include <iosfwd>
#include <string>

#include "ergodic/model.hpp"

namespace ergodic {

/// 17 significant digits: lossless for IEEE doubles.
std::string format_csv(double x);

/// CSV header `stamp,beta_estimate,span,sup_change,hjb_residual`, one row per record.
void write_trace_csv(std::ostream& os, const SolveReport& report);

}  // namespace ergodic
