#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "adam3/diagnostics.hpp"

namespace adam3::cli {

/// Shortest-of-17-significant-digits decimal rendering; round-trips any
/// finite double.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Writes the trace as `k,e_k,grad_norm_sq,R_k` rows with LF line endings.
/// e_k is `nan` for games without a known equilibrium.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "k,e_k,grad_norm_sq,R_k\n";
  for (const TraceRecord& rec : trace) {
    os << rec.k << ',' << format_g17(rec.e_k ? *rec.e_k : std::nan("")) << ','
       << format_g17(rec.grad_norm_sq) << ',' << format_g17(rec.r_k) << '\n';
  }
}

struct SweepRow {
  std::size_t batch_m = 0;
  std::uint64_t seed = 0;
  double terminal_r = 0.0;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "m,seed,terminal_R\n";
  for (const SweepRow& row : rows) {
    os << row.batch_m << ',' << row.seed << ',' << format_g17(row.terminal_r) << '\n';
  }
}

struct SweepFloor {
  std::size_t batch_m = 0;
  double median_terminal_r = 0.0;
};

inline void write_floors_csv(std::ostream& os, const std::vector<SweepFloor>& floors) {
  os << "m,median_terminal_R\n";
  for (const SweepFloor& f : floors) {
    os << f.batch_m << ',' << format_g17(f.median_terminal_r) << '\n';
  }
}

}  // namespace adam3::cli
