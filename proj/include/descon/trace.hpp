#pragma once

#include <string>
#include <vector>

#include "descon/common.hpp"

namespace descon {

// One row per iteration, row 0 describing the initial state. Fields that do
// not apply to a solver family are NaN and serialize as "nan".
struct IterationRecord {
  int t = 0;
  double alpha = 0.0;
  double F = 0.0;
  double F_gap = 0.0;
  double grad_norm = 0.0;
  double wgn_prev = 0.0;  // ||D_{t-1}^{-1/2} g_t||, previous iterate's blocks
  double wgn_curr = 0.0;  // ||D_t^{-1/2} g_t||, current iterate's blocks
  double rel_err = 0.0;
  long long msgs_cum = 0;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;

  int iterations() const { return static_cast<int>(records.size()) - 1; }
  std::vector<double> gap_series() const;
  std::vector<double> wgn_prev_series() const;
  std::vector<double> rel_err_series() const;

  // Pinned schema: t,alpha,F,F_gap,grad_norm,weighted_grad_norm_prev_D,
  // rel_err,msgs_cum. Deterministic %.17g formatting, LF line endings.
  std::string to_csv() const;
};

std::string format_double(double v);

}  // namespace descon
