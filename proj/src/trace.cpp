#include "descon/trace.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace descon {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> ConvergenceTrace::gap_series() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.F_gap);
  return out;
}

std::vector<double> ConvergenceTrace::wgn_prev_series() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.wgn_prev);
  return out;
}

std::vector<double> ConvergenceTrace::rel_err_series() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.rel_err);
  return out;
}

std::string ConvergenceTrace::to_csv() const {
  std::ostringstream out;
  out << "t,alpha,F,F_gap,grad_norm,weighted_grad_norm_prev_D,rel_err,msgs_cum\n";
  for (const auto& r : records) {
    out << r.t << ',' << format_double(r.alpha) << ',' << format_double(r.F) << ','
        << format_double(r.F_gap) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.wgn_prev) << ',' << format_double(r.rel_err) << ',' << r.msgs_cum
        << '\n';
  }
  return out.str();
}

}  // namespace descon
