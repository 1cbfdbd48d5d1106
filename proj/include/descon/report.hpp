#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "descon/admm.hpp"
#include "descon/config.hpp"
#include "descon/spectral.hpp"
#include "descon/trace.hpp"

namespace descon::report {

using nlohmann::json;

// NaN and infinities serialize as null; the schema allows number-or-null
// wherever a field can be undefined for a solver family.
json number_or_null(double v);

json topology_json(const cfg::TopologyConfig& tc, const Topology& top,
                   const WeightBounds* wb);
json objective_json(const cfg::ObjectiveConfig& oc, const CurvatureConstants& cc);
json solver_json(const cfg::SolverConfig& sc);
json trace_summary_json(const ConvergenceTrace& trace);
json splitting_json(const spectral::SplittingReport& rep, int t);
json rate_json(const spectral::RateConstants& rc, double guaranteed_eps, double rho_pow);
json envelope_json(const spectral::EnvelopeCheck& ec);
json recursion_json(const spectral::RecursionReport& rr);
json energy_json(const std::vector<admm::EnergyStep>& steps);

// Serializes with sorted keys, two-space indent, trailing newline; byte
// stable across reruns of the same config.
std::string dump_report(const json& j);

void write_file(const std::string& path, const std::string& contents);

}  // namespace descon::report
