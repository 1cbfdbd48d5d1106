#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "descon/admm.hpp"
#include "descon/netnewton.hpp"
#include "descon/trace.hpp"

namespace descon::sim {

// Thrown when a node update reads the payload of a node outside its closed
// neighborhood. Carries enough context to name the offender.
class LocalityViolation : public Error {
 public:
  LocalityViolation(int node, int round, int target);
  int node = 0, round = 0, target = 0;
};

class MessageLedger {
 public:
  struct RoundCount {
    long long vector_msgs = 0;
    long long signal_msgs = 0;
  };

  void begin_round() { rounds_.push_back({}); }
  void charge_vectors(long long count);
  void charge_signals(long long count);

  const std::vector<RoundCount>& rounds() const { return rounds_; }
  long long vector_total() const { return vector_total_; }
  long long signal_total() const { return signal_total_; }
  long long total() const { return vector_total_ + signal_total_; }

 private:
  std::vector<RoundCount> rounds_;
  long long vector_total_ = 0;
  long long signal_total_ = 0;
};

class RoundEngine;

// Read access to the payloads published in the current round, restricted to
// the closed neighborhood of one node.
class NeighborView {
 public:
  const Vec& operator()(int j) const;
  int node() const { return node_; }

 private:
  friend class RoundEngine;
  NeighborView(const RoundEngine* eng, int node) : eng_(eng), node_(node) {}
  const RoundEngine* eng_;
  int node_;
};

// Synchronous barrier-round message engine. An exchange collects one vector
// payload per node and charges one message per directed edge; a broadcast
// delivers scalar signals from the origin nodes to everyone and charges
// (n - 1) scalar messages per origin. Node updates within a round observe
// only the snapshot published at the barrier, so results are independent of
// the execution order (set_schedule exists to prove that in tests).
class RoundEngine {
 public:
  explicit RoundEngine(const Topology& top, MessageLedger* ledger = nullptr);

  using PublishFn = std::function<Vec(int)>;
  using ConsumeFn = std::function<void(int, const NeighborView&)>;
  using SignalFn = std::function<void(int, const std::vector<int>&)>;

  void exchange(const PublishFn& publish, const ConsumeFn& consume);
  void broadcast(const std::vector<int>& origins, const SignalFn& consume);

  void set_schedule(std::vector<int> order);
  int rounds() const { return round_; }
  const Topology& topology() const { return top_; }
  MessageLedger* ledger() const { return ledger_; }

 private:
  friend class NeighborView;
  const Topology& top_;
  MessageLedger* ledger_;
  std::vector<int> schedule_;
  std::vector<Vec> payloads_;
  int round_ = 0;
};

// A distributed algorithm driven by the engine. One iterate() call performs
// one algorithm iteration (possibly several engine rounds). Diagnostics
// (objective values, gradient norms) are centralized bookkeeping and do not
// touch the message accounting.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual std::string name() const = 0;
  virtual void iterate(RoundEngine& eng) = 0;
  virtual const Vec& stacked() const = 0;
  virtual double objective() const = 0;
  virtual double objective_gap_reference() const { return nan(); }
  virtual double grad_norm() const { return nan(); }
  virtual double alpha() const { return nan(); }
  virtual double wgn_prev() const { return nan(); }
  virtual double wgn_curr() const { return nan(); }

 protected:
  static double nan() { return std::numeric_limits<double>::quiet_NaN(); }
};

std::unique_ptr<Solver> make_dgd(const PenaltyObjective& P, double eps, Vec y0);
// Fixed-penalty second-order solver; adaptive schedule when cfg.adaptive.
std::unique_ptr<Solver> make_nn(const PenaltyObjective& P, const nn::Config& cfg, Vec y0);
std::unique_ptr<Solver> make_admm(const Topology& top, const IncidenceSet& inc,
                                  const std::vector<LocalObjective>& locals,
                                  const admm::Config& cfg, Vec x0);
// Deliberately misbehaving first-order solver that reads node (i+2) mod n;
// the locality probe's positive control.
std::unique_ptr<Solver> make_broken_reader(const PenaltyObjective& P, double eps, Vec y0);

struct StopRule {
  int max_iters = 100;
  std::optional<double> grad_tol;
  std::optional<double> rel_err_tol;
};

// Consensus reference for rel_err plus the optimal objective value for the
// gap column (penalty optimum for the gradient family, aggregate local
// optimum for the multiplier family).
struct RunReference {
  Vec x_ref;
  double F_star = std::numeric_limits<double>::quiet_NaN();
};

// Optional hook fired after every recorded iteration (including the initial
// state at t = 0); used for interleaved certification.
using IterCallback = std::function<void(int, const Solver&)>;

ConvergenceTrace run(Solver& solver, RoundEngine& eng, const StopRule& stop,
                     const RunReference* ref = nullptr, const IterCallback& on_iter = {});

struct ProbeResult {
  bool violated = false;
  int node = -1, round = -1, target = -1;
  std::string message;
};

// Runs a few iterations and reports whether the engine caught an illegal
// read. Compliant solvers come back clean.
ProbeResult locality_probe(Solver& solver, RoundEngine& eng, int iters = 3);

}  // namespace descon::sim
