#include "descon/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace descon::sim {

namespace {

std::string violation_message(int node, int round, int target) {
  std::ostringstream out;
  out << "locality violation: node " << node << " read node " << target << " in round "
      << round;
  return out.str();
}

}  // namespace

LocalityViolation::LocalityViolation(int node, int round, int target)
    : Error(violation_message(node, round, target)), node(node), round(round), target(target) {}

void MessageLedger::charge_vectors(long long count) {
  require(!rounds_.empty(), "ledger: charge outside a round");
  rounds_.back().vector_msgs += count;
  vector_total_ += count;
}

void MessageLedger::charge_signals(long long count) {
  require(!rounds_.empty(), "ledger: charge outside a round");
  rounds_.back().signal_msgs += count;
  signal_total_ += count;
}

const Vec& NeighborView::operator()(int j) const {
  const Topology& top = eng_->top_;
  require(j >= 0 && j < top.n, "payload read out of range");
  if (j != node_ && !top.adjacent(node_, j))
    throw LocalityViolation(node_, eng_->round_, j);
  return eng_->payloads_[j];
}

RoundEngine::RoundEngine(const Topology& top, MessageLedger* ledger)
    : top_(top), ledger_(ledger) {
  schedule_.resize(top.n);
  for (int i = 0; i < top.n; ++i) schedule_[i] = i;
}

void RoundEngine::set_schedule(std::vector<int> order) {
  require(static_cast<int>(order.size()) == top_.n, "schedule must cover every node");
  std::vector<char> seen(top_.n, 0);
  for (int i : order) {
    require(i >= 0 && i < top_.n && !seen[i], "schedule must be a permutation");
    seen[i] = 1;
  }
  schedule_ = std::move(order);
}

void RoundEngine::exchange(const PublishFn& publish, const ConsumeFn& consume) {
  payloads_.resize(top_.n);
  for (int i : schedule_) payloads_[i] = publish(i);
  ++round_;
  if (ledger_) {
    ledger_->begin_round();
    ledger_->charge_vectors(top_.num_directed_edges());
  }
  for (int i : schedule_) consume(i, NeighborView(this, i));
}

void RoundEngine::broadcast(const std::vector<int>& origins, const SignalFn& consume) {
  ++round_;
  if (ledger_) {
    ledger_->begin_round();
    ledger_->charge_signals(static_cast<long long>(origins.size()) * (top_.n - 1));
  }
  for (int i : schedule_) consume(i, origins);
}

namespace {

// |v|_{D^{-1}} accumulated from per-node solves of the diagonal blocks.
double weighted_norm(const std::vector<Eigen::LLT<Mat>>& factors, const Vec& v, int p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Vec vi = v.segment(static_cast<Eigen::Index>(i) * p, p);
    acc += vi.dot(factors[i].solve(vi));
  }
  return std::sqrt(acc);
}

std::vector<Eigen::LLT<Mat>> diagonal_factors(const PenaltyObjective& P, const Vec& y) {
  std::vector<Eigen::LLT<Mat>> factors;
  factors.reserve(P.n());
  for (int i = 0; i < P.n(); ++i) {
    factors.emplace_back(nn::dii_matrix(P, i, P.block(y, i)));
    require(factors.back().info() == Eigen::Success,
            "splitting diagonal block is not positive definite");
  }
  return factors;
}

class GradientFamilySolver : public Solver {
 public:
  GradientFamilySolver(const PenaltyObjective& P, Vec y0) : P_(P), y_(std::move(y0)) {
    require(y_.size() == P_.np(), "iterate dimension mismatch");
    g_ = P_.gradient(y_);
    factors_ = diagonal_factors(P_, y_);
    wgn_prev_ = wgn_curr_ = weighted_norm(factors_, g_, P_.p);
  }

  const Vec& stacked() const override { return y_; }
  double objective() const override { return P_.value(y_); }
  double grad_norm() const override { return g_.norm(); }
  double alpha() const override { return P_.alpha; }
  double wgn_prev() const override { return wgn_prev_; }
  double wgn_curr() const override { return wgn_curr_; }

 protected:
  // Central bookkeeping after the local updates: refresh the gradient and
  // both weighted norms. prev_factors are the blocks the step was computed
  // with.
  void refresh_diagnostics(const std::vector<Eigen::LLT<Mat>>& prev_factors) {
    g_ = P_.gradient(y_);
    wgn_prev_ = weighted_norm(prev_factors, g_, P_.p);
    factors_ = diagonal_factors(P_, y_);
    wgn_curr_ = weighted_norm(factors_, g_, P_.p);
  }

  PenaltyObjective P_;
  Vec y_, g_;
  std::vector<Eigen::LLT<Mat>> factors_;
  double wgn_prev_ = 0.0, wgn_curr_ = 0.0;
};

class DgdSolver : public GradientFamilySolver {
 public:
  DgdSolver(const PenaltyObjective& P, double eps, Vec y0)
      : GradientFamilySolver(P, std::move(y0)), eps_(eps) {}

  std::string name() const override { return "dgd"; }

  void iterate(RoundEngine& eng) override {
    const int p = P_.p;
    Vec y_next(P_.np());
    eng.exchange([&](int i) { return Vec(y_.segment(i * p, p)); },
                 [&](int i, const NeighborView& view) {
                   const Vec g_i = nn::gradient_node(P_, i, view);
                   y_next.segment(i * p, p) = view(i) - eps_ * g_i;
                 });
    const auto prev = std::move(factors_);
    y_ = std::move(y_next);
    refresh_diagnostics(prev);
  }

 private:
  double eps_;
};

class NnSolver : public GradientFamilySolver {
 public:
  NnSolver(const PenaltyObjective& P, const nn::Config& cfg, Vec y0)
      : GradientFamilySolver(P, std::move(y0)), cfg_(cfg), board_(P.n()) {
    nn::validate(cfg_);
    tol_ = cfg_.tol >= 0.0 ? cfg_.tol : 1e-3 * g_.norm();
  }

  std::string name() const override { return cfg_.adaptive ? "ann" : "nn"; }
  double signal_tol() const { return tol_; }

  void iterate(RoundEngine& eng) override {
    const int p = P_.p;
    const int n = P_.n();
    std::vector<Eigen::LLT<Mat>> solvers(n);
    Vec g(P_.np()), d(P_.np());
    std::vector<Vec> consensus_part(n);

    eng.exchange(
        [&](int i) { return Vec(y_.segment(i * p, p)); },
        [&](int i, const NeighborView& view) {
          const Vec own = view(i);
          consensus_part[i] = own - nn::neighbor_mix(P_, i, P_.weights.W(i, i), view);
          g.segment(i * p, p) = consensus_part[i] + P_.alpha * P_.locals[i].gradient(own);
          solvers[i] = Eigen::LLT<Mat>(nn::dii_matrix(P_, i, own));
          require(solvers[i].info() == Eigen::Success,
                  "splitting diagonal block is not positive definite");
        });

    if (cfg_.adaptive) {
      std::vector<int> origins;
      for (int i = 0; i < n; ++i)
        if (board_.bits(i, i) == 0 && g.segment(i * p, p).norm() <= tol_)
          origins.push_back(i);
      if (!origins.empty()) {
        eng.broadcast(origins, [&](int i, const std::vector<int>& from) {
          for (int o : from) board_.bits(i, o) = 1;
        });
        // Every board row is identical, so completion is observed by all
        // nodes at the same barrier: they divide alpha together and each
        // refreshes its gradient and diagonal block from state already in
        // hand (the consensus part does not depend on alpha).
        bool complete = true;
        for (int i = 0; i < n && complete; ++i) complete = board_.row_complete(i);
        if (complete && P_.alpha > cfg_.alpha_floor) {
          P_.alpha = std::max(P_.alpha / cfg_.alpha_divisor, cfg_.alpha_floor);
          board_.bits.setZero();
          for (int v = 0; v < n; ++v) {
            const Vec own = y_.segment(v * p, p);
            g.segment(v * p, p) =
                consensus_part[v] + P_.alpha * P_.locals[v].gradient(own);
            solvers[v] = Eigen::LLT<Mat>(nn::dii_matrix(P_, v, own));
          }
        }
      }
    }

    for (int i = 0; i < n; ++i)
      d.segment(i * p, p) = -solvers[i].solve(g.segment(i * p, p));
    for (int k = 0; k < cfg_.K; ++k) {
      Vec d_next(P_.np());
      eng.exchange([&](int i) { return Vec(d.segment(i * p, p)); },
                   [&](int i, const NeighborView& view) {
                     const Vec mixed =
                         nn::neighbor_mix(P_, i, 1.0 - P_.weights.W(i, i), view);
                     d_next.segment(i * p, p) =
                         solvers[i].solve(mixed - g.segment(i * p, p));
                   });
      d = std::move(d_next);
    }

    y_ += cfg_.eps * d;
    refresh_diagnostics(solvers);
  }

 private:
  nn::Config cfg_;
  nn::SignalBoard board_;
  double tol_ = 0.0;
};

class AdmmSolver : public Solver {
 public:
  AdmmSolver(const Topology& top, const IncidenceSet& inc,
             const std::vector<LocalObjective>& locals, const admm::Config& cfg, Vec x0)
      : top_(top), inc_(inc), locals_(locals), cfg_(cfg) {
    admm::validate(cfg_);
    state_ = admm::make_state(inc_, x0);
  }

  std::string name() const override {
    switch (cfg_.variant) {
      case admm::Variant::kDadmm: return "dadmm";
      case admm::Variant::kDlm: return "dlm";
      case admm::Variant::kDqm: return "dqm";
    }
    return "admm";
  }

  const Vec& stacked() const override { return state_.x; }

  double objective() const override {
    double v = 0.0;
    const int p = inc_.p;
    for (int i = 0; i < top_.n; ++i) v += locals_[i].value(state_.x.segment(i * p, p));
    return v;
  }

  const admm::State& state() const { return state_; }

  void iterate(RoundEngine& eng) override {
    const int p = inc_.p;
    Vec x_next(state_.x.size());
    eng.exchange(
        [&](int i) { return Vec(state_.x.segment(i * p, p)); },
        [&](int i, const NeighborView& view) {
          Vec nb = Vec::Zero(p);
          for (int j : top_.neighbors[i]) nb += view(j);
          const Vec x_i = view(i);
          const Vec phi_i = state_.phi.segment(i * p, p);
          switch (cfg_.variant) {
            case admm::Variant::kDqm:
              x_next.segment(i * p, p) =
                  admm::x_update_dqm(locals_[i], cfg_.c, top_.degree(i), x_i, nb, phi_i);
              break;
            case admm::Variant::kDlm:
              x_next.segment(i * p, p) = admm::x_update_dlm(
                  locals_[i], cfg_.c, cfg_.rho_lin, top_.degree(i), x_i, nb, phi_i);
              break;
            case admm::Variant::kDadmm:
              x_next.segment(i * p, p) = admm::x_update_dadmm(
                  locals_[i], cfg_.c, top_.degree(i), x_i, nb, phi_i, cfg_.inner_tol);
              break;
          }
        });
    eng.exchange(
        [&](int i) { return Vec(x_next.segment(i * p, p)); },
        [&](int i, const NeighborView& view) {
          Vec nb = Vec::Zero(p);
          for (int j : top_.neighbors[i]) nb += view(j);
          state_.phi.segment(i * p, p) += cfg_.c * (top_.degree(i) * view(i) - nb);
        });
    state_.x = std::move(x_next);
    state_.alpha += 0.5 * cfg_.c * inc_.E_o * state_.x;
    state_.z = 0.5 * inc_.E_u * state_.x;
    ++state_.k;
  }

 private:
  Topology top_;
  IncidenceSet inc_;
  std::vector<LocalObjective> locals_;
  admm::Config cfg_;
  admm::State state_;
};

class BrokenReaderSolver : public GradientFamilySolver {
 public:
  BrokenReaderSolver(const PenaltyObjective& P, double eps, Vec y0)
      : GradientFamilySolver(P, std::move(y0)), eps_(eps) {}

  std::string name() const override { return "broken-reader"; }

  void iterate(RoundEngine& eng) override {
    const int p = P_.p;
    const int n = P_.n();
    Vec y_next(P_.np());
    eng.exchange([&](int i) { return Vec(y_.segment(i * p, p)); },
                 [&](int i, const NeighborView& view) {
                   const Vec g_i = nn::gradient_node(P_, i, view);
                   // Illegal peek two hops around the ring.
                   const Vec& peek = view((i + 2) % n);
                   y_next.segment(i * p, p) = view(i) - eps_ * g_i + 0.0 * peek;
                 });
    const auto prev = std::move(factors_);
    y_ = std::move(y_next);
    refresh_diagnostics(prev);
  }

 private:
  double eps_;
};

}  // namespace

std::unique_ptr<Solver> make_dgd(const PenaltyObjective& P, double eps, Vec y0) {
  return std::make_unique<DgdSolver>(P, eps, std::move(y0));
}

std::unique_ptr<Solver> make_nn(const PenaltyObjective& P, const nn::Config& cfg, Vec y0) {
  return std::make_unique<NnSolver>(P, cfg, std::move(y0));
}

std::unique_ptr<Solver> make_admm(const Topology& top, const IncidenceSet& inc,
                                  const std::vector<LocalObjective>& locals,
                                  const admm::Config& cfg, Vec x0) {
  return std::make_unique<AdmmSolver>(top, inc, locals, cfg, std::move(x0));
}

std::unique_ptr<Solver> make_broken_reader(const PenaltyObjective& P, double eps, Vec y0) {
  return std::make_unique<BrokenReaderSolver>(P, eps, std::move(y0));
}

ConvergenceTrace run(Solver& solver, RoundEngine& eng, const StopRule& stop,
                     const RunReference* ref, const IterCallback& on_iter) {
  require(stop.max_iters >= 1, "stop rule: max_iters must be at least 1");
  if (stop.grad_tol) require(*stop.grad_tol >= 0.0, "stop rule: grad_tol must be nonnegative");
  if (stop.rel_err_tol)
    require(*stop.rel_err_tol >= 0.0, "stop rule: rel_err_tol must be nonnegative");

  double denom = 0.0;
  if (ref) denom = (solver.stacked() - ref->x_ref).norm();

  const auto record = [&](int t) {
    IterationRecord r;
    r.t = t;
    r.alpha = solver.alpha();
    r.F = solver.objective();
    r.F_gap = ref ? r.F - ref->F_star : std::numeric_limits<double>::quiet_NaN();
    r.grad_norm = solver.grad_norm();
    r.wgn_prev = solver.wgn_prev();
    r.wgn_curr = solver.wgn_curr();
    if (ref) {
      const double num = (solver.stacked() - ref->x_ref).norm();
      r.rel_err = denom > 0.0 ? num / denom : num;
    } else {
      r.rel_err = std::numeric_limits<double>::quiet_NaN();
    }
    r.msgs_cum = eng.ledger() ? eng.ledger()->total() : 0;
    return r;
  };

  ConvergenceTrace trace;
  trace.records.push_back(record(0));
  if (on_iter) on_iter(0, solver);
  for (int t = 1; t <= stop.max_iters; ++t) {
    solver.iterate(eng);
    trace.records.push_back(record(t));
    if (on_iter) on_iter(t, solver);
    const auto& r = trace.records.back();
    if (stop.grad_tol && !std::isnan(r.grad_norm) && r.grad_norm <= *stop.grad_tol) break;
    if (stop.rel_err_tol && !std::isnan(r.rel_err) && r.rel_err <= *stop.rel_err_tol) break;
  }
  return trace;
}

ProbeResult locality_probe(Solver& solver, RoundEngine& eng, int iters) {
  ProbeResult res;
  try {
    for (int t = 0; t < iters; ++t) solver.iterate(eng);
  } catch (const LocalityViolation& v) {
    res.violated = true;
    res.node = v.node;
    res.round = v.round;
    res.target = v.target;
    res.message = v.what();
  }
  return res;
}

}  // namespace descon::sim
