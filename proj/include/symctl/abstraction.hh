/*
 * abstraction.hh
 *
 * Finite transition systems and the delay-free symbolic model built on a
 * logarithmic (optionally zoom-refined) partition.
 */

#ifndef SYMCTL_ABSTRACTION_HH_
#define SYMCTL_ABSTRACTION_HH_

#include <functional>
#include <span>
#include <vector>

#include "symctl/dynamics.hh"
#include "symctl/partition.hh"

namespace symctl {

/*
 * input alphabet: uniform lattice {k*mu} inside U per coordinate, or the
 * logarithmic lattice of the given quantizer restricted to U
 */
struct InputQuantization {
  enum class Kind { Uniform, Logarithmic };
  Kind kind = Kind::Uniform;
  double mu = 0.2;
  LogQuantizerParams log;
};

std::vector<Vec> input_lattice(const Box& U, const InputQuantization& iq);

/* theta1 * e^(L tau) * (|q| + E_q), theta1 = eta/(1-eta) */
Vec growth_bound_delayfree(std::span<const double> q, double eta, double L, double tau);

/*
 * class: TransitionSystem
 *
 * states are either partition cells or spline tubes (lists of cell ids);
 * successors are stored densely per (state, input) and sorted.
 * An empty successor set means the input is blocked at that state.
 */
struct Tube {
  std::vector<StateId> knots;
  bool operator==(const Tube&) const = default;
  auto operator<=>(const Tube&) const = default;
};

struct TransitionSystem {
  enum class Kind { Cells, Tubes };
  Kind kind = Kind::Cells;
  std::vector<Cell> cells;
  std::vector<Tube> tubes;
  std::vector<StateId> initial;
  std::vector<Vec> inputs;
  std::vector<std::vector<StateId>> successors;

  std::size_t state_count() const { return kind == Kind::Cells ? cells.size() : tubes.size(); }
  std::size_t input_count() const { return inputs.size(); }
  std::span<const StateId> post(StateId s, InputId u) const {
    return successors.at(s * inputs.size() + u);
  }
  bool enabled(StateId s, InputId u) const { return !post(s, u).empty(); }
  std::size_t transition_count() const;
};

struct AbstractionParams {
  double tau = 0.2;
  int integrator_steps = 20;
  std::vector<LogQuantizerParams> log; // one per state coordinate
  InputQuantization input;
  LipschitzSpec lipschitz;
  /* multiplies every growth radius; 0 is the negative-control sabotage */
  double radius_scale = 1.0;
  /* 0: SYMCTL_WORKERS or the hardware concurrency */
  unsigned workers = 0;
};

unsigned resolve_workers(unsigned requested);

/* run body(i) for i in [0, count) on a fixed pool; results go to caller-owned slots */
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/*
 * class: DelayFreeAbstraction
 *
 * the symbolic model of a sampled ODE. Log cells use the logarithmic growth
 * bound; zoom-refined cells use e^(L tau) * max(2 Lambda delta, dist(q, cell)).
 */
class DelayFreeAbstraction {
public:
  DelayFreeAbstraction(ControlSystem sys, AbstractionParams params);

  const ControlSystem& system() const { return sys_; }
  const AbstractionParams& params() const { return params_; }
  const Partition& partition() const { return partition_; }
  const TransitionSystem& ts() const { return ts_; }
  double lipschitz(StateId s) const { return L_.at(s); }

  /* nominal endpoint and growth radius of (cell, input) */
  FlowResult endpoint(StateId s, InputId u) const;
  Vec radius(StateId s) const;

  /*
   * zoom-refine log cells; only changed cells and cells with a successor in
   * a changed log cell are recomputed, other transitions are remapped
   */
  DelayFreeAbstraction refine(const ZoomAssignments& assignments) const;

private:
  DelayFreeAbstraction() = default;
  std::vector<StateId> compute(StateId s, InputId u) const;
  void estimate_all(const std::vector<StateId>& which);

  ControlSystem sys_;
  AbstractionParams params_;
  Partition partition_;
  TransitionSystem ts_;
  std::vector<double> L_;
};

} // namespace symctl

#endif
