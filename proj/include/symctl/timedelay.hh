/*
 * timedelay.hh
 *
 * Symbolic model of a sampled time-delay system. Abstract states are spline
 * tubes over a zoom-refined partition; the transition relation is kept
 * implicit as a per-knot "cylinder" of admissible successor cells, and an
 * explicit transition system can be explored from the initial tube.
 */

#ifndef SYMCTL_TIMEDELAY_HH_
#define SYMCTL_TIMEDELAY_HH_

#include <map>
#include <mutex>
#include <vector>

#include "symctl/abstraction.hh"
#include "symctl/spline.hh"

namespace symctl {

struct TimeDelayParams {
  AbstractionParams base;
  ZoomAssignments zoom;
  /* number of interior knots; < 0 picks min(8, M^2) */
  int N = -1;
  /* explicit exploration stops with an error past this many tubes */
  std::size_t budget = 10000;
};

/* candidate cells per knot; blocked when a nominal knot point leaves X */
struct Cylinder {
  bool blocked = false;
  std::vector<std::vector<StateId>> knots;
};

class TimeDelayAbstraction {
public:
  TimeDelayAbstraction(TimeDelaySystem sys, TimeDelayParams params);

  const TimeDelaySystem& system() const { return sys_; }
  const TimeDelayParams& params() const { return params_; }
  const Partition& partition() const { return partition_; }
  const SplineBasis& basis() const { return basis_; }
  const std::vector<Vec>& inputs() const { return inputs_; }
  double history_spacing() const { return spacing_; }
  /* history grid points per knot interval */
  std::size_t knot_stride() const { return stride_; }
  double lipschitz() const { return L_; }

  Tube initial_tube() const;
  /* F on functionals: knot cells of the segment */
  Tube locate(const Segment& x) const { return psi2(x, partition_, basis_); }

  /* spline combination sum_j q_j s_j sampled on the history grid */
  Segment interpolant(const Tube& tube) const;
  /* max over knots of Lambda*delta (refined) or the distance from q to the cell boundary */
  double theta2(const Tube& tube) const;
  double radius(const Tube& tube) const;

  /* r/tau copies of input u, so that u is the input acting on [0, tau] */
  std::vector<Vec> input_buffer(InputId u) const;
  Segment advance(const Segment& x, InputId u) const;

  Cylinder successor_cylinder(const Tube& tube, InputId u) const;
  static bool contains(const Cylinder& c, const Tube& t);

  /* breadth-first enumeration of tubes reachable from the initial tube */
  TransitionSystem explore(std::size_t budget) const;
  TransitionSystem explore() const { return explore(params_.budget); }

private:
  TimeDelaySystem sys_;
  TimeDelayParams params_;
  Partition partition_;
  SplineBasis basis_{0, 0.0, 0.0};
  std::vector<Vec> inputs_;
  double spacing_ = 0.0;
  std::size_t stride_ = 1;
  double L_ = 0.0;
};

} // namespace symctl

#endif
