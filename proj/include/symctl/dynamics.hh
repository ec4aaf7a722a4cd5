/*
 * dynamics.hh
 *
 * Concrete plants (delay-free and time-delay), fixed-step RK4 integration
 * under piecewise-constant inputs, and Lipschitz constant estimation.
 */

#ifndef SYMCTL_DYNAMICS_HH_
#define SYMCTL_DYNAMICS_HH_

#include <span>
#include <vector>

#include "symctl/expr.hh"
#include "symctl/quantizers.hh"
#include "symctl/types.hh"

namespace symctl {

struct ControlSystem {
  std::size_t n = 0;
  std::size_t m = 0;
  Box state_box;
  Box input_box;
  std::vector<expr::Expression> field;

  /* throws Error on dimension mismatch or delay terms (when not allowed) */
  void validate(bool allow_delay = false) const;
  bool has_delay() const;

  /* f(x, u); history is required iff the field has delay terms */
  Vec rhs(std::span<const double> x, std::span<const double> u,
          const expr::History* history = nullptr) const;
};

/*
 * class: Segment
 *
 * a state curve on [-span, 0] sampled on a uniform grid, oldest first.
 * A single sample represents a zero-length segment.
 */
struct Segment {
  double spacing = 0.0;
  std::vector<Vec> samples;

  double span() const { return samples.empty() ? 0.0 : spacing * (samples.size() - 1); }
  /* linear interpolation at time t in [-span, 0] */
  Vec at(double t) const;
  const Vec& current() const { return samples.back(); }

  static Segment constant(const Vec& x, double span, double spacing);
};

struct TimeDelaySystem {
  ControlSystem base;
  double Theta = 0.0;
  double r = 0.0;
  Segment xi0;

  /* checks delays <= Theta, xi0 inside X and span(xi0) == Theta */
  void validate() const;
};

struct FlowResult {
  Vec x;
  /* some intermediate RK point left the state box */
  bool left_domain = false;
};

/* classical RK4 with `steps` equal substeps of length tau/steps, constant u */
FlowResult integrate(const ControlSystem& sys, std::span<const double> x0,
                     std::span<const double> u, double tau, int steps);

/*
 * method of steps for x'(t) = f(x_t, u(t - r)).
 *
 * history covers [-Theta, 0] on a grid of spacing h; u_past holds the r/tau
 * inputs applied over [-r, 0), oldest first. The input acting on [0, tau] is
 * u_past.front() when r > 0, u_now otherwise. RK4 with step h (tau/steps
 * when Theta == 0, `steps` is ignored otherwise); delayed
 * values come from linear interpolation of history plus computed points.
 * Returns x(tau + theta), theta in [-Theta, 0], on the same grid.
 */
Segment integrate_delay(const TimeDelaySystem& sys, const Segment& history,
                        std::span<const Vec> u_past, std::span<const double> u_now, double tau,
                        int steps = 20);

/* history spacing Theta/20 with a 1e-4 floor (0 for Theta == 0) */
double default_history_spacing(double Theta);

enum class LipschitzMode { SampledJacobian, UserConstant };

struct LipschitzSpec {
  LipschitzMode mode = LipschitzMode::SampledJacobian;
  double constant = 0.0;
  double safety = 1.1;
};

/*
 * sampled mode: max over a 3^n grid of the cell (and 3^m grid of U) of the
 * infinity norm of the central-difference Jacobian of f with respect to the
 * state and every distinct delayed slot, times the safety factor
 */
double estimate_lipschitz(const ControlSystem& sys, const Box& cell, const LipschitzSpec& spec);

} // namespace symctl

#endif
