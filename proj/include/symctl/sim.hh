/*
 * sim.hh
 *
 * Closed-loop simulation under a refined controller, trajectory CSV I/O and
 * the post-hoc cell-sequence check.
 */

#ifndef SYMCTL_SIM_HH_
#define SYMCTL_SIM_HH_

#include <string>
#include <vector>

#include "symctl/abstraction.hh"
#include "symctl/synthesis.hh"
#include "symctl/timedelay.hh"

namespace symctl {

inline constexpr InputId kNoInputId = static_cast<InputId>(-1);

/* state at t = k tau, the input held on [t, t + tau) and the phase in force */
struct TrajectorySample {
  double t = 0.0;
  Vec x;
  Vec u;
  std::size_t phase = 0;
  StateId cell = 0;
  InputId input = kNoInputId;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

struct SimReport {
  bool completed = false;
  std::size_t steps = 0;
  double completion_time = 0.0;
  std::string message;
};

struct SimResult {
  Trajectory trajectory;
  SimReport report;
};

/*
 * sample, quantize, look up, hold for tau, integrate. Stops when every phase
 * is done, after max_steps, or with a diagnostic when the state leaves X or
 * the winning domain. The last sample carries no input.
 */
SimResult run_closed_loop(const DelayFreeAbstraction& abs, const Controller& c, const Vec& x0,
                          std::size_t max_steps);

/*
 * time-delay variant; abstract states are the tubes of `ts` (an explored
 * model of abs). The input buffer on [-r, 0) is primed with zeros.
 */
SimResult run_closed_loop(const TimeDelayAbstraction& abs, const TransitionSystem& ts,
                          const Controller& c, std::size_t max_steps);

/* consecutive cells follow the recorded inputs in ts; false and a reason otherwise */
bool check_cell_sequence(const TransitionSystem& ts, const Trajectory& traj, std::string* why = nullptr);

std::string completion_text(const SimReport& r);

void export_trajectory(const Trajectory& traj, std::size_t n, std::size_t m, const std::string& path);
Trajectory read_trajectory(const std::string& path, std::size_t n, std::size_t m);

} // namespace symctl

#endif
