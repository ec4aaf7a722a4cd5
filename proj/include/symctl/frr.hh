/*
 * frr.hh
 *
 * Feedback refinement relation checks: exhaustive on two finite systems,
 * and randomized witnesses against the concrete sampled dynamics.
 */

#ifndef SYMCTL_FRR_HH_
#define SYMCTL_FRR_HH_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "symctl/abstraction.hh"
#include "symctl/timedelay.hh"

namespace symctl {

struct FiniteFrrResult {
  bool pass = true;
  std::string counterexample;
};

/*
 * relation holds pairs (x1, x2). Inputs are matched by value; the input
 * alphabet of t2 must be contained in that of t1 (Error otherwise).
 */
FiniteFrrResult check_frr_finite(const TransitionSystem& t1, const TransitionSystem& t2,
                                 const std::vector<std::pair<StateId, StateId>>& relation);

struct FrrViolation {
  std::size_t sample = 0;
  Vec x;                  // concrete state (delay-free) or current value x(0)
  Vec u;
  Vec successor;          // concrete successor x(tau)
  std::string abstract;   // abstract state of x, printed
  std::string landed;     // abstract state of the successor, printed
  std::string candidates; // admissible abstract successors, printed
};

struct FrrReport {
  std::size_t samples = 0;
  /* concrete successors that left the state box (F is undefined there) */
  std::size_t exits = 0;
  std::vector<FrrViolation> violations;
  std::uint64_t seed = 0;

  bool pass() const { return violations.empty(); }
  std::string text() const;
  /* one tab-separated line per violation */
  std::string dump() const;
};

/* deterministic per-sample generator seed */
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

FrrReport sample_frr_delayfree(const DelayFreeAbstraction& abs, std::size_t samples,
                               std::uint64_t seed);

/* random walk over tubes starting at the initial tube */
FrrReport sample_frr_timedelay(const TimeDelayAbstraction& abs, std::size_t samples,
                               std::uint64_t seed);

} // namespace symctl

#endif
