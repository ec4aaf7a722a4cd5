/*
 * synthesis.hh
 *
 * Robust reachability and waypoint-sequence synthesis on a finite
 * transition system, and the refined (concrete) feedback law.
 */

#ifndef SYMCTL_SYNTHESIS_HH_
#define SYMCTL_SYNTHESIS_HH_

#include <optional>
#include <string>
#include <vector>

#include "symctl/abstraction.hh"

namespace symctl {

inline constexpr long kNoInput = -1;

/*
 * W_0 = target, W_{k+1} = W_k + {q : some u with empty != post(q,u) in W_k}.
 * steps[q] is the first k with q in W_k (-1 outside the winning domain),
 * input[q] the smallest input id achieving it (kNoInput on the target).
 */
struct ReachResult {
  std::vector<int> steps;
  std::vector<long> input;

  bool winning(StateId s) const { return steps.at(s) >= 0; }
  std::size_t domain_size() const;
};

ReachResult reach_fixed_point(const TransitionSystem& ts, const std::vector<StateId>& target);

/*
 * class: Controller
 *
 * phase p steers towards waypoints[p]; the phase advances when the sampled
 * abstract state lies in the current waypoint set. Phase == waypoints.size()
 * means the specification is complete.
 */
struct Controller {
  std::size_t states = 0;
  std::size_t inputs = 0;
  std::vector<std::vector<StateId>> waypoints;
  std::vector<ReachResult> legs;

  std::size_t phases() const { return waypoints.size(); }
  bool in_waypoint(std::size_t phase, StateId s) const;
  /* kNoInput outside the winning domain of that phase or on its waypoint */
  long input(std::size_t phase, StateId s) const;
  /* phase after observing s while in phase */
  std::size_t advance(std::size_t phase, StateId s) const;

  std::string serialize() const;
  static Controller parse(const std::string& text);
};

Controller synthesize_reach(const TransitionSystem& ts, const std::vector<StateId>& target);

struct SequenceResult {
  Controller controller;
  bool solvable = false;
  /* first leg that fails: 0 means the start is not winning for waypoint 0 */
  std::optional<std::size_t> failed_leg;
  std::string message;
};

/*
 * each leg is solved independently; leg p (p >= 1) must be winning from
 * every state of waypoint p-1, leg 0 from every start state
 */
SequenceResult synthesize_sequence(const TransitionSystem& ts,
                                   const std::vector<std::vector<StateId>>& waypoints,
                                   const std::vector<StateId>& start);

/* concrete law u = c(phase, F(x)); throws Error outside the winning domain */
class FeedbackLaw {
public:
  FeedbackLaw(const Controller& c, const Partition& F, const std::vector<Vec>& inputs)
      : c_(c), F_(F), inputs_(inputs) {}

  struct Decision {
    StateId cell;
    InputId input;
    const Vec& u;
  };
  Decision operator()(std::size_t phase, std::span<const double> x) const;

private:
  const Controller& c_;
  const Partition& F_;
  const std::vector<Vec>& inputs_;
};

} // namespace symctl

#endif
