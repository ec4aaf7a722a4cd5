/*
 * synthesis.cc
 */

#include "symctl/synthesis.hh"

#include <algorithm>
#include <sstream>

namespace symctl {

std::size_t ReachResult::domain_size() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](int k) { return k >= 0; }));
}

ReachResult reach_fixed_point(const TransitionSystem& ts, const std::vector<StateId>& target) {
  const std::size_t ns = ts.state_count(), nu = ts.input_count();
  if (target.empty())
    throw Error("reach: target set is empty");
  ReachResult res;
  res.steps.assign(ns, -1);
  res.input.assign(ns, kNoInput);

  /* remaining[s*nu+u]: successors of (s,u) not yet winning */
  std::vector<std::size_t> remaining(ns * nu);
  std::vector<std::vector<std::size_t>> pred(ns);
  for (StateId s = 0; s < ns; ++s)
    for (InputId u = 0; u < nu; ++u) {
      auto post = ts.post(s, u);
      remaining[s * nu + u] = post.size();
      for (StateId d : post)
        pred[d].push_back(s * nu + u);
    }

  std::vector<StateId> frontier;
  for (StateId t : target) {
    if (t >= ns)
      throw Error("reach: target references unknown state " + std::to_string(t));
    if (res.steps[t] < 0) {
      res.steps[t] = 0;
      frontier.push_back(t);
    }
  }

  for (int k = 0; !frontier.empty(); ++k) {
    std::vector<std::size_t> ready;
    for (StateId d : frontier)
      for (std::size_t pair : pred[d])
        if (--remaining[pair] == 0)
          ready.push_back(pair);
    std::sort(ready.begin(), ready.end());
    std::vector<StateId> next;
    for (std::size_t pair : ready) {
      const StateId s = pair / nu;
      if (res.steps[s] >= 0)
        continue;
      res.steps[s] = k + 1;
      res.input[s] = static_cast<long>(pair % nu);
      next.push_back(s);
    }
    frontier = std::move(next);
  }
  return res;
}

bool Controller::in_waypoint(std::size_t phase, StateId s) const {
  if (phase >= waypoints.size())
    return false;
  return std::binary_search(waypoints[phase].begin(), waypoints[phase].end(), s);
}

long Controller::input(std::size_t phase, StateId s) const {
  if (phase >= legs.size() || s >= states)
    return kNoInput;
  return legs[phase].input[s];
}

std::size_t Controller::advance(std::size_t phase, StateId s) const {
  return in_waypoint(phase, s) ? phase + 1 : phase;
}

std::string Controller::serialize() const {
  std::ostringstream os;
  os << "CTRL 1 " << states << ' ' << inputs << ' ' << phases() << '\n';
  for (std::size_t p = 0; p < phases(); ++p) {
    os << "W " << p;
    for (StateId s : waypoints[p])
      os << ' ' << s;
    os << '\n';
  }
  for (std::size_t p = 0; p < phases(); ++p)
    for (StateId s = 0; s < states; ++s)
      if (legs[p].steps[s] >= 0)
        os << "C " << p << ' ' << s << ' ' << legs[p].input[s] << ' ' << legs[p].steps[s] << '\n';
  return os.str();
}

Controller Controller::parse(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int version = 0;
  std::size_t phases = 0;
  Controller c;
  if (!(is >> tag >> version >> c.states >> c.inputs >> phases) || tag != "CTRL" || version != 1)
    throw Error("controller file: bad header");
  c.waypoints.assign(phases, {});
  c.legs.assign(phases, ReachResult{std::vector<int>(c.states, -1), std::vector<long>(c.states, kNoInput)});
  std::string line;
  std::getline(is, line);
  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    std::istringstream ls(line);
    if (!(ls >> tag))
      continue;
    std::size_t p = 0;
    auto bad = [&](const std::string& why) {
      return Error("controller file line " + std::to_string(lineno) + ": " + why);
    };
    if (!(ls >> p) || p >= phases)
      throw bad("phase out of range");
    if (tag == "W") {
      for (StateId s; ls >> s;) {
        if (s >= c.states)
          throw bad("state out of range");
        c.waypoints[p].push_back(s);
      }
      std::sort(c.waypoints[p].begin(), c.waypoints[p].end());
    } else if (tag == "C") {
      StateId s = 0;
      long u = 0;
      int k = 0;
      if (!(ls >> s >> u >> k) || s >= c.states || u < kNoInput || u >= static_cast<long>(c.inputs) || k < 0)
        throw bad("malformed entry");
      c.legs[p].input[s] = u;
      c.legs[p].steps[s] = k;
    } else {
      throw bad("unknown record '" + tag + "'");
    }
  }
  return c;
}

Controller synthesize_reach(const TransitionSystem& ts, const std::vector<StateId>& target) {
  Controller c;
  c.states = ts.state_count();
  c.inputs = ts.input_count();
  std::vector<StateId> t = target;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  c.legs.push_back(reach_fixed_point(ts, t));
  c.waypoints.push_back(std::move(t));
  return c;
}

SequenceResult synthesize_sequence(const TransitionSystem& ts,
                                   const std::vector<std::vector<StateId>>& waypoints,
                                   const std::vector<StateId>& start) {
  if (waypoints.empty())
    throw Error("sequence: no waypoints");
  SequenceResult res;
  Controller& c = res.controller;
  c.states = ts.state_count();
  c.inputs = ts.input_count();
  for (const auto& w : waypoints) {
    if (w.empty())
      throw Error("sequence: empty waypoint set");
    Controller leg = synthesize_reach(ts, w);
    c.waypoints.push_back(std::move(leg.waypoints[0]));
    c.legs.push_back(std::move(leg.legs[0]));
  }
  for (std::size_t p = 0; p < c.phases(); ++p) {
    const auto& from = p == 0 ? start : c.waypoints[p - 1];
    for (StateId s : from) {
      if (s >= c.states)
        throw Error("sequence: start references unknown state " + std::to_string(s));
      if (!c.legs[p].winning(s)) {
        res.failed_leg = p;
        res.message = "leg " + std::to_string(p) + " is not solvable from state " + std::to_string(s) +
                      " (winning domain has " + std::to_string(c.legs[p].domain_size()) + " of " +
                      std::to_string(c.states) + " states)";
        return res;
      }
    }
  }
  res.solvable = true;
  res.message = "solvable";
  return res;
}

FeedbackLaw::Decision FeedbackLaw::operator()(std::size_t phase, std::span<const double> x) const {
  auto cell = F_.locate(x);
  if (!cell)
    throw Error("controller: state " + format_vec(x) + " is outside the state box");
  const long u = c_.input(phase, *cell);
  if (u == kNoInput)
    throw Error("controller: state " + format_vec(x) + " (cell " + std::to_string(*cell) +
                ") is outside the winning domain of phase " + std::to_string(phase));
  return {*cell, static_cast<InputId>(u), inputs_.at(static_cast<std::size_t>(u))};
}

} // namespace symctl
