/*
 * sim.cc
 */

#include "symctl/sim.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace symctl {

namespace {

/* shared loop; observe(x) returns the abstract state or nullopt with a reason */
template <class State, class Observe, class Current, class Step>
SimResult closed_loop(const Controller& c, const std::vector<Vec>& inputs, double tau, State x,
                      std::size_t max_steps, Observe observe, Current current, Step step) {
  SimResult res;
  std::size_t phase = 0;
  for (std::size_t k = 0;; ++k) {
    TrajectorySample smp;
    smp.t = k * tau;
    smp.x = current(x);
    std::string why;
    auto cell = observe(x, why);
    if (!cell) {
      res.report.message = why;
      res.report.steps = k;
      break;
    }
    smp.cell = *cell;
    phase = c.advance(phase, *cell);
    smp.phase = phase;
    if (phase == c.phases()) {
      res.trajectory.samples.push_back(std::move(smp));
      res.report.completed = true;
      res.report.steps = k;
      res.report.completion_time = k * tau;
      res.report.message = "all waypoints visited";
      break;
    }
    if (k == max_steps) {
      res.trajectory.samples.push_back(std::move(smp));
      res.report.steps = k;
      res.report.message = "step limit reached in phase " + std::to_string(phase);
      break;
    }
    const long u = c.input(phase, *cell);
    if (u == kNoInput) {
      res.trajectory.samples.push_back(std::move(smp));
      res.report.steps = k;
      res.report.message = "abstract state " + std::to_string(*cell) +
                           " is outside the winning domain of phase " + std::to_string(phase);
      break;
    }
    smp.input = static_cast<InputId>(u);
    smp.u = inputs[smp.input];
    res.trajectory.samples.push_back(std::move(smp));
    x = step(x, static_cast<InputId>(u));
  }
  return res;
}

} // namespace

SimResult run_closed_loop(const DelayFreeAbstraction& abs, const Controller& c, const Vec& x0,
                          std::size_t max_steps) {
  const auto& sys = abs.system();
  const auto& p = abs.params();
  return closed_loop(
      c, abs.ts().inputs, p.tau, x0, max_steps,
      [&](const Vec& x, std::string& why) -> std::optional<StateId> {
        auto id = abs.partition().locate(x);
        if (!id)
          why = "state " + format_vec(x) + " left the state box";
        return id;
      },
      [](const Vec& x) { return x; },
      [&](const Vec& x, InputId u) {
        return integrate(sys, x, abs.ts().inputs[u], p.tau, p.integrator_steps).x;
      });
}

SimResult run_closed_loop(const TimeDelayAbstraction& abs, const TransitionSystem& ts,
                          const Controller& c, std::size_t max_steps) {
  std::map<Tube, StateId> index;
  for (StateId s = 0; s < ts.tubes.size(); ++s)
    index.emplace(ts.tubes[s], s);
  const auto& sys = abs.system();
  const double tau = abs.params().base.tau;
  const std::size_t buffered = static_cast<std::size_t>(std::llround(sys.r / tau));
  const Vec zero(sys.base.m, 0.0);

  struct State {
    Segment seg;
    std::vector<Vec> buffer;
  };
  State x0{sys.xi0, std::vector<Vec>(buffered, zero)};
  const Box& X = sys.base.state_box;
  return closed_loop(
      c, ts.inputs, tau, x0, max_steps,
      [&](const State& s, std::string& why) -> std::optional<StateId> {
        for (const auto& p : s.seg.samples)
          if (!X.contains(p)) {
            why = "state " + format_vec(p) + " left the state box";
            return std::nullopt;
          }
        auto it = index.find(abs.locate(s.seg));
        if (it == index.end()) {
          why = "functional state is not a tube of the explored model";
          return std::nullopt;
        }
        return it->second;
      },
      [](const State& s) { return s.seg.current(); },
      [&](const State& s, InputId u) {
        State next;
        next.seg = integrate_delay(sys, s.seg, s.buffer, ts.inputs[u], tau, abs.params().base.integrator_steps);
        next.buffer = s.buffer;
        if (!next.buffer.empty()) {
          next.buffer.erase(next.buffer.begin());
          next.buffer.push_back(ts.inputs[u]);
        }
        return next;
      });
}

bool check_cell_sequence(const TransitionSystem& ts, const Trajectory& traj, std::string* why) {
  for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
    const auto& a = traj.samples[k];
    const auto& b = traj.samples[k + 1];
    if (a.input == kNoInputId) {
      if (why)
        *why = "sample " + std::to_string(k) + " has no input but is followed by another sample";
      return false;
    }
    auto post = ts.post(a.cell, a.input);
    if (!std::binary_search(post.begin(), post.end(), b.cell)) {
      if (why)
        *why = "step " + std::to_string(k) + ": " + std::to_string(a.cell) + " -> " +
               std::to_string(b.cell) + " is not a transition under input " + std::to_string(a.input);
      return false;
    }
  }
  return true;
}

std::string completion_text(const SimReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", r.completion_time);
  std::string out = "completed: " + std::string(r.completed ? "yes" : "no") + "\n";
  out += "steps: " + std::to_string(r.steps) + "\n";
  if (r.completed)
    out += "completion_time: " + std::string(buf) + "\n";
  out += "status: " + r.message + "\n";
  return out;
}

void export_trajectory(const Trajectory& traj, std::size_t n, std::size_t m, const std::string& path) {
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot write trajectory file " + path);
  os << "t";
  for (std::size_t i = 1; i <= n; ++i)
    os << ",x" << i;
  for (std::size_t j = 1; j <= m; ++j)
    os << ",u" << j;
  os << ",phase,cell_id\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (const auto& s : traj.samples) {
    os << num(s.t);
    for (double v : s.x)
      os << ',' << num(v);
    for (std::size_t j = 0; j < m; ++j)
      os << ',' << (s.u.empty() ? std::string() : num(s.u[j]));
    os << ',' << s.phase << ',' << s.cell << '\n';
  }
  if (!os)
    throw IoError("failed writing trajectory file " + path);
}

Trajectory read_trajectory(const std::string& path, std::size_t n, std::size_t m) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot read trajectory file " + path);
  Trajectory traj;
  std::string line;
  std::getline(is, line);
  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string tok; std::getline(ls, tok, ',');)
      f.push_back(tok);
    if (!line.empty() && line.back() == ',')
      f.emplace_back();
    if (f.size() != n + m + 3)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(n + m + 3) + " fields");
    TrajectorySample s;
    try {
      s.t = std::stod(f[0]);
      for (std::size_t i = 0; i < n; ++i)
        s.x.push_back(std::stod(f[1 + i]));
      if (!f[1 + n].empty())
        for (std::size_t j = 0; j < m; ++j)
          s.u.push_back(std::stod(f[1 + n + j]));
      s.phase = std::stoul(f[1 + n + m]);
      s.cell = std::stoul(f[2 + n + m]);
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

} // namespace symctl
