#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "fixtures.hh"
#include "symctl/sim.hh"

using namespace symctl;
using fixtures::pendulum;
using fixtures::pendulum_params;

namespace {

std::string temp_path(const char* name) { return std::string(SYMCTL_BINARY_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/* input u on every cell, one phase towards `waypoint` */
Controller constant_controller(const TransitionSystem& ts, InputId u, StateId waypoint) {
  Controller c;
  c.states = ts.state_count();
  c.inputs = ts.input_count();
  c.waypoints = {{waypoint}};
  c.legs = {ReachResult{std::vector<int>(c.states, 1), std::vector<long>(c.states, static_cast<long>(u))}};
  return c;
}

} // namespace

TEST_CASE("closed loop: the origin rests under zero input") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  auto c = constant_controller(abs.ts(), 12, 0);
  SimResult r = run_closed_loop(abs, c, Vec{0, 0}, 10);
  CHECK_FALSE(r.report.completed);
  CHECK(r.report.steps == 10);
  REQUIRE(r.trajectory.samples.size() == 11);
  for (const auto& s : r.trajectory.samples) {
    CHECK(s.x == Vec{0.0, 0.0});
    CHECK(s.cell == 12);
  }
  CHECK(r.trajectory.samples.back().input == kNoInputId);
  CHECK(r.trajectory.samples[3].t == doctest::Approx(0.6));
  std::string why;
  CHECK(check_cell_sequence(abs.ts(), r.trajectory, &why));
  CHECK(completion_text(r.report).find("completed: no") == 0);
}

TEST_CASE("closed loop: completion and the waypoint phase") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  auto c = constant_controller(abs.ts(), 12, 12);
  SimResult r = run_closed_loop(abs, c, Vec{0.1, 0}, 10);
  CHECK(r.report.completed);
  CHECK(r.report.steps == 0);
  CHECK(r.report.completion_time == 0.0);
  CHECK(r.trajectory.samples.size() == 1);
  CHECK(completion_text(r.report) ==
        "completed: yes\nsteps: 0\ncompletion_time: 0\nstatus: all waypoints visited\n");
}

TEST_CASE("closed loop: leaving the winning domain or the box stops the run") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  Controller c = constant_controller(abs.ts(), 24, 0);
  c.legs[0].input[12] = kNoInput;
  c.legs[0].steps[12] = -1;
  SimResult r = run_closed_loop(abs, c, Vec{0, 0}, 10);
  CHECK_FALSE(r.report.completed);
  CHECK(r.report.message.find("winning domain") != std::string::npos);

  /* full input pushes x2 out of [-1, 1] */
  Controller push = constant_controller(abs.ts(), 24, 0);
  SimResult out = run_closed_loop(abs, push, Vec{0.5, 0.5}, 50);
  CHECK_FALSE(out.report.completed);
  CHECK(out.report.message.find("left the state box") != std::string::npos);
}

TEST_CASE("closed loop: deterministic") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  auto c = constant_controller(abs.ts(), 16, 0);
  auto a = run_closed_loop(abs, c, Vec{-0.3, 0.2}, 20);
  auto b = run_closed_loop(abs, c, Vec{-0.3, 0.2}, 20);
  REQUIRE(a.trajectory.samples.size() == b.trajectory.samples.size());
  for (std::size_t k = 0; k < a.trajectory.samples.size(); ++k)
    CHECK(a.trajectory.samples[k].x == b.trajectory.samples[k].x);
}

TEST_CASE("closed loop: time-delay system under a constant input") {
  auto abs = fixtures::delayed_pendulum(0.0, 0.0);
  auto ts = abs.explore();
  auto c = constant_controller(ts, 12, 0);
  c.waypoints = {{}}; // never completes
  SimResult r = run_closed_loop(abs, ts, c, 5);
  CHECK(r.trajectory.samples.size() >= 2);
  CHECK(r.trajectory.samples[0].x == Vec{-0.7, -0.7});
  CHECK(check_cell_sequence(ts, r.trajectory));
}

TEST_CASE("cell-sequence check rejects a missing transition") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  Trajectory t;
  TrajectorySample a, b;
  a.cell = 12;
  a.input = 24; // u = 2.4 lifts x2 well above -0.6
  b.cell = 0;
  t.samples = {a, b};
  std::string why;
  CHECK_FALSE(check_cell_sequence(abs.ts(), t, &why));
  CHECK(why.find("12 -> 0") != std::string::npos);
  t.samples[0].input = kNoInputId;
  CHECK_FALSE(check_cell_sequence(abs.ts(), t, &why));
}

TEST_CASE("trajectory CSV: header, empty input field, round trip") {
  Trajectory empty;
  const std::string p0 = temp_path("traj_empty.csv");
  export_trajectory(empty, 2, 1, p0);
  CHECK(slurp(p0) == "t,x1,x2,u1,phase,cell_id\n");
  CHECK(read_trajectory(p0, 2, 1).samples.empty());

  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  auto c = constant_controller(abs.ts(), 19, 0);
  auto r = run_closed_loop(abs, c, Vec{0, 0}, 1);
  REQUIRE(r.trajectory.samples.size() == 2);
  const std::string p1 = temp_path("traj_two.csv");
  export_trajectory(r.trajectory, 2, 1, p1);
  const std::string text = slurp(p1);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("\n0,0,0,1.4,0,12\n") != std::string::npos);
  CHECK(text.find(",,0,") != std::string::npos);

  Trajectory back = read_trajectory(p1, 2, 1);
  REQUIRE(back.samples.size() == 2);
  REQUIRE(back.samples[0].u.size() == 1);
  CHECK(back.samples[0].u[0] == doctest::Approx(1.4));
  CHECK(back.samples[1].u.empty());
  CHECK(std::fabs(back.samples[1].x[1] - r.trajectory.samples[1].x[1]) < 1e-8);
  CHECK(back.samples[1].cell == r.trajectory.samples[1].cell);

  std::ofstream(temp_path("traj_bad.csv")) << "t,x1,x2,u1,phase,cell_id\n0,1,2\n";
  CHECK_THROWS_AS(read_trajectory(temp_path("traj_bad.csv"), 2, 1), IoError);
  CHECK_THROWS_AS(read_trajectory(temp_path("no_such_dir/x.csv"), 2, 1), IoError);
  std::remove(p0.c_str());
  std::remove(p1.c_str());
}
