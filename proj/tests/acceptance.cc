/*
 * acceptance.cc
 *
 * end-to-end acceptance checks on the pendulum benchmark. One PASS/FAIL
 * line per criterion; the exit status is nonzero if any criterion fails.
 */

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "symctl/config.hh"
#include "symctl/frr.hh"
#include "symctl/model_io.hh"
#include "symctl/sim.hh"
#include "symctl/spline.hh"
#include "symctl/synthesis.hh"

using namespace symctl;

namespace {

using Clock = std::chrono::steady_clock;

std::string cfg(const char* name) { return std::string(SYMCTL_SOURCE_DIR) + "/configs/" + name; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/* run the CLI and capture stdout */
int run_cli(const std::string& args, std::string& out) {
  const std::string cmd = std::string(SYMCTL_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p)
    return -1;
  std::array<char, 512> buf;
  while (std::fgets(buf.data(), buf.size(), p))
    out += buf.data();
  const int status = pclose(p);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t violations_in(const std::string& out) {
  auto at = out.find("violations: ");
  return at == std::string::npos ? static_cast<std::size_t>(-1) : std::stoul(out.substr(at + 12));
}

Outcome state_count() {
  const auto t0 = Clock::now();
  Config c = load_config(cfg("pendulum.cfg"));
  DelayFreeAbstraction abs(c.system, c.abstraction);
  const double dt = seconds_since(t0);
  std::set<std::pair<long, long>> qs;
  for (const auto& cell : abs.ts().cells)
    qs.insert({std::lround(cell.q[0] * 100), std::lround(cell.q[1] * 100)});
  std::set<std::pair<long, long>> expect;
  for (long a : {-72, -48, 0, 48, 72})
    for (long b : {-72, -48, 0, 48, 72})
      expect.insert({a, b});
  const std::size_t n = abs.ts().state_count();
  return {n == 25 && qs == expect && dt < 5.0,
          std::to_string(n) + " states, quantized points " + (qs == expect ? "match" : "differ") +
              fmt(", build %.3f s", dt)};
}

Outcome zoom_counts() {
  Config c = load_config(cfg("pendulum.cfg"));
  Partition base(c.system.state_box, c.abstraction.log);
  const StateId corner = *base.locate(Vec{-0.8, -0.8});
  const StateId center = *base.locate(Vec{0.0, 0.0});
  const auto a = base.refined({{corner, {10, 1.0, 0.1}}}).cells_of_log(corner).size();
  const auto b = base.refined({{center, {1, 1.0, 0.3}}}).cells_of_log(center).size();
  return {a == 25 && b == 9, "corner " + std::to_string(a) + " subcells, center " + std::to_string(b)};
}

Outcome self_loop() {
  Config c = load_config(cfg("pendulum.cfg"));
  DelayFreeAbstraction abs(c.system, c.abstraction);
  const StateId s = *abs.partition().locate(Vec{0.0, 0.0});
  const auto& in = abs.ts().inputs;
  InputId zero = 0;
  while (zero < in.size() && in[zero][0] != 0.0)
    ++zero;
  if (zero == in.size())
    return {false, "u = 0 is not an abstract input"};
  auto post = abs.ts().post(s, zero);
  const bool loop = std::binary_search(post.begin(), post.end(), s);
  return {loop, "cell " + std::to_string(s) + (loop ? " -> itself under u = 0" : " has no self-loop under u = 0")};
}

Outcome frr_delayfree() {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = true;
  for (int seed : {1, 2, 3}) {
    std::string out;
    const int code = run_cli("verify-frr --config " + cfg("pendulum.cfg") + " --samples 1000 --seed " +
                                 std::to_string(seed),
                             out);
    const std::size_t v = violations_in(out);
    pass = pass && code == 0 && v == 0;
    detail += "seed " + std::to_string(seed) + ": " + std::to_string(v) + " violations; ";
  }
  /* negative control: the same configuration with a zero growth radius */
  std::string text = read_file(cfg("pendulum.cfg"));
  text.replace(text.find("[abstraction]\n"), 14, "[abstraction]\nradius_scale = 0\n");
  const std::string sabotaged = std::string(SYMCTL_BINARY_DIR) + "/sabotaged.cfg";
  write_file(sabotaged, text);
  std::string out;
  const int code = run_cli("verify-frr --config " + sabotaged + " --samples 1000 --seed 1", out);
  const std::size_t v = violations_in(out);
  std::remove(sabotaged.c_str());
  const double dt = seconds_since(t0);
  pass = pass && code == 1 && v >= 1 && v != static_cast<std::size_t>(-1) && dt < 60.0;
  detail += "zero radius: " + std::to_string(v) + " violations" + fmt("; %.2f s", dt);
  return {pass, detail};
}

Outcome sequence_closed_loop() {
  const auto t0 = Clock::now();
  Config c = load_config(cfg("pendulum.cfg"));
  DelayFreeAbstraction abs = build_delayfree(c);
  auto waypoints = resolve_points(c.waypoints, abs.partition());
  const StateId start = *abs.partition().locate(c.x0);
  SequenceResult seq = synthesize_sequence(abs.ts(), waypoints, {start});
  if (!seq.solvable)
    return {false, "sequence not solvable: " + seq.message};
  SimResult sim = run_closed_loop(abs, seq.controller, c.x0, c.max_steps);
  std::string why;
  const bool consistent = check_cell_sequence(abs.ts(), sim.trajectory, &why);
  const double T = sim.report.completion_time;
  const bool in_band = T >= 11.8 * 0.8 && T <= 11.8 * 1.2 && T < 24.0;
  return {sim.report.completed && consistent && in_band,
          std::string(sim.report.completed ? "completed" : "not completed (" + sim.report.message + ")") +
              fmt(", completion %.2f s", T) + (consistent ? ", cell sequence consistent" : ", " + why) +
              fmt("; %.2f s", seconds_since(t0))};
}

Outcome refined_synthesis() {
  Config c = load_config(cfg("pendulum_refined.cfg"));
  DelayFreeAbstraction abs = build_delayfree(c);
  const std::size_t n = abs.ts().state_count();
  auto waypoints = resolve_points(c.waypoints, abs.partition());
  const StateId start = *abs.partition().locate(c.x0);
  SequenceResult seq = synthesize_sequence(abs.ts(), waypoints, {start});
  return {n == 33 && seq.solvable,
          std::to_string(n) + " states; " + (seq.solvable ? "controller exists" : "no controller: " + seq.message)};
}

Outcome frr_timedelay() {
  const auto t0 = Clock::now();
  Config c = load_config(cfg("pendulum_delay.cfg"));
  TimeDelayAbstraction abs(make_timedelay_system(c), make_timedelay_params(c));
  FrrReport rep = sample_frr_timedelay(abs, 200, c.seed);

  /* degenerate delays: the tube machinery and the delay-free model must agree */
  Config d = load_config(cfg("pendulum_nodelay.cfg"));
  TimeDelayAbstraction td0(make_timedelay_system(d), make_timedelay_params(d));
  FrrReport r0 = sample_frr_timedelay(td0, 200, d.seed);
  DelayFreeAbstraction base(d.system, d.abstraction);
  FrrReport rf = sample_frr_delayfree(base.refine(resolve_zoom(d, base.partition())), 200, d.seed);
  const double dt = seconds_since(t0);
  return {rep.pass() && r0.pass() == rf.pass() && dt < 300.0,
          std::to_string(rep.violations.size()) + " violations in 200 samples (" + std::to_string(rep.exits) +
              " exits); zero-delay verdict " + (r0.pass() ? "pass" : "fail") + ", delay-free verdict " +
              (rf.pass() ? "pass" : "fail") + fmt("; %.2f s", dt)};
}

Outcome properties() {
  std::mt19937_64 rng(2024);
  std::string fails;

  /* sector bound, both variants */
  for (LogVariant v : {LogVariant::Base, LogVariant::Shifted}) {
    LogQuantizerParams p{0.2, 0.4, v};
    std::uniform_real_distribution<double> mag(-6.0, 3.0);
    for (int i = 0; i < 100000; ++i) {
      const double z = std::pow(10.0, mag(rng)) * (i % 2 ? 1.0 : -1.0);
      const double q = log_quantize(z, p);
      const bool ok = std::fabs(z) > p.deadzone() ? std::fabs(z - q) <= p.eta * std::fabs(z) * (1 + 1e-12) : q == 0.0;
      if (!ok) {
        fails += " sector";
        break;
      }
    }
  }

  /* zoom quantizer: error, range and deadzone */
  {
    ZoomQuantizerParams p{10, 1.0, 0.1};
    const double s = p.step();
    std::uniform_real_distribution<double> z(-15 * s, 15 * s);
    for (int i = 0; i < 100000; ++i) {
      const double v = z(rng), q = zoom_quantize(v, p);
      bool ok = std::fabs(q) <= p.range() * (1 + 1e-12);
      if (std::fabs(v) <= p.range())
        ok = ok && std::fabs(v - q) <= p.error_bound() * (1 + 1e-12);
      if (std::fabs(v) > p.range())
        ok = ok && std::fabs(q) > (p.M - 1) * s;
      if (std::fabs(v) < 0.5 * s)
        ok = ok && q == 0.0;
      if (!ok) {
        fails += " zoom";
        break;
      }
    }
  }

  /* partition of unity on a 1000-point grid */
  double worst = 0.0;
  for (int N : {0, 1, 8}) {
    SplineBasis b(N, -0.2, 0.0);
    for (int k = 0; k < 1000; ++k) {
      const double t = -0.2 + 0.2 * k / 999.0;
      double sum = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j)
        sum += b.value(j, t);
      worst = std::max(worst, std::fabs(sum - 1.0));
    }
  }
  if (!(worst < 1e-12))
    fails += " unity";

  /* cover exactness of the refined pendulum partition */
  Partition base(Box({-1, -1}, {1, 1}), {LogQuantizerParams{}, LogQuantizerParams{}});
  Partition part = base.refined({{0, {10, 1.0, 0.1}}, {12, {1, 1.0, 0.3}}});
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  std::size_t unique = 0;
  for (int k = 0; k < 100000; ++k) {
    const Vec p{x(rng), x(rng)};
    int inside = 0;
    StateId owner = 0;
    for (const auto& c : part.cells())
      if (p[0] > c.lower[0] && p[0] < c.upper[0] && p[1] > c.lower[1] && p[1] < c.upper[1]) {
        ++inside;
        owner = c.id;
      }
    auto loc = part.locate(p);
    unique += inside == 1 && loc && *loc == owner;
  }
  if (unique != 100000)
    fails += " cover";

  return {fails.empty(), fails.empty() ? fmt("all suites pass (unity error %.1e, cover 100%%)", worst)
                                       : "failing:" + fails};
}

Outcome convergence() {
  ControlSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.state_box = Box({-2.0}, {2.0});
  sys.input_box = Box({0.0}, {0.0});
  sys.field.push_back(expr::parse("-x1", 1, 1));
  double min_ratio = 1e300;
  for (double T : {0.2, 1.0, 2.0}) {
    double prev = 0.0;
    for (int steps = 1; steps <= 16; steps *= 2) {
      const double err = std::fabs(integrate(sys, Vec{1.0}, Vec{0.0}, T, steps).x[0] - std::exp(-T));
      if (steps > 1 && err > 1e-14)
        min_ratio = std::min(min_ratio, prev / err);
      prev = err;
    }
  }
  Config c = load_config(cfg("pendulum.cfg"));
  double gap = 0.0;
  for (double u : {-2.0, 0.0, 1.4}) {
    const Vec x0{0.3, -0.2};
    auto whole = integrate(c.system, x0, Vec{u}, 0.4, 40);
    auto half = integrate(c.system, integrate(c.system, x0, Vec{u}, 0.2, 20).x, Vec{u}, 0.2, 20);
    gap = std::max({gap, std::fabs(whole.x[0] - half.x[0]), std::fabs(whole.x[1] - half.x[1])});
  }
  return {min_ratio >= 8.0 && gap <= 1e-9,
          fmt("min reduction factor %.2f", min_ratio) + fmt(", semigroup gap %.1e", gap)};
}

} // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"state count of the pendulum model", state_count},
      {"zoom refinement counts", zoom_counts},
      {"self-loop at the origin", self_loop},
      {"sampled refinement check (delay-free)", frr_delayfree},
      {"sequence synthesis and closed loop", sequence_closed_loop},
      {"refined-model synthesis", refined_synthesis},
      {"sampled refinement check (time-delay)", frr_timedelay},
      {"quantizer and spline properties", properties},
      {"integrator convergence", convergence},
  };
  int failed = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d %s: %s (%s)\n", k, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", k - failed, k);
  return failed ? 1 : 0;
}
