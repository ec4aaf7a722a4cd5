/*
 * config.hh
 *
 * Sectioned key = value configuration files:
 *
 *   [system]       n, m, state_lower/upper, input_lower/upper, f1..fn,
 *                  Theta, r, xi0 (time-delay systems only)
 *   [abstraction]  tau, steps, variant, eta, d (eta_i / d_i override
 *                  coordinate i), inputs, mu, input_eta, input_d,
 *                  lipschitz, safety, zoom (repeatable), N, budget,
 *                  radius_scale, workers
 *   [synthesis]    spec = reach | sequence, target, waypoints, start
 *   [run]          x0, max_steps, seed, samples
 *
 * Vectors are whitespace separated, point lists use ';' between points,
 * and '#' starts a comment.
 */

#ifndef SYMCTL_CONFIG_HH_
#define SYMCTL_CONFIG_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "symctl/abstraction.hh"
#include "symctl/timedelay.hh"

namespace symctl {

/* zoom = <point> : M Lambda delta; the point names the log cell */
struct ZoomSpec {
  Vec point;
  ZoomQuantizerParams params;
};

struct Config {
  ControlSystem system;
  bool time_delay = false;
  double Theta = 0.0;
  double r = 0.0;
  /* xi0 points equally spaced over [-Theta, 0]; one point = constant */
  std::vector<Vec> xi0;

  AbstractionParams abstraction;
  std::vector<ZoomSpec> zoom;
  int N = -1;
  std::size_t budget = 10000;

  enum class Spec { None, Reach, Sequence };
  Spec spec = Spec::None;
  std::vector<Vec> waypoints; // the reach target is waypoints[0]
  std::vector<Vec> start;

  Vec x0;
  std::size_t max_steps = 1000;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
};

Config parse_config(const std::string& text, const std::string& origin = "config");
Config load_config(const std::string& path);

/* log-cell assignments for the configured zoom points */
ZoomAssignments resolve_zoom(const Config& cfg, const Partition& log_partition);

TimeDelaySystem make_timedelay_system(const Config& cfg);
TimeDelayParams make_timedelay_params(const Config& cfg);

/* build the configured delay-free model, refined when zoom is present */
DelayFreeAbstraction build_delayfree(const Config& cfg);

/* point -> abstract state of the given partition */
std::vector<std::vector<StateId>> resolve_points(const std::vector<Vec>& pts, const Partition& partition);

} // namespace symctl

#endif
