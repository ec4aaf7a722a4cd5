/*
 * fixtures.hh
 *
 * shared systems and abstraction settings for the unit tests
 */

#ifndef SYMCTL_TEST_FIXTURES_HH_
#define SYMCTL_TEST_FIXTURES_HH_

#include <string>
#include <vector>

#include "symctl/abstraction.hh"
#include "symctl/config.hh"
#include "symctl/timedelay.hh"

namespace fixtures {

using namespace symctl;

inline ControlSystem make_system(std::size_t n, std::size_t m, Vec xl, Vec xu, Vec ul, Vec uu,
                                 const std::vector<std::string>& f) {
  ControlSystem sys;
  sys.n = n;
  sys.m = m;
  sys.state_box = Box(std::move(xl), std::move(xu));
  sys.input_box = Box(std::move(ul), std::move(uu));
  for (const auto& s : f)
    sys.field.push_back(expr::parse(s, n, m));
  return sys;
}

/* x1' = x2, x2' = -1.96 sin x1 - 1.5 x2 + u on [-1,1]^2 x [-2.5,2.5] */
inline ControlSystem pendulum() {
  return make_system(2, 1, {-1, -1}, {1, 1}, {-2.5}, {2.5}, {"x2", "-1.96*sin(x1) - 1.5*x2 + u1"});
}

inline AbstractionParams pendulum_params(double L = 6.0) {
  AbstractionParams p;
  p.tau = 0.2;
  p.log = {LogQuantizerParams{0.2, 0.4, LogVariant::Shifted}};
  p.input.mu = 0.2;
  if (L > 0.0) {
    p.lipschitz.mode = LipschitzMode::UserConstant;
    p.lipschitz.constant = L;
  }
  return p;
}

/* the delayed pendulum with constant xi0 = (-0.7, -0.7) and a 0.1-zoomed corner */
inline TimeDelayAbstraction delayed_pendulum(double Theta, double r, double scale = 1.0) {
  TimeDelaySystem sys;
  const std::string f2 = Theta > 0.0 ? "-1.96*sin(x1) - 1.5*x2 + 0.1*delay(x2, " + std::to_string(Theta) + ") + u1"
                                     : "-1.96*sin(x1) - 1.5*x2 + 0.1*x2 + u1";
  sys.base = make_system(2, 1, {-1, -1}, {1, 1}, {-2.5}, {2.5}, {"x2", f2});
  sys.Theta = Theta;
  sys.r = r;
  sys.xi0 = Segment::constant({-0.7, -0.7}, Theta, Theta > 0.0 ? Theta : 0.0);
  TimeDelayParams p;
  p.base = pendulum_params(0.0);
  p.base.radius_scale = scale;
  p.zoom[0] = ZoomQuantizerParams{10, 1.0, 0.1};
  p.N = Theta > 0.0 ? 8 : 0;
  return TimeDelayAbstraction(std::move(sys), std::move(p));
}

inline std::string config_path(const std::string& name) {
  return std::string(SYMCTL_SOURCE_DIR) + "/configs/" + name;
}

} // namespace fixtures

#endif
