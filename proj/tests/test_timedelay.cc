#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "fixtures.hh"
#include "symctl/spline.hh"

using namespace symctl;
using fixtures::delayed_pendulum;
using fixtures::make_system;

TEST_CASE("spline basis: partition of unity and knot values") {
  std::mt19937_64 rng(23);
  for (int N : {0, 1, 3, 8}) {
    SplineBasis b(N, -0.2, 0.0);
    CHECK(b.size() == static_cast<std::size_t>(N) + 2);
    std::uniform_real_distribution<double> t(-0.2, 0.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double s = t(rng);
      double sum = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        REQUIRE(b.value(j, s) >= 0.0);
        sum += b.value(j, s);
      }
      worst = std::max(worst, std::fabs(sum - 1.0));
    }
    CHECK(worst < 1e-12);
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(b.value(j, b.knot(i)) == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  SplineBasis b(8, -0.2, 0.0);
  CHECK(b.value(0, -0.2) == 1.0);
  CHECK(b.value(0, -0.2 + b.h()) == doctest::Approx(0.0));
}

TEST_CASE("spline basis: active sets") {
  SplineBasis b(1, -1.0, 0.0);
  CHECK(b.active(-1.0) == std::vector<std::size_t>{0});
  CHECK(b.active(-0.75) == std::vector<std::size_t>{0, 1});
  CHECK(b.active(-0.5) == std::vector<std::size_t>{1});
  CHECK(b.active(-0.25) == std::vector<std::size_t>{1, 2});
  CHECK(b.active(0.0) == std::vector<std::size_t>{2});
  CHECK(b.active(0.5).empty());

  SplineBasis point(0, 0.0, 0.0);
  CHECK(point.size() == 2);
  CHECK(point.value(0, 0.0) == 1.0);
  CHECK(point.value(1, 0.0) == 0.0);
  CHECK_THROWS_AS(SplineBasis(-1, 0.0, 1.0), Error);
  CHECK_THROWS_AS(SplineBasis(2, 1.0, 0.0), Error);
}

TEST_CASE("psi2: constant curve and out-of-box samples") {
  Partition part(Box({-1, -1}, {1, 1}), {LogQuantizerParams{}, LogQuantizerParams{}});
  SplineBasis b(3, -0.2, 0.0);
  Tube t = psi2(Segment::constant({0.5, -0.7}, 0.2, 0.01), part, b);
  REQUIRE(t.knots.size() == 5);
  for (StateId id : t.knots)
    CHECK(id == t.knots[0]);
  CHECK(part.cell(t.knots[0]).q[0] == doctest::Approx(0.48));
  CHECK(part.cell(t.knots[0]).q[1] == doctest::Approx(-0.72));

  Segment ramp;
  ramp.spacing = 0.05;
  ramp.samples = {{-0.9, 0}, {-0.5, 0}, {0, 0}, {0.5, 0}, {0.9, 0}};
  Tube r = psi2(ramp, part, b);
  CHECK(part.cell(r.knots.front()).q[0] == doctest::Approx(-0.72));
  CHECK(part.cell(r.knots[2]).q[0] == 0.0);
  CHECK(part.cell(r.knots.back()).q[0] == doctest::Approx(0.72));

  CHECK_THROWS_AS(psi2(Segment::constant({1.5, 0.0}, 0.2, 0.01), part, b), Error);
}

TEST_CASE("time-delay abstraction: setup of the delayed pendulum") {
  auto abs = delayed_pendulum(0.2, 0.2);
  CHECK(abs.partition().size() == 25 - 1 + 25);
  CHECK(abs.basis().size() == 10);
  CHECK(abs.knot_stride() == 3);
  CHECK(abs.history_spacing() == doctest::Approx(0.2 / 27));
  CHECK(abs.input_buffer(3).size() == 1);
  CHECK(abs.inputs().size() == 25);

  Tube init = abs.initial_tube();
  REQUIRE(init.knots.size() == 10);
  for (StateId id : init.knots) {
    const Cell& c = abs.partition().cell(id);
    CHECK(c.zoom_step == doctest::Approx(0.1));
    CHECK(c.box().contains(Vec{-0.7, -0.7}));
  }
  CHECK(abs.theta2(init) == doctest::Approx(0.1));
  CHECK(abs.radius(init) == doctest::Approx(0.2 * std::exp(abs.lipschitz() * 0.2)));

  Segment interp = abs.interpolant(init);
  CHECK(interp.samples.size() == 28);
  CHECK_THROWS_AS(abs.interpolant(Tube{{0, 0}}), Error);
}

TEST_CASE("time-delay abstraction: tau must fit the history grid") {
  TimeDelaySystem sys;
  sys.base = make_system(1, 1, {-1}, {1}, {-1}, {1}, {"-delay(x1, 0.3)"});
  sys.Theta = 0.3;
  sys.xi0 = Segment::constant({0.0}, 0.3, 0.3);
  TimeDelayParams p;
  p.base = fixtures::pendulum_params(0.0);
  p.N = 0; // spacing 0.3/20 = 0.015 does not divide 0.2
  CHECK_THROWS_AS(TimeDelayAbstraction(sys, p), Error);
  p.base.tau = 0.15;
  CHECK_NOTHROW(TimeDelayAbstraction(sys, p));
}

TEST_CASE("time-delay abstraction: zero dynamics keep a tube in place") {
  TimeDelaySystem sys;
  sys.base = make_system(2, 1, {-1, -1}, {1, 1}, {-1}, {1}, {"0*delay(x1, 0.2)", "0"});
  sys.Theta = 0.2;
  sys.xi0 = Segment::constant({0.5, 0.5}, 0.2, 0.2);
  TimeDelayParams p;
  p.base = fixtures::pendulum_params(0.0);
  p.N = 3;
  TimeDelayAbstraction abs(sys, p);
  Tube init = abs.initial_tube();
  for (InputId u = 0; u < abs.inputs().size(); ++u)
    CHECK(TimeDelayAbstraction::contains(abs.successor_cylinder(init, u), init));
  /* L = 0, yet the radius keeps the 2 theta2 quantization term */
  CHECK(abs.lipschitz() == 0.0);
  CHECK(abs.radius(init) == doctest::Approx(2 * abs.theta2(init)));
}

TEST_CASE("time-delay abstraction: without delays it matches the delay-free flow") {
  auto abs = delayed_pendulum(0.0, 0.0);
  CHECK(abs.knot_stride() == 0);
  CHECK(abs.basis().size() == 2);
  auto ode = make_system(2, 1, {-1, -1}, {1, 1}, {-2.5}, {2.5}, {"x2", "-1.96*sin(x1) - 1.5*x2 + 0.1*x2 + u1"});
  for (StateId c = 0; c < abs.partition().size(); c += 5) {
    Tube t{{c, c}};
    for (InputId u : {0u, 7u, 12u, 24u}) {
      Segment next = abs.advance(abs.interpolant(t), u);
      auto ref = integrate(ode, abs.partition().cell(c).q, abs.inputs()[u], 0.2, 20);
      CHECK(std::fabs(next.current()[0] - ref.x[0]) < 1e-9);
      CHECK(std::fabs(next.current()[1] - ref.x[1]) < 1e-9);
    }
  }
  auto ts = abs.explore();
  for (const auto& t : ts.tubes)
    CHECK(t.knots[0] == t.knots[1]);
}

TEST_CASE("time-delay abstraction: exploration budget") {
  auto abs = delayed_pendulum(0.2, 0.2);
  CHECK_THROWS_AS(abs.explore(5), Error);
}

TEST_CASE("time-delay abstraction: the true successor of xi0 is in its cylinder") {
  auto abs = delayed_pendulum(0.2, 0.2);
  const Tube init = abs.initial_tube();
  int inside = 0;
  for (InputId u = 0; u < abs.inputs().size(); ++u) {
    Cylinder cyl = abs.successor_cylinder(init, u);
    Segment next = abs.advance(abs.system().xi0, u);
    bool in_box = true;
    for (std::size_t j = 0; j < abs.basis().size(); ++j)
      in_box = in_box && abs.system().base.state_box.contains(next.at(abs.basis().knot(j)));
    /* a blocked pair only removes an abstract input */
    if (!in_box || cyl.blocked)
      continue;
    CHECK(TimeDelayAbstraction::contains(cyl, abs.locate(next)));
    ++inside;
  }
  CHECK(inside > 0);
}
