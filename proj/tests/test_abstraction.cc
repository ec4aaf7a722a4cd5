#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "fixtures.hh"
#include "symctl/model_io.hh"

using namespace symctl;
using fixtures::pendulum;
using fixtures::pendulum_params;

TEST_CASE("growth bound: delay-free examples") {
  auto r = growth_bound_delayfree(Vec{0.0, 0.0}, 0.2, 6.0, 0.2);
  CHECK(r[0] == doctest::Approx(0.8300292306841368));
  CHECK(r[1] == doctest::Approx(0.8300292306841368));
  auto r2 = growth_bound_delayfree(Vec{0.48, 0.0}, 0.2, 6.0, 0.2);
  CHECK(r2[0] == doctest::Approx(0.39841403072838566));
  CHECK(r2[1] == doctest::Approx(0.8300292306841368));
  auto r3 = growth_bound_delayfree(Vec{-0.72, 0.0}, 0.2, 6.0, 0.0);
  CHECK(r3[0] == doctest::Approx(0.25 * 0.72));
  CHECK(r3[1] == doctest::Approx(0.25));
}

TEST_CASE("input lattice") {
  auto u = input_lattice(Box({-2.5}, {2.5}), InputQuantization{});
  REQUIRE(u.size() == 25);
  CHECK(u.front()[0] == doctest::Approx(-2.4));
  CHECK(u.back()[0] == doctest::Approx(2.4));
  for (double expected : {1.4, -1.4, 2.2, 2.4, -2.4, -2.0, 1.2, -1.0, 1.0, 1.6, 0.4})
    CHECK(std::any_of(u.begin(), u.end(), [&](const Vec& v) { return std::fabs(v[0] - expected) < 1e-12; }));
  InputQuantization lq;
  lq.kind = InputQuantization::Kind::Logarithmic;
  auto l = input_lattice(Box({-1.0, 0.0}, {1.0, 1.0}), lq);
  /* per coordinate {-0.72,-0.48,0,0.48,0.72} x {0,0.48,0.72} */
  CHECK(l.size() == 15);
}

TEST_CASE("delay-free abstraction: pendulum model") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  const auto& ts = abs.ts();
  CHECK(ts.state_count() == 25);
  CHECK(ts.input_count() == 25);
  CHECK(ts.initial.size() == 25);

  const StateId center = *abs.partition().locate(Vec{0, 0});
  CHECK(center == 12);
  InputId zero = 12, up = 19;
  REQUIRE(ts.inputs[zero][0] == 0.0);
  REQUIRE(std::fabs(ts.inputs[up][0] - 1.4) < 1e-12);

  auto loop = ts.post(center, zero);
  CHECK(std::binary_search(loop.begin(), loop.end(), center));

  /* [0.025 +- 0.830] x [0.240 +- 0.830] meets 5 x 4 cells */
  auto post = ts.post(center, up);
  CHECK(post.size() == 20);
  Box expect({0.02523589 - 0.83003, 0.23875935 - 0.83003}, {0.02523589 + 0.83003, 0.23875935 + 0.83003});
  for (const auto& c : ts.cells) {
    bool listed = std::binary_search(post.begin(), post.end(), c.id);
    CHECK(listed == c.box().intersects(expect.intersection(Box({-1, -1}, {1, 1}))));
  }

  /* (-0.48, 0) -> 1.4 -> (0, 0) is a transition */
  const StateId left = *abs.partition().locate(Vec{-0.48, 0});
  auto p2 = ts.post(left, up);
  CHECK(std::binary_search(p2.begin(), p2.end(), center));
}

TEST_CASE("delay-free abstraction: blocking and ids") {
  DelayFreeAbstraction abs(pendulum(), pendulum_params());
  const auto& ts = abs.ts();
  for (StateId s = 0; s < ts.state_count(); ++s)
    for (InputId u = 0; u < ts.input_count(); ++u) {
      auto end = abs.endpoint(s, u);
      CHECK(ts.post(s, u).empty() == !abs.system().state_box.contains(end.x));
      for (StateId d : ts.post(s, u))
        CHECK(d < ts.state_count());
      CHECK(std::is_sorted(ts.post(s, u).begin(), ts.post(s, u).end()));
    }
}

TEST_CASE("delay-free abstraction: monotone in the Lipschitz constant") {
  DelayFreeAbstraction a(pendulum(), pendulum_params(3.0));
  DelayFreeAbstraction b(pendulum(), pendulum_params(6.0));
  for (std::size_t k = 0; k < a.ts().successors.size(); ++k)
    CHECK(std::includes(b.ts().successors[k].begin(), b.ts().successors[k].end(),
                        a.ts().successors[k].begin(), a.ts().successors[k].end()));
}

TEST_CASE("delay-free abstraction: deterministic across worker counts") {
  auto p1 = pendulum_params(0.0);
  p1.workers = 1;
  auto p8 = pendulum_params(0.0);
  p8.workers = 8;
  DelayFreeAbstraction a(pendulum(), p1), b(pendulum(), p8);
  CHECK(serialize_model(a.ts()) == serialize_model(b.ts()));
  CHECK(serialize_model(a.ts()) == serialize_model(DelayFreeAbstraction(pendulum(), p1).ts()));
}

TEST_CASE("refine: counts, identity and incremental rebuild") {
  DelayFreeAbstraction base(pendulum(), pendulum_params());
  auto same = base.refine({});
  CHECK(serialize_model(same.ts()) == serialize_model(base.ts()));

  auto center = base.refine({{12, {1, 1.0, 0.3}}});
  CHECK(center.ts().state_count() == 33);
  CHECK(center.partition().cells_of_log(12).size() == 9);
  auto corner = base.refine({{0, {10, 1.0, 0.1}}});
  CHECK(corner.ts().state_count() == 49);
  CHECK(corner.partition().cells_of_log(0).size() == 25);
  CHECK_THROWS_AS(base.refine({{99, {10, 1.0, 0.1}}}), Error);

  /* the incremental result equals a from-scratch computation of every pair */
  for (const auto* r : {&center, &corner}) {
    for (StateId s = 0; s < r->ts().state_count(); ++s)
      for (InputId u = 0; u < r->ts().input_count(); ++u) {
        auto end = r->endpoint(s, u);
        std::vector<StateId> expect;
        if (r->system().state_box.contains(end.x)) {
          Vec rad = r->radius(s), lo = end.x, hi = end.x;
          for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] -= rad[i];
            hi[i] += rad[i];
          }
          expect = r->partition().cells_intersecting(Box(lo, hi).intersection(r->system().state_box));
        }
        auto got = r->ts().post(s, u);
        REQUIRE(std::vector<StateId>(got.begin(), got.end()) == expect);
      }
  }

  /* un-refining gives the base model back */
  auto back = center.refine({{12, {1, 1.0, 0.0}}});
  CHECK(serialize_model(back.ts()) == serialize_model(base.ts()));
}

TEST_CASE("refine: concrete transitions stay covered") {
  DelayFreeAbstraction base(pendulum(), pendulum_params());
  auto ref = base.refine({{12, {1, 1.0, 0.3}}, {0, {10, 1.0, 0.1}}});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    Vec x{coord(rng), coord(rng)};
    InputId u = rng() % base.ts().input_count();
    StateId s0 = *base.partition().locate(x), s1 = *ref.partition().locate(x);
    if (base.ts().post(s0, u).empty() || ref.ts().post(s1, u).empty())
      continue;
    auto y = integrate(base.system(), x, base.ts().inputs[u], 0.2, 20);
    auto d0 = base.partition().locate(y.x);
    auto d1 = ref.partition().locate(y.x);
    if (!d0)
      continue;
    ++checked;
    auto p0 = base.ts().post(s0, u);
    auto p1 = ref.ts().post(s1, u);
    CHECK(std::binary_search(p0.begin(), p0.end(), *d0));
    CHECK(std::binary_search(p1.begin(), p1.end(), *d1));
  }
  CHECK(checked > 500);
}
