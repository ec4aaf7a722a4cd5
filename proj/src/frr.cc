/*
 * frr.cc
 */

#include "symctl/frr.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace symctl {

namespace {

/* input ids of t2 mapped onto t1 by exact value */
std::vector<InputId> match_inputs(const TransitionSystem& t1, const TransitionSystem& t2) {
  std::vector<InputId> map(t2.inputs.size());
  for (InputId v = 0; v < t2.inputs.size(); ++v) {
    auto it = std::find(t1.inputs.begin(), t1.inputs.end(), t2.inputs[v]);
    if (it == t1.inputs.end())
      throw Error("check_frr: input " + format_vec(t2.inputs[v]) +
                  " of the abstraction is not an input of the concrete system (U2 not in U1)");
    map[v] = static_cast<InputId>(it - t1.inputs.begin());
  }
  return map;
}

std::string ids(std::span<const StateId> s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

} // namespace

FiniteFrrResult check_frr_finite(const TransitionSystem& t1, const TransitionSystem& t2,
                                 const std::vector<std::pair<StateId, StateId>>& relation) {
  const auto umap = match_inputs(t1, t2);
  std::map<StateId, std::vector<StateId>> image;
  for (auto [a, b] : relation) {
    if (a >= t1.state_count() || b >= t2.state_count())
      throw Error("check_frr: relation references unknown state pair (" + std::to_string(a) + ", " +
                  std::to_string(b) + ")");
    image[a].push_back(b);
  }
  for (auto& [a, bs] : image)
    std::sort(bs.begin(), bs.end());

  FiniteFrrResult res;
  for (auto [x1, x2] : relation) {
    for (InputId v = 0; v < t2.inputs.size(); ++v) {
      if (!t2.enabled(x2, v))
        continue;
      const InputId u = umap[v];
      if (!t1.enabled(x1, u)) {
        res.pass = false;
        res.counterexample = "(" + std::to_string(x1) + ", " + std::to_string(x2) + ") input " +
                             format_vec(t2.inputs[v]) + " enabled abstractly but not concretely";
        return res;
      }
      auto post2 = t2.post(x2, v);
      for (StateId y1 : t1.post(x1, u)) {
        auto it = image.find(y1);
        if (it == image.end())
          continue;
        for (StateId y2 : it->second)
          if (!std::binary_search(post2.begin(), post2.end(), y2)) {
            res.pass = false;
            res.counterexample = "(" + std::to_string(x1) + ", " + std::to_string(x2) + ") input " +
                                 format_vec(t2.inputs[v]) + ": concrete successor " +
                                 std::to_string(y1) + " maps to " + std::to_string(y2) +
                                 " outside " + ids(post2);
            return res;
          }
      }
    }
  }
  return res;
}

std::string FrrReport::text() const {
  std::ostringstream os;
  os << "seed: " << seed << "\n"
     << "samples: " << samples << "\n"
     << "exits: " << exits << "\n"
     << "violations: " << violations.size() << "\n"
     << "verdict: " << (pass() ? "pass" : "fail") << "\n";
  return os.str();
}

std::string FrrReport::dump() const {
  std::ostringstream os;
  os << "sample\tx\tu\tsuccessor\tabstract\tlanded\tcandidates\n";
  for (const auto& v : violations)
    os << v.sample << '\t' << format_vec(v.x) << '\t' << format_vec(v.u) << '\t'
       << format_vec(v.successor) << '\t' << v.abstract << '\t' << v.landed << '\t' << v.candidates
       << '\n';
  return os.str();
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  /* splitmix64 over the pair */
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + index + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

/* uniform in the closed box; one coordinate in ten is snapped to a face */
Vec draw_in_box(const Cell& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec x(c.lower.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = unit(rng);
    double snap = unit(rng);
    if (snap < 0.05)
      w = 0.0;
    else if (snap < 0.1)
      w = 1.0;
    x[i] = c.lower[i] + w * (c.upper[i] - c.lower[i]);
  }
  return x;
}

std::vector<InputId> enabled_inputs(const TransitionSystem& ts, StateId s) {
  std::vector<InputId> out;
  for (InputId u = 0; u < ts.input_count(); ++u)
    if (ts.enabled(s, u))
      out.push_back(u);
  return out;
}

} // namespace

FrrReport sample_frr_delayfree(const DelayFreeAbstraction& abs, std::size_t samples,
                               std::uint64_t seed) {
  const TransitionSystem& ts = abs.ts();
  const Partition& part = abs.partition();
  FrrReport report;
  report.seed = seed;
  report.samples = samples;

  std::vector<StateId> live;
  for (StateId s = 0; s < ts.state_count(); ++s)
    if (!enabled_inputs(ts, s).empty())
      live.push_back(s);
  if (live.empty() || samples == 0)
    return report;

  struct Outcome {
    bool exit = false;
    std::optional<FrrViolation> violation;
  };
  std::vector<Outcome> outcomes(samples);
  parallel_for(samples, abs.params().workers, [&](std::size_t i) {
    std::mt19937_64 rng(sample_seed(seed, i));
    Vec x;
    StateId s = 0;
    std::vector<InputId> en;
    /* the drawn point may belong to a blocked neighbour on a shared face */
    for (int attempt = 0; attempt < 100 && en.empty(); ++attempt) {
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      x = draw_in_box(ts.cells[live[pick(rng)]], rng);
      s = *part.locate(x);
      en = enabled_inputs(ts, s);
    }
    if (en.empty())
      return;
    std::uniform_int_distribution<std::size_t> pick_u(0, en.size() - 1);
    const InputId u = en[pick_u(rng)];
    const auto& sys = abs.system();
    FlowResult y = integrate(sys, x, ts.inputs[u], abs.params().tau, abs.params().integrator_steps);
    auto d = part.locate(y.x);
    if (!d) {
      outcomes[i].exit = true;
      return;
    }
    auto post = ts.post(s, u);
    if (!std::binary_search(post.begin(), post.end(), *d))
      outcomes[i].violation = FrrViolation{i, x, ts.inputs[u], y.x, std::to_string(s),
                                           std::to_string(*d), ids(post)};
  });
  for (auto& o : outcomes) {
    report.exits += o.exit;
    if (o.violation)
      report.violations.push_back(std::move(*o.violation));
  }
  return report;
}

namespace {

std::string tube_str(const Tube& t) { return ids(t.knots); }

/*
 * a functional inside the tube: one uniform point per knot cell, linear in
 * between, plus jitter of at most theta2 off the knots, clamped to X
 */
Segment draw_functional(const TimeDelayAbstraction& abs, const Tube& tube, std::mt19937_64& rng) {
  const Partition& part = abs.partition();
  const Box& X = abs.system().base.state_box;
  const double t2 = abs.theta2(tube);
  std::uniform_real_distribution<double> jitter(-t2, t2);
  std::vector<Vec> knots;
  for (StateId c : tube.knots)
    knots.push_back(draw_in_box(part.cell(c), rng));
  Segment seg;
  seg.spacing = abs.history_spacing();
  const std::size_t stride = abs.knot_stride();
  if (stride == 0) {
    seg.samples.push_back(knots.back());
    return seg;
  }
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    for (std::size_t k = 0; k < stride; ++k) {
      const double w = static_cast<double>(k) / stride;
      Vec p(knots[j].size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = (1.0 - w) * knots[j][i] + w * knots[j + 1][i];
        if (k > 0)
          p[i] = std::clamp(p[i] + jitter(rng), X.lower[i], X.upper[i]);
      }
      seg.samples.push_back(std::move(p));
    }
  }
  seg.samples.push_back(knots.back());
  return seg;
}

} // namespace

FrrReport sample_frr_timedelay(const TimeDelayAbstraction& abs, std::size_t samples,
                               std::uint64_t seed) {
  FrrReport report;
  report.seed = seed;
  report.samples = samples;
  const std::size_t nu = abs.inputs().size();

  std::vector<Tube> pool{abs.initial_tube()};
  std::map<Tube, std::size_t> known{{pool[0], 0}};
  std::map<Tube, std::vector<Cylinder>> cache;
  auto cylinders = [&](const Tube& t) -> const std::vector<Cylinder>& {
    auto it = cache.find(t);
    if (it != cache.end())
      return it->second;
    std::vector<Cylinder> c(nu);
    parallel_for(nu, abs.params().base.workers, [&](std::size_t u) { c[u] = abs.successor_cylinder(t, u); });
    return cache.emplace(t, std::move(c)).first->second;
  };

  const std::size_t pool_limit = 10000;
  for (std::size_t i = 0; i < samples; ++i) {
    std::mt19937_64 rng(sample_seed(seed, i));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const Tube tube = pool[pick(rng)];
    Segment x = draw_functional(abs, tube, rng);
    /* the drawn functional is what F sees; use its own tube */
    const Tube here = abs.locate(x);
    const auto& cyl = cylinders(here);
    std::vector<InputId> en;
    for (InputId u = 0; u < nu; ++u)
      if (!cyl[u].blocked)
        en.push_back(u);
    if (en.empty())
      continue;
    std::uniform_int_distribution<std::size_t> pick_u(0, en.size() - 1);
    const InputId u = en[pick_u(rng)];
    Segment y = abs.advance(x, u);
    const Box& X = abs.system().base.state_box;
    if (!std::all_of(y.samples.begin(), y.samples.end(), [&](const Vec& p) { return X.contains(p); })) {
      ++report.exits;
      continue;
    }
    const Tube next = abs.locate(y);
    if (!TimeDelayAbstraction::contains(cyl[u], next)) {
      std::string cand;
      for (const auto& k : cyl[u].knots)
        cand += ids(k);
      report.violations.push_back(FrrViolation{i, x.current(), abs.inputs()[u], y.current(),
                                               tube_str(here), tube_str(next), cand});
      continue;
    }
    if (pool.size() < pool_limit && known.emplace(next, pool.size()).second)
      pool.push_back(next);
  }
  return report;
}

} // namespace symctl
