/*
 * timedelay.cc
 */

#include "symctl/timedelay.hh"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <iterator>
#include <string>

namespace symctl {

TimeDelayAbstraction::TimeDelayAbstraction(TimeDelaySystem sys, TimeDelayParams params)
    : sys_(std::move(sys)), params_(std::move(params)) {
  sys_.validate();
  AbstractionParams& base = params_.base;
  const std::size_t n = sys_.base.n;
  if (!(base.tau > 0.0))
    throw Error("abstraction: tau must be positive");
  if (base.log.size() == 1 && n > 1)
    base.log.assign(n, base.log.front());
  if (base.log.size() != n)
    throw Error("abstraction: need one logarithmic quantizer per state coordinate");

  const double ratio_r = sys_.r / base.tau;
  if (std::fabs(ratio_r - std::round(ratio_r)) > 1e-9)
    throw Error("system: input delay r must be an integer multiple of tau");

  if (params_.N < 0) {
    int M = 0;
    for (const auto& [k, z] : params_.zoom)
      M = std::max(M, z.M);
    params_.N = M > 0 ? std::min(8, M * M) : 8;
  }
  if (sys_.Theta == 0.0)
    params_.N = 0;
  basis_ = SplineBasis(params_.N, -sys_.Theta, 0.0);

  if (sys_.Theta > 0.0) {
    const std::size_t intervals = static_cast<std::size_t>(params_.N) + 1;
    stride_ = static_cast<std::size_t>(std::ceil(20.0 / intervals));
    spacing_ = sys_.Theta / (intervals * stride_);
    const double ratio = base.tau / spacing_;
    if (std::fabs(ratio - std::round(ratio)) > 1e-6)
      throw Error("abstraction: grid incompatibility, tau is not a multiple of the history spacing " +
                  std::to_string(spacing_));
  } else {
    stride_ = 0;
    spacing_ = 0.0;
  }

  partition_ = Partition(sys_.base.state_box, base.log).refined(params_.zoom);
  inputs_ = input_lattice(sys_.base.input_box, base.input);
  L_ = estimate_lipschitz(sys_.base, sys_.base.state_box, base.lipschitz);

  /* resample xi0 onto the history grid */
  Segment xi;
  xi.spacing = spacing_;
  const std::size_t count = sys_.Theta > 0.0 ? (static_cast<std::size_t>(params_.N) + 1) * stride_ + 1 : 1;
  for (std::size_t k = 0; k < count; ++k)
    xi.samples.push_back(sys_.xi0.at(-sys_.Theta + k * spacing_));
  sys_.xi0 = std::move(xi);
}

Tube TimeDelayAbstraction::initial_tube() const { return locate(sys_.xi0); }

Segment TimeDelayAbstraction::interpolant(const Tube& tube) const {
  if (tube.knots.size() != basis_.size())
    throw Error("tube has " + std::to_string(tube.knots.size()) + " knots, expected " +
                std::to_string(basis_.size()));
  Segment seg;
  seg.spacing = spacing_;
  if (stride_ == 0) {
    seg.samples.push_back(partition_.cell(tube.knots[0]).q);
    return seg;
  }
  for (std::size_t j = 0; j + 1 < tube.knots.size(); ++j) {
    const Vec& a = partition_.cell(tube.knots[j]).q;
    const Vec& b = partition_.cell(tube.knots[j + 1]).q;
    for (std::size_t k = 0; k < stride_; ++k) {
      const double w = static_cast<double>(k) / stride_;
      Vec p(a.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        p[i] = (1.0 - w) * a[i] + w * b[i];
      seg.samples.push_back(std::move(p));
    }
  }
  seg.samples.push_back(partition_.cell(tube.knots.back()).q);
  return seg;
}

double TimeDelayAbstraction::theta2(const Tube& tube) const {
  double t2 = 0.0;
  for (StateId id : tube.knots) {
    const Cell& c = partition_.cell(id);
    double d = c.zoom_step;
    for (std::size_t i = 0; i < c.q.size(); ++i)
      d = std::max({d, std::fabs(c.q[i] - c.lower[i]), std::fabs(c.upper[i] - c.q[i])});
    t2 = std::max(t2, d);
  }
  return t2;
}

double TimeDelayAbstraction::radius(const Tube& tube) const {
  return 2.0 * theta2(tube) * std::exp(L_ * params_.base.tau) * params_.base.radius_scale;
}

std::vector<Vec> TimeDelayAbstraction::input_buffer(InputId u) const {
  const std::size_t count = static_cast<std::size_t>(std::llround(sys_.r / params_.base.tau));
  return std::vector<Vec>(count, inputs_.at(u));
}

Segment TimeDelayAbstraction::advance(const Segment& x, InputId u) const {
  auto buffer = input_buffer(u);
  return integrate_delay(sys_, x, buffer, inputs_.at(u), params_.base.tau,
                         params_.base.integrator_steps);
}

Cylinder TimeDelayAbstraction::successor_cylinder(const Tube& tube, InputId u) const {
  Cylinder cyl;
  const Segment next = advance(interpolant(tube), u);
  const double rad = radius(tube);
  const Box& X = sys_.base.state_box;
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    const Vec& p = next.samples[j * stride_];
    if (!X.contains(p)) {
      cyl.blocked = true;
      cyl.knots.clear();
      return cyl;
    }
    Vec lo = p, hi = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
      lo[i] -= rad;
      hi[i] += rad;
    }
    cyl.knots.push_back(partition_.cells_intersecting(Box(lo, hi).intersection(X)));
  }
  return cyl;
}

bool TimeDelayAbstraction::contains(const Cylinder& c, const Tube& t) {
  if (c.blocked || c.knots.size() != t.knots.size())
    return false;
  for (std::size_t j = 0; j < t.knots.size(); ++j)
    if (!std::binary_search(c.knots[j].begin(), c.knots[j].end(), t.knots[j]))
      return false;
  return true;
}

namespace {

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

} // namespace

TransitionSystem TimeDelayAbstraction::explore(std::size_t budget) const {
  TransitionSystem ts;
  ts.kind = TransitionSystem::Kind::Tubes;
  ts.cells = partition_.cells();
  ts.inputs = inputs_;

  std::map<Tube, StateId> index;
  std::deque<StateId> queue;
  auto intern = [&](const Tube& t) {
    auto [it, fresh] = index.emplace(t, ts.tubes.size());
    if (fresh) {
      if (ts.tubes.size() >= budget)
        throw BudgetExceeded("exploration exceeds state budget of " + std::to_string(budget) +
                             " tubes");
      ts.tubes.push_back(t);
      queue.push_back(it->second);
    }
    return it->second;
  };
  intern(initial_tube());
  ts.initial = {0};

  /* continuity: adjacent knot cells must touch */
  auto touching = [&](StateId a, StateId b) {
    return a == b || partition_.cell(a).box().intersects(partition_.cell(b).box());
  };

  const std::size_t nu = inputs_.size();
  std::vector<std::vector<std::vector<StateId>>> succ;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    if (succ.size() <= s)
      succ.resize(s + 1);
    succ[s].assign(nu, {});
    for (InputId u = 0; u < nu; ++u) {
      const Cylinder cyl = successor_cylinder(ts.tubes[s], u);
      if (cyl.blocked)
        continue;
      std::vector<StateId>& out = succ[s][u];
      if (stride_ == 0) {
        std::vector<StateId> common = cyl.knots[0];
        for (const auto& k : cyl.knots) {
          std::vector<StateId> tmp;
          std::set_intersection(common.begin(), common.end(), k.begin(), k.end(), std::back_inserter(tmp));
          common = std::move(tmp);
        }
        for (StateId c : common)
          out.push_back(intern(Tube{std::vector<StateId>(basis_.size(), c)}));
      } else {
        Tube cur;
        std::function<void(std::size_t)> rec = [&](std::size_t j) {
          if (j == cyl.knots.size()) {
            out.push_back(intern(cur));
            return;
          }
          for (StateId c : cyl.knots[j]) {
            if (j > 0 && !touching(cur.knots.back(), c))
              continue;
            cur.knots.push_back(c);
            rec(j + 1);
            cur.knots.pop_back();
          }
        };
        rec(0);
      }
      std::sort(out.begin(), out.end());
    }
  }

  ts.successors.assign(ts.tubes.size() * nu, {});
  for (StateId s = 0; s < ts.tubes.size(); ++s)
    for (InputId u = 0; u < nu; ++u)
      ts.successors[s * nu + u] = std::move(succ[s][u]);
  return ts;
}

} // namespace symctl
