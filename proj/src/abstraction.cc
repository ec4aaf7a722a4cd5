/*
 * abstraction.cc
 */

#include "symctl/abstraction.hh"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace symctl {

std::vector<Vec> input_lattice(const Box& U, const InputQuantization& iq) {
  std::vector<Vec> axes;
  for (std::size_t i = 0; i < U.dim(); ++i) {
    Vec axis;
    const double lo = U.lower[i], hi = U.upper[i];
    if (iq.kind == InputQuantization::Kind::Uniform) {
      if (!(iq.mu > 0.0))
        throw Error("input quantization: mu must be positive");
      const long kmin = static_cast<long>(std::ceil(lo / iq.mu - 1e-9));
      const long kmax = static_cast<long>(std::floor(hi / iq.mu + 1e-9));
      for (long k = kmin; k <= kmax; ++k)
        axis.push_back(k == 0 ? 0.0 : k * iq.mu);
    } else {
      iq.log.validate();
      Vec pos;
      for (int j = 1; iq.log.level(j) <= std::max(std::fabs(lo), std::fabs(hi)); ++j)
        pos.push_back(iq.log.level(j));
      for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (-*it >= lo)
          axis.push_back(-*it);
      if (lo <= 0.0 && hi >= 0.0)
        axis.push_back(0.0);
      for (double v : pos)
        if (v <= hi)
          axis.push_back(v);
    }
    if (axis.empty())
      throw Error("input quantization leaves coordinate " + std::to_string(i + 1) + " empty");
    axes.push_back(std::move(axis));
  }

  std::vector<Vec> out{Vec{}};
  for (const auto& axis : axes) {
    std::vector<Vec> next;
    for (const auto& p : out)
      for (double v : axis) {
        Vec q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

Vec growth_bound_delayfree(std::span<const double> q, double eta, double L, double tau) {
  const double theta1 = eta / (1.0 - eta);
  const double grow = std::exp(L * tau);
  Vec r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    r[i] = theta1 * grow * (std::fabs(q[i]) + (q[i] == 0.0 ? 1.0 : 0.0));
  return r;
}

std::size_t TransitionSystem::transition_count() const {
  std::size_t total = 0;
  for (const auto& s : successors)
    total += s.size();
  return total;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0)
    return requested;
  if (const char* env = std::getenv("SYMCTL_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0)
      return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

DelayFreeAbstraction::DelayFreeAbstraction(ControlSystem sys, AbstractionParams params)
    : sys_(std::move(sys)), params_(std::move(params)) {
  sys_.validate();
  if (!(params_.tau > 0.0))
    throw Error("abstraction: tau must be positive");
  if (params_.log.size() == 1 && sys_.n > 1)
    params_.log.assign(sys_.n, params_.log.front());
  if (params_.log.size() != sys_.n)
    throw Error("abstraction: need one logarithmic quantizer per state coordinate");
  if (params_.radius_scale < 0.0)
    throw Error("abstraction: radius scale must be nonnegative");

  partition_ = Partition(sys_.state_box, params_.log);
  ts_.kind = TransitionSystem::Kind::Cells;
  ts_.cells = partition_.cells();
  ts_.inputs = input_lattice(sys_.input_box, params_.input);
  for (StateId s = 0; s < ts_.cells.size(); ++s)
    ts_.initial.push_back(s);

  std::vector<StateId> all(ts_.cells.size());
  for (StateId s = 0; s < all.size(); ++s)
    all[s] = s;
  L_.assign(all.size(), 0.0);
  estimate_all(all);

  const std::size_t nu = ts_.inputs.size();
  ts_.successors.assign(all.size() * nu, {});
  parallel_for(all.size(), params_.workers, [&](std::size_t s) {
    for (InputId u = 0; u < nu; ++u)
      ts_.successors[s * nu + u] = compute(s, u);
  });
}

void DelayFreeAbstraction::estimate_all(const std::vector<StateId>& which) {
  parallel_for(which.size(), params_.workers, [&](std::size_t i) {
    const StateId s = which[i];
    L_[s] = estimate_lipschitz(sys_, ts_.cells[s].box(), params_.lipschitz);
  });
}

FlowResult DelayFreeAbstraction::endpoint(StateId s, InputId u) const {
  return integrate(sys_, ts_.cells.at(s).q, ts_.inputs.at(u), params_.tau, params_.integrator_steps);
}

Vec DelayFreeAbstraction::radius(StateId s) const {
  const Cell& c = ts_.cells.at(s);
  const double L = L_.at(s);
  Vec r;
  if (c.zoom_step > 0.0) {
    double dist = 2.0 * c.zoom_step;
    for (std::size_t i = 0; i < c.q.size(); ++i)
      dist = std::max({dist, std::fabs(c.q[i] - c.lower[i]), std::fabs(c.upper[i] - c.q[i])});
    r.assign(c.q.size(), std::exp(L * params_.tau) * dist);
  } else {
    r.resize(c.q.size());
    for (std::size_t i = 0; i < c.q.size(); ++i)
      r[i] = growth_bound_delayfree(std::span<const double>(&c.q[i], 1), params_.log[i].eta, L,
                                    params_.tau)[0];
  }
  for (double& v : r)
    v *= params_.radius_scale;
  return r;
}

std::vector<StateId> DelayFreeAbstraction::compute(StateId s, InputId u) const {
  FlowResult end = endpoint(s, u);
  if (!sys_.state_box.contains(end.x))
    return {};
  Vec r = radius(s);
  Vec lo(end.x.size()), hi(end.x.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] = end.x[i] - r[i];
    hi[i] = end.x[i] + r[i];
  }
  return partition_.cells_intersecting(Box(lo, hi).intersection(sys_.state_box));
}

namespace {

bool same_zoom(const ZoomQuantizerParams& a, const ZoomQuantizerParams& b) {
  return a.M == b.M && a.Lambda == b.Lambda && a.delta == b.delta;
}

} // namespace

DelayFreeAbstraction DelayFreeAbstraction::refine(const ZoomAssignments& assignments) const {
  DelayFreeAbstraction out;
  out.sys_ = sys_;
  out.params_ = params_;
  out.partition_ = partition_.refined(assignments);

  /* log cells whose zoom grid differs between the two partitions */
  const std::size_t nlog = partition_.log_cell_count();
  std::vector<bool> changed(nlog, false);
  for (std::size_t k = 0; k < nlog; ++k) {
    auto a = partition_.assignments().find(k);
    auto b = out.partition_.assignments().find(k);
    bool ha = a != partition_.assignments().end(), hb = b != out.partition_.assignments().end();
    changed[k] = ha != hb || (ha && !same_zoom(a->second, b->second));
  }

  out.ts_.kind = TransitionSystem::Kind::Cells;
  out.ts_.cells = out.partition_.cells();
  out.ts_.inputs = ts_.inputs;
  for (StateId s = 0; s < out.ts_.cells.size(); ++s)
    out.ts_.initial.push_back(s);

  /* old id -> new id for cells of unchanged log cells */
  auto remap = [&](StateId old) {
    const Cell& c = ts_.cells[old];
    auto olds = partition_.cells_of_log(c.parent);
    std::size_t offset = old - olds.front();
    return out.partition_.cells_of_log(c.parent)[offset];
  };

  const std::size_t nu = ts_.inputs.size();
  const std::size_t ns = out.ts_.cells.size();
  out.L_.assign(ns, 0.0);
  out.ts_.successors.assign(ns * nu, {});
  std::vector<StateId> fresh, recompute;
  for (std::size_t k = 0; k < nlog; ++k) {
    auto news = out.partition_.cells_of_log(k);
    if (changed[k]) {
      fresh.insert(fresh.end(), news.begin(), news.end());
      recompute.insert(recompute.end(), news.begin(), news.end());
      continue;
    }
    auto olds = partition_.cells_of_log(k);
    for (std::size_t j = 0; j < olds.size(); ++j) {
      const StateId o = olds[j], s = news[j];
      out.L_[s] = L_[o];
      bool touches = false;
      for (InputId u = 0; u < nu && !touches; ++u)
        for (StateId d : ts_.post(o, u))
          if (changed[ts_.cells[d].parent]) {
            touches = true;
            break;
          }
      if (touches) {
        recompute.push_back(s);
        continue;
      }
      for (InputId u = 0; u < nu; ++u) {
        auto& dst = out.ts_.successors[s * nu + u];
        for (StateId d : ts_.post(o, u))
          dst.push_back(remap(d));
        std::sort(dst.begin(), dst.end());
      }
    }
  }

  out.estimate_all(fresh);
  parallel_for(recompute.size(), params_.workers, [&](std::size_t i) {
    const StateId s = recompute[i];
    for (InputId u = 0; u < nu; ++u)
      out.ts_.successors[s * nu + u] = out.compute(s, u);
  });
  return out;
}

} // namespace symctl
