/*
 * dynamics.cc
 */

#include "symctl/dynamics.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace symctl {

void ControlSystem::validate(bool allow_delay) const {
  if (n == 0 || m == 0)
    throw Error("system: n and m must be positive");
  if (state_box.dim() != n || input_box.dim() != m)
    throw Error("system: box dimensions do not match n, m");
  if (state_box.empty() || input_box.empty())
    throw Error("system: empty state or input box");
  if (field.size() != n)
    throw Error("system: need exactly n field expressions, got " + std::to_string(field.size()));
  if (!allow_delay && has_delay())
    throw Error("system: delay terms require a time-delay system");
}

bool ControlSystem::has_delay() const {
  return std::any_of(field.begin(), field.end(), [](const auto& e) { return e.has_delay(); });
}

Vec ControlSystem::rhs(std::span<const double> x, std::span<const double> u,
                       const expr::History* history) const {
  Vec dx(n);
  for (std::size_t i = 0; i < n; ++i)
    dx[i] = field[i].evaluate(x, u, history);
  return dx;
}

Vec Segment::at(double t) const {
  if (samples.empty())
    throw Error("segment: empty");
  if (samples.size() == 1 || spacing <= 0.0)
    return samples.back();
  const double s = (t + span()) / spacing;
  if (s < -1e-9 || s > samples.size() - 1 + 1e-9)
    throw Error("segment: time " + std::to_string(t) + " outside [-" + std::to_string(span()) + ", 0]");
  std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, double(samples.size() - 2)));
  double w = std::clamp(s - i, 0.0, 1.0);
  Vec out(samples[i].size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (1.0 - w) * samples[i][k] + w * samples[i + 1][k];
  return out;
}

Segment Segment::constant(const Vec& x, double span, double spacing) {
  Segment s;
  s.spacing = span > 0.0 ? spacing : 0.0;
  std::size_t count = span > 0.0 ? static_cast<std::size_t>(std::llround(span / spacing)) + 1 : 1;
  s.samples.assign(count, x);
  return s;
}

void TimeDelaySystem::validate() const {
  base.validate(true);
  if (Theta < 0.0 || r < 0.0)
    throw Error("system: delays must be nonnegative");
  for (const auto& e : base.field)
    if (e.max_delay() > Theta + 1e-12)
      throw Error("system: delay " + std::to_string(e.max_delay()) + " exceeds Theta = " +
                  std::to_string(Theta));
  if (xi0.samples.empty())
    throw Error("system: initial functional xi0 has no samples");
  if (std::fabs(xi0.span() - Theta) > 1e-9)
    throw Error("system: xi0 must cover [-Theta, 0]");
  for (const auto& x : xi0.samples)
    if (!base.state_box.contains(x, 1e-12))
      throw Error("system: xi0 leaves the state box at " + format_vec(x));
}

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

[[noreturn]] void non_finite(double t, std::span<const double> x) {
  throw NumericalError("non-finite derivative at t = " + std::to_string(t) + ", x = " + format_vec(x));
}

} // namespace

FlowResult integrate(const ControlSystem& sys, std::span<const double> x0,
                     std::span<const double> u, double tau, int steps) {
  if (steps < 1)
    throw Error("integrate: steps must be >= 1");
  const std::size_t n = sys.n;
  const double h = tau / steps;
  FlowResult res{Vec(x0.begin(), x0.end()), false};
  Vec& x = res.x;
  Vec tmp(n);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    Vec k1 = sys.rhs(x, u);
    if (!finite(k1))
      non_finite(t, x);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + 0.5 * h * k1[i];
    Vec k2 = sys.rhs(tmp, u);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + 0.5 * h * k2[i];
    Vec k3 = sys.rhs(tmp, u);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + h * k3[i];
    Vec k4 = sys.rhs(tmp, u);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!finite(x))
      non_finite(t + h, x);
    if (!sys.state_box.contains(x))
      res.left_domain = true;
  }
  return res;
}

double default_history_spacing(double Theta) {
  if (Theta <= 0.0)
    return 0.0;
  return std::max(Theta / 20.0, 1e-4);
}

namespace {

/*
 * uniform grid of points from t0 on; the tail between the last stored
 * point and the RK stage being evaluated is interpolated linearly
 */
class DenseHistory : public expr::History {
public:
  DenseHistory(const std::vector<Vec>& pts, double t0, double h) : pts_(pts), t0_(t0), h_(h) {}

  void set_stage(double t, const Vec* x) {
    t_stage_ = t;
    x_stage_ = x;
  }

  double value(std::size_t var, double theta) const override {
    const double s = t_stage_ - theta;
    const double t_last = t0_ + h_ * (pts_.size() - 1);
    if (s > t_last + 1e-12) {
      const double dt = t_stage_ - t_last;
      double w = dt > 0.0 ? (s - t_last) / dt : 1.0;
      return (1.0 - w) * pts_.back()[var] + w * (*x_stage_)[var];
    }
    if (pts_.size() == 1 || h_ <= 0.0) {
      if (s < t0_ - 1e-9)
        throw Error("history gap: requested delay " + std::to_string(theta) + " beyond stored history");
      return pts_.front()[var];
    }
    double idx = (s - t0_) / h_;
    if (idx < -1e-9)
      throw Error("history gap: requested delay " + std::to_string(theta) + " beyond stored history");
    std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(idx), 0.0, double(pts_.size() - 2)));
    double w = std::clamp(idx - i, 0.0, 1.0);
    return (1.0 - w) * pts_[i][var] + w * pts_[i + 1][var];
  }

private:
  const std::vector<Vec>& pts_;
  double t0_;
  double h_;
  double t_stage_ = 0.0;
  const Vec* x_stage_ = nullptr;
};

} // namespace

Segment integrate_delay(const TimeDelaySystem& sys, const Segment& history,
                        std::span<const Vec> u_past, std::span<const double> u_now, double tau,
                        int steps) {
  const ControlSystem& f = sys.base;
  const std::size_t n = f.n;
  if (history.samples.empty())
    throw Error("integrate_delay: empty history");
  if (std::fabs(history.span() - sys.Theta) > 1e-9)
    throw Error("integrate_delay: history must cover [-Theta, 0]");

  double h = 0.0;
  int count = 0;
  if (sys.Theta > 0.0) {
    h = history.spacing;
    double ratio = tau / h;
    count = static_cast<int>(std::llround(ratio));
    if (count < 1 || std::fabs(ratio - count) > 1e-6)
      throw Error("integrate_delay: grid incompatibility, tau = " + std::to_string(tau) +
                  " is not a multiple of the history spacing " + std::to_string(h));
  } else {
    if (steps < 1)
      throw Error("integrate_delay: steps must be >= 1");
    count = steps;
    h = tau / steps;
  }

  const std::size_t buffered = sys.r > 0.0 ? static_cast<std::size_t>(std::llround(sys.r / tau)) : 0;
  if (u_past.size() != buffered)
    throw Error("integrate_delay: input buffer must hold r/tau = " + std::to_string(buffered) +
                " entries, got " + std::to_string(u_past.size()));
  std::span<const double> u = buffered > 0 ? std::span<const double>(u_past.front()) : u_now;

  std::vector<Vec> pts(history.samples.begin(), history.samples.end());
  pts.reserve(pts.size() + count);
  DenseHistory dense(pts, -history.span(), h);

  Vec tmp(n);
  for (int s = 0; s < count; ++s) {
    const double t = s * h;
    const Vec x = pts.back();
    dense.set_stage(t, &x);
    Vec k1 = f.rhs(x, u, &dense);
    if (!finite(k1))
      non_finite(t, x);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + 0.5 * h * k1[i];
    dense.set_stage(t + 0.5 * h, &tmp);
    Vec k2 = f.rhs(tmp, u, &dense);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + 0.5 * h * k2[i];
    Vec k3 = f.rhs(tmp, u, &dense);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + h * k3[i];
    dense.set_stage(t + h, &tmp);
    Vec k4 = f.rhs(tmp, u, &dense);
    Vec next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!finite(next))
      non_finite(t + h, next);
    pts.push_back(std::move(next));
  }

  Segment out;
  out.spacing = history.spacing;
  out.samples.assign(pts.end() - static_cast<std::ptrdiff_t>(history.samples.size()), pts.end());
  return out;
}

namespace {

/* delayed slots take independent values for the Jacobian */
class SlotHistory : public expr::History {
public:
  SlotHistory(const std::vector<expr::DelayTerm>& slots, const Vec& values)
      : slots_(slots), values_(values) {}
  double value(std::size_t var, double theta) const override {
    auto it = std::lower_bound(slots_.begin(), slots_.end(), expr::DelayTerm{var, theta});
    return values_[static_cast<std::size_t>(it - slots_.begin())];
  }

private:
  const std::vector<expr::DelayTerm>& slots_;
  const Vec& values_;
};

std::vector<Vec> grid3(const Box& box) {
  std::vector<Vec> pts{Vec{}};
  for (std::size_t i = 0; i < box.dim(); ++i) {
    std::vector<Vec> next;
    for (const auto& p : pts)
      for (double v : {box.lower[i], 0.5 * (box.lower[i] + box.upper[i]), box.upper[i]}) {
        Vec q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    pts = std::move(next);
  }
  return pts;
}

} // namespace

double estimate_lipschitz(const ControlSystem& sys, const Box& cell, const LipschitzSpec& spec) {
  if (spec.mode == LipschitzMode::UserConstant) {
    if (!(spec.constant >= 0.0))
      throw Error("Lipschitz constant must be nonnegative");
    return spec.constant;
  }

  std::vector<expr::DelayTerm> slots;
  for (const auto& e : sys.field)
    for (const auto& d : e.delay_terms())
      slots.push_back(d);
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

  const std::size_t n = sys.n;
  double best = 0.0;
  for (const auto& x : grid3(cell)) {
    for (const auto& u : grid3(sys.input_box)) {
      /* argument vector: state followed by delayed slots */
      Vec args = x;
      for (const auto& s : slots)
        args.push_back(x[s.var]);
      auto eval = [&](const Vec& a) {
        Vec xs(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
        Vec sv(a.begin() + static_cast<std::ptrdiff_t>(n), a.end());
        SlotHistory hist(slots, sv);
        return sys.rhs(xs, u, &hist);
      };
      Vec row(n, 0.0);
      for (std::size_t j = 0; j < args.size(); ++j) {
        const double step = 1e-6 * std::max(1.0, std::fabs(args[j]));
        Vec ap = args, am = args;
        ap[j] += step;
        am[j] -= step;
        Vec fp = eval(ap), fm = eval(am);
        for (std::size_t i = 0; i < n; ++i) {
          double d = (fp[i] - fm[i]) / (2.0 * step);
          if (!std::isfinite(d))
            throw NumericalError("non-finite Jacobian sample at x = " + format_vec(x));
          row[i] += std::fabs(d);
        }
      }
      best = std::max(best, *std::max_element(row.begin(), row.end()));
    }
  }
  return best * spec.safety;
}

} // namespace symctl
