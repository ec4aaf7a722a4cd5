/*
 * quantizers.cc
 */

#include "symctl/quantizers.hh"

#include <algorithm>
#include <cmath>
#include <string>

namespace symctl {

void LogQuantizerParams::validate() const {
  if (!(eta > 0.0 && eta < 1.0))
    throw Error("logarithmic quantizer: eta must lie in (0,1), got " + std::to_string(eta));
  if (!(d > 0.0))
    throw Error("logarithmic quantizer: d must be positive, got " + std::to_string(d));
}

double LogQuantizerParams::first_level() const {
  return variant == LogVariant::Base ? d : (1.0 + eta) * d;
}

double LogQuantizerParams::level(int i) const {
  return first_level() * std::pow((1.0 + eta) / (1.0 - eta), i - 1);
}

double log_quantize(double z, const LogQuantizerParams& p) {
  if (z < 0.0)
    return -log_quantize(-z, p);
  if (z <= p.deadzone())
    return 0.0;
  const double ratio = (1.0 + p.eta) / (1.0 - p.eta);
  int i = 1 + std::max(0, static_cast<int>(std::ceil(
                              std::log(z * (1.0 - p.eta) / p.first_level()) / std::log(ratio))));
  /* region i is (level(i)/(1+eta), level(i)/(1-eta)]; nudge for rounding */
  while (z > p.level(i) / (1.0 - p.eta))
    ++i;
  while (i > 1 && z <= p.level(i - 1) / (1.0 - p.eta))
    --i;
  return p.level(i);
}

void ZoomQuantizerParams::validate() const {
  if (M < 1)
    throw Error("zoom quantizer: M must be >= 1, got " + std::to_string(M));
  if (!(Lambda > 0.0))
    throw Error("zoom quantizer: Lambda must be positive");
  if (!(delta >= 0.0))
    throw Error("zoom quantizer: delta must be nonnegative");
}

double zoom_quantize(double z, const ZoomQuantizerParams& p) {
  if (p.delta == 0.0)
    throw Error("zoom quantizer: delta = 0 disables refinement, nothing to quantize");
  const double s = p.step();
  if (z >= (p.M + 0.5) * s)
    return p.M * s;
  if (z < -(p.M + 0.5) * s)
    return -p.M * s;
  /* (k-0.5)s <= z < (k+0.5)s */
  double k = std::floor(z / s + 0.5);
  k = std::clamp(k, static_cast<double>(-p.M), static_cast<double>(p.M));
  return k * s;
}

namespace {

/*
 * clip raw regions (ascending, sharing endpoints) to [lo, hi] and fold
 * regions whose level lies outside [lo, hi] into the inward neighbour
 */
std::vector<Band> finalize(const std::vector<Band>& regions, double lo, double hi) {
  const double eps = 1e-9 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  std::vector<Band> clipped;
  std::vector<bool> owned;
  for (const auto& r : regions) {
    double a = std::max(lo, r.lower);
    double b = std::min(hi, r.upper);
    if (b - a <= eps)
      continue;
    clipped.push_back({a, b, r.q});
    owned.push_back(r.q >= lo - eps && r.q <= hi + eps);
  }
  if (clipped.empty())
    throw Error("quantizer produced no band over [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");

  auto first = std::find(owned.begin(), owned.end(), true);
  if (first == owned.end()) {
    /* no level inside the interval: one band, owned by the widest region */
    auto widest = std::max_element(clipped.begin(), clipped.end(), [](const Band& a, const Band& b) {
      return a.upper - a.lower < b.upper - b.lower;
    });
    return {Band{lo, hi, widest->q}};
  }

  std::vector<Band> out;
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    if (owned[i]) {
      out.push_back(clipped[i]);
    } else if (!out.empty()) {
      out.back().upper = clipped[i].upper;
    }
  }
  out.front().lower = lo;
  out.back().upper = hi;
  return out;
}

} // namespace

std::vector<Band> log_bands(double lo, double hi, const LogQuantizerParams& p) {
  p.validate();
  if (!(hi > lo))
    throw Error("degenerate interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const double reach = std::max(std::fabs(lo), std::fabs(hi));

  /* region i spans [b[i-1], b[i]], b[0] = deadzone */
  std::vector<double> b{p.deadzone()};
  std::vector<double> levels{0.0};
  for (int i = 1; b.back() < reach; ++i) {
    levels.push_back(p.level(i));
    b.push_back(p.level(i) / (1.0 - p.eta));
  }

  std::vector<Band> regions;
  for (std::size_t i = b.size() - 1; i >= 1; --i)
    regions.push_back({-b[i], -b[i - 1], -levels[i]});
  regions.push_back({-b[0], b[0], 0.0});
  for (std::size_t i = 1; i < b.size(); ++i)
    regions.push_back({b[i - 1], b[i], levels[i]});
  return finalize(regions, lo, hi);
}

std::vector<Band> zoom_bands(double lo, double hi, const ZoomQuantizerParams& p) {
  p.validate();
  if (p.delta == 0.0)
    throw Error("zoom quantizer: delta = 0 has no bands");
  if (!(hi > lo))
    throw Error("degenerate interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const double s = p.step();
  auto clampk = [&](double k) {
    return static_cast<int>(std::clamp(k, static_cast<double>(-p.M), static_cast<double>(p.M)));
  };
  int kmin = clampk(std::floor(lo / s - 0.5));
  int kmax = clampk(std::ceil(hi / s + 0.5));
  std::vector<Band> regions;
  for (int k = kmin; k <= kmax; ++k) {
    double a = k == -p.M ? std::min(lo, (k - 0.5) * s) : (k - 0.5) * s;
    double b = k == p.M ? std::max(hi, (k + 0.5) * s) : (k + 0.5) * s;
    regions.push_back({a, b, k * s});
  }
  return finalize(regions, lo, hi);
}

std::optional<std::size_t> locate_band(std::span<const Band> bands, double z) {
  if (bands.empty() || z < bands.front().lower || z > bands.back().upper || std::isnan(z))
    return std::nullopt;
  auto it = std::upper_bound(bands.begin(), bands.end(), z,
                             [](double v, const Band& b) { return v < b.lower; });
  std::size_t i = static_cast<std::size_t>(it - bands.begin()) - 1;
  if (z > bands[i].upper)
    return std::nullopt;
  if (i > 0 && z == bands[i].lower && std::fabs(bands[i - 1].q) <= std::fabs(bands[i].q))
    return i - 1;
  return i;
}

namespace {

std::vector<Cell> product(const std::vector<std::vector<Band>>& bands) {
  const std::size_t n = bands.size();
  std::size_t total = 1;
  for (const auto& b : bands)
    total *= b.size();
  std::vector<Cell> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t id = 0; id < total; ++id) {
    Cell c;
    c.lower.resize(n);
    c.upper.resize(n);
    c.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Band& b = bands[i][idx[i]];
      c.lower[i] = b.lower;
      c.upper[i] = b.upper;
      c.q[i] = b.q;
    }
    c.id = id;
    cells.push_back(std::move(c));
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < bands[i].size())
        break;
      idx[i] = 0;
    }
  }
  return cells;
}

} // namespace

std::vector<Cell> log_lattice(const Box& box, std::span<const LogQuantizerParams> per_coord) {
  if (per_coord.size() != box.dim())
    throw Error("log_lattice: need one quantizer per coordinate");
  std::vector<std::vector<Band>> bands;
  for (std::size_t i = 0; i < box.dim(); ++i)
    bands.push_back(log_bands(box.lower[i], box.upper[i], per_coord[i]));
  auto cells = product(bands);
  for (auto& c : cells)
    c.parent = c.id;
  return cells;
}

std::vector<Cell> log_lattice(const Box& box, const LogQuantizerParams& p) {
  std::vector<LogQuantizerParams> all(box.dim(), p);
  return log_lattice(box, all);
}

std::vector<Cell> zoom_lattice(const Cell& cell, const ZoomQuantizerParams& p) {
  p.validate();
  if (p.delta == 0.0)
    return {cell};
  std::vector<std::vector<Band>> bands;
  for (std::size_t i = 0; i < cell.lower.size(); ++i)
    bands.push_back(zoom_bands(cell.lower[i], cell.upper[i], p));
  auto cells = product(bands);
  for (auto& c : cells) {
    c.parent = cell.parent;
    c.zoom_step = p.step();
  }
  return cells;
}

} // namespace symctl
