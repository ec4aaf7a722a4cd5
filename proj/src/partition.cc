/*
 * partition.cc
 */

#include "symctl/partition.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace symctl {

Box::Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw Error("box bounds differ in dimension");
}

bool Box::contains(std::span<const double> x, double eps) const {
  if (x.size() != dim())
    return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(x[i] >= lower[i] - eps && x[i] <= upper[i] + eps))
      return false;
  return true;
}

bool Box::intersects(const Box& other) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (other.upper[i] < lower[i] || upper[i] < other.lower[i])
      return false;
  return true;
}

Box Box::intersection(const Box& other) const {
  Box out = *this;
  for (std::size_t i = 0; i < dim(); ++i) {
    out.lower[i] = std::max(lower[i], other.lower[i]);
    out.upper[i] = std::min(upper[i], other.upper[i]);
  }
  return out;
}

bool Box::empty() const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (lower[i] > upper[i])
      return true;
  return false;
}

Vec Box::center() const {
  Vec c(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

std::string format_vec(std::span<const double> v, int precision) {
  std::string out = "(";
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v[i]);
    out += (i ? ", " : "") + std::string(buf);
  }
  return out + ")";
}

Partition::Partition(const Box& domain, std::vector<LogQuantizerParams> per_coord)
    : domain_(domain), quantizers_(std::move(per_coord)) {
  if (quantizers_.size() != domain_.dim())
    throw Error("partition: need one logarithmic quantizer per coordinate");
  for (std::size_t i = 0; i < domain_.dim(); ++i) {
    if (!(domain_.upper[i] > domain_.lower[i]))
      throw Error("partition: state box has zero width in coordinate " + std::to_string(i + 1));
    log_bands_.push_back(log_bands(domain_.lower[i], domain_.upper[i], quantizers_[i]));
  }
  std::size_t total = 1;
  for (const auto& b : log_bands_)
    total *= b.size();
  zoom_.assign(total, std::nullopt);
  rebuild_cells();
}

Partition Partition::refined(const ZoomAssignments& assignments) const {
  Partition out = *this;
  for (const auto& [k, params] : assignments) {
    if (k >= log_cell_count())
      throw Error("zoom assignment references unknown cell " + std::to_string(k));
    params.validate();
    if (params.delta == 0.0) {
      out.zoom_[k].reset();
      out.assignments_.erase(k);
      continue;
    }
    /* the log cell's box: product of its bands */
    std::size_t rest = k;
    std::vector<std::size_t> idx(dim());
    for (std::size_t i = dim(); i-- > 0;) {
      idx[i] = rest % log_bands_[i].size();
      rest /= log_bands_[i].size();
    }
    ZoomGrid grid{params, {}};
    for (std::size_t i = 0; i < dim(); ++i) {
      const Band& b = log_bands_[i][idx[i]];
      grid.bands.push_back(zoom_bands(b.lower, b.upper, params));
    }
    out.zoom_[k] = std::move(grid);
    out.assignments_[k] = params;
  }
  out.rebuild_cells();
  return out;
}

void Partition::rebuild_cells() {
  const std::size_t n = dim();
  cells_.clear();
  log_ids_.assign(zoom_.size(), {});
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t k = 0; k < zoom_.size(); ++k) {
    Cell base;
    base.lower.resize(n);
    base.upper.resize(n);
    base.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Band& b = log_bands_[i][idx[i]];
      base.lower[i] = b.lower;
      base.upper[i] = b.upper;
      base.q[i] = b.q;
    }
    base.parent = k;

    std::vector<Cell> pieces = zoom_[k] ? zoom_lattice(base, zoom_[k]->params) : std::vector<Cell>{base};
    for (auto& c : pieces) {
      c.id = cells_.size();
      c.parent = k;
      log_ids_[k].push_back(c.id);
      cells_.push_back(std::move(c));
    }

    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < log_bands_[i].size())
        break;
      idx[i] = 0;
    }
  }
}

std::optional<std::size_t> Partition::locate_log(std::span<const double> x) const {
  if (x.size() != dim())
    return std::nullopt;
  std::size_t k = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    auto b = locate_band(log_bands_[i], x[i]);
    if (!b)
      return std::nullopt;
    k = k * log_bands_[i].size() + *b;
  }
  return k;
}

std::optional<StateId> Partition::locate(std::span<const double> x) const {
  auto k = locate_log(x);
  if (!k)
    return std::nullopt;
  if (!zoom_[*k])
    return log_ids_[*k].front();
  const auto& grid = *zoom_[*k];
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    auto b = locate_band(grid.bands[i], x[i]);
    if (!b) {
      /* x sits on the log cell's face but rounding put it a hair outside */
      b = x[i] < grid.bands[i].front().lower ? 0 : grid.bands[i].size() - 1;
    }
    offset = offset * grid.bands[i].size() + *b;
  }
  return log_ids_[*k][offset];
}

namespace {

/* indices of bands meeting the closed interval [lo, hi] */
std::pair<std::size_t, std::size_t> band_range(const std::vector<Band>& bands, double lo, double hi) {
  std::size_t first = bands.size(), last = 0;
  for (std::size_t j = 0; j < bands.size(); ++j) {
    if (bands[j].upper >= lo && bands[j].lower <= hi) {
      first = std::min(first, j);
      last = j;
    }
  }
  return {first, last};
}

} // namespace

std::vector<StateId> Partition::cells_intersecting(const Box& box) const {
  std::vector<StateId> out;
  if (box.empty() || !box.intersects(domain_))
    return out;
  const std::size_t n = dim();
  std::vector<std::pair<std::size_t, std::size_t>> ranges(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranges[i] = band_range(log_bands_[i], box.lower[i], box.upper[i]);
    if (ranges[i].first > ranges[i].second)
      return out;
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i)
    idx[i] = ranges[i].first;
  while (true) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      k = k * log_bands_[i].size() + idx[i];
    if (!zoom_[k]) {
      out.push_back(log_ids_[k].front());
    } else {
      const auto& grid = *zoom_[k];
      std::vector<std::pair<std::size_t, std::size_t>> sub(n);
      bool hit = true;
      for (std::size_t i = 0; i < n && hit; ++i) {
        sub[i] = band_range(grid.bands[i], box.lower[i], box.upper[i]);
        hit = sub[i].first <= sub[i].second;
      }
      if (hit) {
        std::vector<std::size_t> s(n);
        for (std::size_t i = 0; i < n; ++i)
          s[i] = sub[i].first;
        while (true) {
          std::size_t off = 0;
          for (std::size_t i = 0; i < n; ++i)
            off = off * grid.bands[i].size() + s[i];
          out.push_back(log_ids_[k][off]);
          std::size_t i = n;
          while (i-- > 0) {
            if (++s[i] <= sub[i].second)
              break;
            s[i] = sub[i].first;
          }
          if (i == static_cast<std::size_t>(-1))
            break;
        }
      }
    }
    std::size_t i = n;
    while (i-- > 0) {
      if (++idx[i] <= ranges[i].second)
        break;
      idx[i] = ranges[i].first;
    }
    if (i == static_cast<std::size_t>(-1))
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace symctl
