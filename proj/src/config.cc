/*
 * config.cc
 */

#include "symctl/config.hh"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace symctl {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
public:
  Reader(const std::string& origin) : origin_(origin) {}

  std::map<std::string, std::multimap<std::string, Entry>> sections;

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg,
                         std::size_t line = 0) const {
    std::string where = origin_;
    if (!line) {
      auto sec = sections.find(section);
      if (sec != sections.end()) {
        auto it = sec->second.find(key);
        if (it != sec->second.end())
          line = it->second.line;
      }
    }
    if (line)
      where += ":" + std::to_string(line);
    throw Error(where + ": [" + section + "] " + key + ": " + msg);
  }

  const Entry* get(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    auto s = sections.find(section);
    if (s == sections.end())
      return nullptr;
    auto range = s->second.equal_range(key);
    if (range.first == range.second)
      return nullptr;
    if (std::next(range.first) != range.second)
      fail(section, key, "duplicate key", std::next(range.first)->second.line);
    return &range.first->second;
  }

  std::vector<Entry> all(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    std::vector<Entry> out;
    auto s = sections.find(section);
    if (s == sections.end())
      return out;
    auto range = s->second.equal_range(key);
    for (auto it = range.first; it != range.second; ++it)
      out.push_back(it->second);
    return out;
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    const Entry* e = get(section, key);
    return e ? parse_number(section, key, *e) : fallback;
  }

  double parse_number(const std::string& section, const std::string& key, const Entry& e) const {
    Vec v = parse_vec(section, key, e);
    if (v.size() != 1)
      fail(section, key, "expected a single number", e.line);
    return v[0];
  }

  Vec parse_vec(const std::string& section, const std::string& key, const Entry& e) const {
    std::istringstream is(e.value);
    Vec v;
    std::string tok;
    while (is >> tok) {
      try {
        std::size_t used = 0;
        double d = std::stod(tok, &used);
        if (used != tok.size())
          throw std::invalid_argument(tok);
        v.push_back(d);
      } catch (const std::exception&) {
        fail(section, key, "not a number: '" + tok + "'", e.line);
      }
    }
    return v;
  }

  Vec vec(const std::string& section, const std::string& key, std::size_t dim, bool required) {
    const Entry* e = get(section, key);
    if (!e) {
      if (required)
        fail(section, key, "missing");
      return {};
    }
    Vec v = parse_vec(section, key, *e);
    if (v.size() != dim)
      fail(section, key, "expected " + std::to_string(dim) + " values, got " + std::to_string(v.size()), e->line);
    return v;
  }

  std::vector<Vec> points(const std::string& section, const std::string& key, std::size_t dim) {
    const Entry* e = get(section, key);
    std::vector<Vec> out;
    if (!e)
      return out;
    std::stringstream ss(e->value);
    for (std::string part; std::getline(ss, part, ';');) {
      Vec v = parse_vec(section, key, Entry{part, e->line});
      if (v.size() != dim)
        fail(section, key, "each point needs " + std::to_string(dim) + " values", e->line);
      out.push_back(std::move(v));
    }
    return out;
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) {
    const Entry* e = get(section, key);
    return e ? e->value : fallback;
  }

  void reject_unused() const {
    for (const auto& [section, entries] : sections)
      for (const auto& [key, e] : entries)
        if (!used_.count(section + "." + key))
          fail(section, key, "unknown key", e.line);
  }

private:
  std::string origin_;
  std::set<std::string> used_;
};

std::size_t count(Reader& rd, const std::string& section, const std::string& key, double fallback, double min) {
  if (fallback < min && !rd.get(section, key))
    rd.fail(section, key, "missing");
  const double v = rd.number(section, key, fallback);
  if (v < min || v != std::floor(v))
    rd.fail(section, key, "must be an integer >= " + std::to_string(static_cast<long>(min)));
  return static_cast<std::size_t>(v);
}

} // namespace

Config parse_config(const std::string& text, const std::string& origin) {
  Reader rd(origin);
  static const std::set<std::string> known{"system", "abstraction", "synthesis", "run"};
  {
    std::istringstream is(text);
    std::string line, section;
    for (std::size_t lineno = 1; std::getline(is, line); ++lineno) {
      auto hash = line.find('#');
      if (hash != std::string::npos)
        line.erase(hash);
      line = trim(line);
      if (line.empty())
        continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw Error(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!known.count(section))
          throw Error(origin + ":" + std::to_string(lineno) + ": unknown section [" + section + "]");
        rd.sections[section];
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(origin + ":" + std::to_string(lineno) + ": expected key = value");
      if (section.empty())
        throw Error(origin + ":" + std::to_string(lineno) + ": key outside any section");
      rd.sections[section].emplace(trim(line.substr(0, eq)), Entry{trim(line.substr(eq + 1)), lineno});
    }
  }

  Config cfg;
  ControlSystem& sys = cfg.system;

  /* [system] */
  sys.n = count(rd, "system", "n", 0, 1);
  sys.m = count(rd, "system", "m", 0, 1);
  sys.state_box = Box(rd.vec("system", "state_lower", sys.n, true), rd.vec("system", "state_upper", sys.n, true));
  sys.input_box = Box(rd.vec("system", "input_lower", sys.m, true), rd.vec("system", "input_upper", sys.m, true));
  for (std::size_t i = 0; i < sys.n; ++i)
    if (!(sys.state_box.upper[i] > sys.state_box.lower[i]))
      rd.fail("system", "state_upper", "must exceed state_lower in coordinate " + std::to_string(i + 1));
  for (std::size_t j = 0; j < sys.m; ++j)
    if (!(sys.input_box.upper[j] >= sys.input_box.lower[j]))
      rd.fail("system", "input_upper", "must not be below input_lower in coordinate " + std::to_string(j + 1));
  for (std::size_t i = 1; i <= sys.n; ++i) {
    const std::string key = "f" + std::to_string(i);
    const Entry* e = rd.get("system", key);
    if (!e)
      rd.fail("system", key, "missing");
    try {
      sys.field.push_back(expr::parse(e->value, sys.n, sys.m));
    } catch (const expr::ParseError& err) {
      rd.fail("system", key, std::string(err.what()), e->line);
    }
  }
  cfg.time_delay = rd.get("system", "Theta") != nullptr;
  cfg.Theta = rd.number("system", "Theta", 0.0);
  cfg.r = rd.number("system", "r", 0.0);
  if (cfg.Theta < 0.0)
    rd.fail("system", "Theta", "must be nonnegative");
  if (cfg.r < 0.0)
    rd.fail("system", "r", "must be nonnegative");
  if (cfg.r > 0.0 && !cfg.time_delay)
    rd.fail("system", "r", "an input delay needs Theta (use Theta = 0 for no state delay)");
  for (const auto& f : sys.field) {
    if (f.has_delay() && !cfg.time_delay)
      rd.fail("system", "Theta", "missing although the field has delay terms");
    if (f.max_delay() > cfg.Theta + 1e-12)
      rd.fail("system", "Theta", "smaller than a delay used in the field");
  }
  cfg.xi0 = rd.points("system", "xi0", sys.n);
  if (cfg.time_delay && cfg.xi0.empty())
    rd.fail("system", "xi0", "missing for a time-delay system");
  for (const auto& p : cfg.xi0)
    if (!sys.state_box.contains(p))
      rd.fail("system", "xi0", "point " + format_vec(p) + " lies outside the state box");

  /* [abstraction] */
  AbstractionParams& ap = cfg.abstraction;
  ap.tau = rd.number("abstraction", "tau", 0.2);
  if (!(ap.tau > 0.0))
    rd.fail("abstraction", "tau", "must be positive");
  ap.integrator_steps = static_cast<int>(count(rd, "abstraction", "steps", 20, 1));
  const std::string variant = rd.text("abstraction", "variant", "shifted");
  LogQuantizerParams lp;
  if (variant == "shifted")
    lp.variant = LogVariant::Shifted;
  else if (variant == "base")
    lp.variant = LogVariant::Base;
  else
    rd.fail("abstraction", "variant", "expected base or shifted, got '" + variant + "'");
  lp.eta = rd.number("abstraction", "eta", 0.2);
  lp.d = rd.number("abstraction", "d", 0.4);
  for (std::size_t i = 1; i <= sys.n; ++i) {
    LogQuantizerParams p = lp;
    const std::string ei = "eta_" + std::to_string(i), di = "d_" + std::to_string(i);
    p.eta = rd.number("abstraction", ei, lp.eta);
    p.d = rd.number("abstraction", di, lp.d);
    if (!(p.eta > 0.0 && p.eta < 1.0))
      rd.fail("abstraction", rd.get("abstraction", ei) ? ei : "eta", "must lie in (0, 1)");
    if (!(p.d > 0.0))
      rd.fail("abstraction", rd.get("abstraction", di) ? di : "d", "must be positive");
    ap.log.push_back(p);
  }
  const std::string inputs = rd.text("abstraction", "inputs", "uniform");
  if (inputs == "uniform") {
    ap.input.kind = InputQuantization::Kind::Uniform;
  } else if (inputs == "log") {
    ap.input.kind = InputQuantization::Kind::Logarithmic;
  } else {
    rd.fail("abstraction", "inputs", "expected uniform or log");
  }
  ap.input.mu = rd.number("abstraction", "mu", 0.2);
  if (!(ap.input.mu > 0.0))
    rd.fail("abstraction", "mu", "must be positive");
  ap.input.log.variant = lp.variant;
  ap.input.log.eta = rd.number("abstraction", "input_eta", 0.2);
  ap.input.log.d = rd.number("abstraction", "input_d", 0.4);
  if (!(ap.input.log.eta > 0.0 && ap.input.log.eta < 1.0))
    rd.fail("abstraction", "input_eta", "must lie in (0, 1)");
  if (!(ap.input.log.d > 0.0))
    rd.fail("abstraction", "input_d", "must be positive");
  const std::string lip = rd.text("abstraction", "lipschitz", "sampled");
  if (lip == "sampled") {
    ap.lipschitz.mode = LipschitzMode::SampledJacobian;
  } else {
    ap.lipschitz.mode = LipschitzMode::UserConstant;
    ap.lipschitz.constant = rd.number("abstraction", "lipschitz", 0.0);
    if (!(ap.lipschitz.constant >= 0.0))
      rd.fail("abstraction", "lipschitz", "must be 'sampled' or a nonnegative constant");
  }
  ap.lipschitz.safety = rd.number("abstraction", "safety", 1.1);
  if (!(ap.lipschitz.safety >= 1.0))
    rd.fail("abstraction", "safety", "must be >= 1");
  ap.radius_scale = rd.number("abstraction", "radius_scale", 1.0);
  if (!(ap.radius_scale >= 0.0))
    rd.fail("abstraction", "radius_scale", "must be nonnegative");
  ap.workers = static_cast<unsigned>(count(rd, "abstraction", "workers", 0, 0));
  for (const auto& e : rd.all("abstraction", "zoom")) {
    auto colon = e.value.find(':');
    if (colon == std::string::npos)
      rd.fail("abstraction", "zoom", "expected '<point> : M Lambda delta'", e.line);
    ZoomSpec z;
    z.point = rd.parse_vec("abstraction", "zoom", Entry{e.value.substr(0, colon), e.line});
    Vec prm = rd.parse_vec("abstraction", "zoom", Entry{e.value.substr(colon + 1), e.line});
    if (z.point.size() != sys.n)
      rd.fail("abstraction", "zoom", "point needs " + std::to_string(sys.n) + " values", e.line);
    if (prm.size() != 3)
      rd.fail("abstraction", "zoom", "expected M Lambda delta after ':'", e.line);
    if (prm[0] < 1 || prm[0] != std::floor(prm[0]))
      rd.fail("abstraction", "zoom", "M must be an integer >= 1", e.line);
    z.params = {static_cast<int>(prm[0]), prm[1], prm[2]};
    if (!(prm[1] > 0.0))
      rd.fail("abstraction", "zoom", "Lambda must be positive", e.line);
    if (!(prm[2] >= 0.0))
      rd.fail("abstraction", "zoom", "delta must be nonnegative", e.line);
    if (!sys.state_box.contains(z.point))
      rd.fail("abstraction", "zoom", "point lies outside the state box", e.line);
    cfg.zoom.push_back(std::move(z));
  }
  cfg.N = static_cast<int>(rd.number("abstraction", "N", -1));
  if (cfg.N < -1)
    rd.fail("abstraction", "N", "must be >= 0");
  cfg.budget = count(rd, "abstraction", "budget", 10000, 1);

  /* [run] */
  cfg.x0 = rd.vec("run", "x0", sys.n, false);
  if (!cfg.x0.empty() && !sys.state_box.contains(cfg.x0))
    rd.fail("run", "x0", "lies outside the state box");
  cfg.max_steps = count(rd, "run", "max_steps", 1000, 0);
  cfg.seed = static_cast<std::uint64_t>(count(rd, "run", "seed", 1, 0));
  cfg.samples = count(rd, "run", "samples", 1000, 0);

  /* [synthesis] */
  const std::string spec = rd.text("synthesis", "spec", "none");
  if (spec == "none") {
    cfg.spec = Config::Spec::None;
  } else if (spec == "reach") {
    cfg.spec = Config::Spec::Reach;
    cfg.waypoints = rd.points("synthesis", "target", sys.n);
    if (cfg.waypoints.size() != 1)
      rd.fail("synthesis", "target", "reach needs exactly one target point");
  } else if (spec == "sequence") {
    cfg.spec = Config::Spec::Sequence;
    cfg.waypoints = rd.points("synthesis", "waypoints", sys.n);
    if (cfg.waypoints.empty())
      rd.fail("synthesis", "waypoints", "sequence needs at least one waypoint");
  } else {
    rd.fail("synthesis", "spec", "expected none, reach or sequence");
  }
  for (const auto& p : cfg.waypoints)
    if (!sys.state_box.contains(p))
      rd.fail("synthesis", spec == "reach" ? "target" : "waypoints", "point " + format_vec(p) + " lies outside the state box");
  cfg.start = rd.points("synthesis", "start", sys.n);
  if (cfg.start.empty() && !cfg.x0.empty())
    cfg.start.push_back(cfg.x0);
  for (const auto& p : cfg.start)
    if (!sys.state_box.contains(p))
      rd.fail("synthesis", "start", "point " + format_vec(p) + " lies outside the state box");

  rd.reject_unused();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

ZoomAssignments resolve_zoom(const Config& cfg, const Partition& log_partition) {
  ZoomAssignments out;
  for (const auto& z : cfg.zoom) {
    auto k = log_partition.locate_log(z.point);
    if (!k)
      throw Error("[abstraction] zoom: point " + format_vec(z.point) + " is outside the state box");
    if (out.count(*k))
      throw Error("[abstraction] zoom: two zoom entries name log cell " + std::to_string(*k));
    out[*k] = z.params;
  }
  return out;
}

TimeDelaySystem make_timedelay_system(const Config& cfg) {
  if (!cfg.time_delay)
    throw Error("[system] Theta: the configuration does not describe a time-delay system");
  TimeDelaySystem sys;
  sys.base = cfg.system;
  sys.Theta = cfg.Theta;
  sys.r = cfg.r;
  if (cfg.xi0.size() == 1 || cfg.Theta == 0.0) {
    sys.xi0 = Segment::constant(cfg.xi0.front(), cfg.Theta, cfg.Theta > 0.0 ? cfg.Theta : 0.0);
  } else {
    sys.xi0.spacing = cfg.Theta / (cfg.xi0.size() - 1);
    sys.xi0.samples = cfg.xi0;
  }
  return sys;
}

TimeDelayParams make_timedelay_params(const Config& cfg) {
  TimeDelayParams p;
  p.base = cfg.abstraction;
  p.zoom = resolve_zoom(cfg, Partition(cfg.system.state_box, cfg.abstraction.log));
  p.N = cfg.N;
  p.budget = cfg.budget;
  return p;
}

DelayFreeAbstraction build_delayfree(const Config& cfg) {
  if (cfg.time_delay)
    throw Error("[system] Theta: a time-delay configuration has no delay-free model");
  DelayFreeAbstraction base(cfg.system, cfg.abstraction);
  if (cfg.zoom.empty())
    return base;
  return base.refine(resolve_zoom(cfg, base.partition()));
}

std::vector<std::vector<StateId>> resolve_points(const std::vector<Vec>& pts, const Partition& partition) {
  std::vector<std::vector<StateId>> out;
  for (const auto& p : pts) {
    auto id = partition.locate(p);
    if (!id)
      throw Error("point " + format_vec(p) + " is outside the state box");
    out.push_back({*id});
  }
  return out;
}

} // namespace symctl
