/*
 * model_io.cc
 */

#include "symctl/model_io.hh"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace symctl {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void cell_record(std::ostringstream& os, char tag, const Cell& c) {
  os << tag << ' ' << c.id;
  for (double v : c.lower)
    os << ' ' << num(v);
  for (double v : c.upper)
    os << ' ' << num(v);
  for (double v : c.q)
    os << ' ' << num(v);
  os << '\n';
}

} // namespace

std::string serialize_model(const TransitionSystem& ts) {
  std::ostringstream os;
  os << "STS 1 " << ts.state_count() << ' ' << ts.input_count() << ' ' << ts.transition_count() << '\n';
  if (ts.kind == TransitionSystem::Kind::Cells) {
    for (const auto& c : ts.cells)
      cell_record(os, 'S', c);
  } else {
    for (const auto& c : ts.cells)
      cell_record(os, 'C', c);
    for (std::size_t t = 0; t < ts.tubes.size(); ++t) {
      os << "T " << t;
      for (StateId k : ts.tubes[t].knots)
        os << ' ' << k;
      os << '\n';
    }
  }
  for (std::size_t u = 0; u < ts.inputs.size(); ++u) {
    os << "I " << u;
    for (double v : ts.inputs[u])
      os << ' ' << num(v);
    os << '\n';
  }
  const std::size_t nu = ts.input_count();
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    for (std::size_t u = 0; u < nu; ++u)
      for (StateId d : ts.successors[s * nu + u])
        os << "E " << s << ' ' << u << ' ' << d << '\n';
  return os.str();
}

TransitionSystem parse_model(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto bad = [](std::size_t lineno, const std::string& why) {
    return IoError("model file line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(is, line))
    throw bad(1, "empty file");
  std::size_t ns = 0, ni = 0, nt = 0;
  {
    std::istringstream hs(line);
    std::string tag;
    int version = 0;
    if (!(hs >> tag >> version >> ns >> ni >> nt) || tag != "STS" || version != 1)
      throw bad(1, "expected header 'STS 1 <states> <inputs> <transitions>'");
  }

  TransitionSystem ts;
  std::vector<std::tuple<StateId, InputId, StateId>> edges;
  std::size_t dim = 0;
  for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag))
      continue;
    std::size_t id = 0;
    if (!(ls >> id))
      throw bad(lineno, "missing id");
    if (tag == "S" || tag == "C") {
      Vec vals;
      for (double v; ls >> v;)
        vals.push_back(v);
      if (!ls.eof() || vals.empty() || vals.size() % 3 != 0)
        throw bad(lineno, "cell record needs lower, upper and q vectors");
      if (dim == 0)
        dim = vals.size() / 3;
      if (vals.size() != 3 * dim)
        throw bad(lineno, "cell dimension differs from earlier records");
      if (id != ts.cells.size())
        throw bad(lineno, "cell records must be consecutive from 0");
      if (tag == "C")
        ts.kind = TransitionSystem::Kind::Tubes;
      Cell c;
      c.id = id;
      c.lower.assign(vals.begin(), vals.begin() + dim);
      c.upper.assign(vals.begin() + dim, vals.begin() + 2 * dim);
      c.q.assign(vals.begin() + 2 * dim, vals.end());
      ts.cells.push_back(std::move(c));
    } else if (tag == "T") {
      if (id != ts.tubes.size())
        throw bad(lineno, "tube records must be consecutive from 0");
      Tube t;
      for (StateId k; ls >> k;) {
        if (k >= ts.cells.size())
          throw bad(lineno, "tube references unknown cell " + std::to_string(k));
        t.knots.push_back(k);
      }
      if (!ls.eof() || t.knots.empty())
        throw bad(lineno, "malformed tube record");
      ts.tubes.push_back(std::move(t));
    } else if (tag == "I") {
      if (id != ts.inputs.size())
        throw bad(lineno, "input records must be consecutive from 0");
      Vec u;
      for (double v; ls >> v;)
        u.push_back(v);
      if (!ls.eof() || u.empty())
        throw bad(lineno, "malformed input record");
      ts.inputs.push_back(std::move(u));
    } else if (tag == "E") {
      std::size_t in = 0, dst = 0;
      if (!(ls >> in >> dst))
        throw bad(lineno, "malformed transition record");
      edges.emplace_back(id, in, dst);
    } else {
      throw bad(lineno, "unknown record '" + tag + "'");
    }
  }

  if (ts.state_count() != ns || ts.inputs.size() != ni || edges.size() != nt)
    throw IoError("model file: record counts do not match the header");
  ts.successors.assign(ns * ni, {});
  for (auto [s, u, d] : edges) {
    if (s >= ns || u >= ni || d >= ns)
      throw IoError("model file: transition references unknown ids");
    ts.successors[s * ni + u].push_back(d);
  }
  for (auto& v : ts.successors)
    std::sort(v.begin(), v.end());
  if (ts.kind == TransitionSystem::Kind::Cells) {
    for (StateId s = 0; s < ns; ++s)
      ts.initial.push_back(s);
  } else if (ns > 0) {
    ts.initial = {0};
  }
  return ts;
}

std::string to_dot(const TransitionSystem& ts) {
  std::ostringstream os;
  os << "digraph sts {\n";
  for (StateId s = 0; s < ts.state_count(); ++s) {
    std::string label;
    if (ts.kind == TransitionSystem::Kind::Cells) {
      label = format_vec(ts.cells[s].q, 6);
    } else {
      label = "[";
      for (std::size_t j = 0; j < ts.tubes[s].knots.size(); ++j)
        label += (j ? " " : "") + std::to_string(ts.tubes[s].knots[j]);
      label += "]";
    }
    os << "  s" << s << " [label=\"" << label << "\"];\n";
  }
  const std::size_t nu = ts.input_count();
  for (StateId s = 0; s < ts.state_count(); ++s)
    for (InputId u = 0; u < nu; ++u)
      for (StateId d : ts.successors[s * nu + u]) {
        std::string lab;
        for (std::size_t j = 0; j < ts.inputs[u].size(); ++j)
          lab += (j ? "," : "") + num(ts.inputs[u][j]);
        os << "  s" << s << " -> s" << d << " [label=\"" << lab << "\"];\n";
      }
  os << "}\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot write " + path);
  os << text;
  if (!os)
    throw IoError("failed writing " + path);
}

} // namespace symctl
