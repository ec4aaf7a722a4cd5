/*
 * symctl.cc
 *
 * command-line front end: abstract, refine, synthesize, simulate,
 * verify-frr and export-dot. Exit codes: 0 ok, 1 domain error, 2 I/O error.
 */

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "symctl/config.hh"
#include "symctl/frr.hh"
#include "symctl/model_io.hh"
#include "symctl/sim.hh"
#include "symctl/synthesis.hh"

using namespace symctl;

namespace {

struct Options {
  std::string config;
  std::string model;
  std::string out;
  std::string controller;
  std::string dump;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
};

/* the delay-free model of the config that serializes to exactly `text` */
DelayFreeAbstraction matching_delayfree(const Config& cfg, const std::string& text) {
  DelayFreeAbstraction base(cfg.system, cfg.abstraction);
  if (serialize_model(base.ts()) == text)
    return base;
  if (!cfg.zoom.empty()) {
    DelayFreeAbstraction refined = base.refine(resolve_zoom(cfg, base.partition()));
    if (serialize_model(refined.ts()) == text)
      return refined;
  }
  throw Error("model file does not match the configuration (rebuild it with 'abstract' or 'refine')");
}

std::vector<std::vector<StateId>> waypoint_sets(const Config& cfg, const TransitionSystem& ts,
                                                const Partition& partition) {
  auto cells = resolve_points(cfg.waypoints, partition);
  if (ts.kind == TransitionSystem::Kind::Cells)
    return cells;
  /* tube models: every tube whose current (t = 0) knot is the waypoint cell */
  std::vector<std::vector<StateId>> out;
  for (const auto& w : cells) {
    std::vector<StateId> set;
    for (StateId t = 0; t < ts.tubes.size(); ++t)
      if (ts.tubes[t].knots.back() == w[0])
        set.push_back(t);
    if (set.empty())
      throw Error("[synthesis] waypoints: no explored tube ends in cell " + std::to_string(w[0]));
    out.push_back(std::move(set));
  }
  return out;
}

int cmd_abstract(const Options& o) {
  Config cfg = load_config(o.config);
  std::string text;
  if (cfg.time_delay) {
    TimeDelayAbstraction abs(make_timedelay_system(cfg), make_timedelay_params(cfg));
    text = serialize_model(abs.explore());
  } else {
    DelayFreeAbstraction abs(cfg.system, cfg.abstraction);
    text = serialize_model(abs.ts());
  }
  write_file(o.out, text);
  std::cout << text.substr(0, text.find('\n')) << "\n";
  return 0;
}

int cmd_refine(const Options& o) {
  Config cfg = load_config(o.config);
  if (cfg.time_delay)
    throw Error("refine: time-delay models take their zoom assignments at 'abstract' time");
  if (cfg.zoom.empty())
    throw Error("[abstraction] zoom: refine needs at least one zoom assignment");
  DelayFreeAbstraction base(cfg.system, cfg.abstraction);
  if (serialize_model(base.ts()) != read_file(o.model))
    throw Error("model file does not match the unrefined model of the configuration");
  DelayFreeAbstraction refined = base.refine(resolve_zoom(cfg, base.partition()));
  const std::string text = serialize_model(refined.ts());
  write_file(o.out, text);
  std::cout << text.substr(0, text.find('\n')) << "\n";
  return 0;
}

int cmd_synthesize(const Options& o) {
  Config cfg = load_config(o.config);
  const std::string text = read_file(o.model);
  TransitionSystem ts = parse_model(text);
  if (cfg.spec == Config::Spec::None)
    throw Error("[synthesis] spec: nothing to synthesize");

  std::optional<DelayFreeAbstraction> df;
  std::optional<TimeDelayAbstraction> td;
  const Partition* partition = nullptr;
  if (cfg.time_delay) {
    td.emplace(make_timedelay_system(cfg), make_timedelay_params(cfg));
    partition = &td->partition();
  } else {
    df.emplace(matching_delayfree(cfg, text));
    partition = &df->partition();
  }
  auto waypoints = waypoint_sets(cfg, ts, *partition);
  std::vector<StateId> start;
  if (cfg.time_delay) {
    start = ts.initial;
  } else {
    for (const auto& s : resolve_points(cfg.start, *partition))
      start.push_back(s[0]);
  }

  Controller c;
  if (cfg.spec == Config::Spec::Reach) {
    c = synthesize_reach(ts, waypoints[0]);
    std::cout << "winning domain: " << c.legs[0].domain_size() << " of " << ts.state_count() << " states\n";
    for (StateId s : start)
      if (!c.legs[0].winning(s)) {
        write_file(o.out, c.serialize());
        throw Error("start state " + std::to_string(s) + " is outside the winning domain");
      }
  } else {
    SequenceResult r = synthesize_sequence(ts, waypoints, start);
    c = r.controller;
    for (std::size_t p = 0; p < c.phases(); ++p)
      std::cout << "leg " << p << ": winning domain " << c.legs[p].domain_size() << " of "
                << ts.state_count() << " states\n";
    write_file(o.out, c.serialize());
    if (!r.solvable)
      throw Error("sequence not solvable: " + r.message);
  }
  write_file(o.out, c.serialize());
  std::cout << "controller written to " << o.out << "\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  Config cfg = load_config(o.config);
  const std::string text = read_file(o.model);
  Controller c = Controller::parse(read_file(o.controller));
  SimResult res;
  std::size_t n = cfg.system.n, m = cfg.system.m;
  TransitionSystem ts = parse_model(text);
  if (c.states != ts.state_count() || c.inputs != ts.input_count())
    throw Error("controller does not fit the model");
  if (cfg.time_delay) {
    TimeDelayAbstraction abs(make_timedelay_system(cfg), make_timedelay_params(cfg));
    res = run_closed_loop(abs, ts, c, cfg.max_steps);
  } else {
    if (cfg.x0.empty())
      throw Error("[run] x0: missing");
    DelayFreeAbstraction abs = matching_delayfree(cfg, text);
    res = run_closed_loop(abs, c, cfg.x0, cfg.max_steps);
    std::string why;
    bool ok = check_cell_sequence(ts, res.trajectory, &why);
    std::cout << "cell sequence: " << (ok ? "consistent" : "INCONSISTENT (" + why + ")") << "\n";
  }
  export_trajectory(res.trajectory, n, m, o.out);
  std::cout << completion_text(res.report);
  return res.report.completed ? 0 : 1;
}

int cmd_verify_frr(const Options& o) {
  Config cfg = load_config(o.config);
  const std::size_t samples = o.samples.value_or(cfg.samples);
  const std::uint64_t seed = o.seed.value_or(cfg.seed);
  FrrReport report;
  if (cfg.time_delay) {
    /* the time-delay relation is checked against its implicit form */
    TimeDelayAbstraction abs(make_timedelay_system(cfg), make_timedelay_params(cfg));
    report = sample_frr_timedelay(abs, samples, seed);
  } else {
    std::optional<DelayFreeAbstraction> abs;
    if (o.model.empty())
      abs.emplace(build_delayfree(cfg));
    else
      abs.emplace(matching_delayfree(cfg, read_file(o.model)));
    report = sample_frr_delayfree(*abs, samples, seed);
  }
  std::cout << report.text();
  if (!o.dump.empty())
    write_file(o.dump, report.dump());
  return report.pass() ? 0 : 1;
}

int cmd_export_dot(const Options& o) {
  TransitionSystem ts = parse_model(read_file(o.model));
  write_file(o.out, to_dot(ts));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic models, controller synthesis and simulation for quantized control systems"};
  app.require_subcommand(1);
  Options o;

  auto* abs = app.add_subcommand("abstract", "build the symbolic model of a configuration");
  abs->add_option("--config", o.config, "configuration file")->required();
  abs->add_option("--out", o.out, "model file to write")->required();

  auto* ref = app.add_subcommand("refine", "apply the configured zoom assignments to a model");
  ref->add_option("--config", o.config, "configuration file")->required();
  ref->add_option("--model", o.model, "unrefined model file")->required();
  ref->add_option("--out", o.out, "refined model file to write")->required();

  auto* syn = app.add_subcommand("synthesize", "synthesize a controller table");
  syn->add_option("--config", o.config, "configuration file")->required();
  syn->add_option("--model", o.model, "model file")->required();
  syn->add_option("--out", o.out, "controller file to write")->required();

  auto* sim = app.add_subcommand("simulate", "closed-loop simulation");
  sim->add_option("--config", o.config, "configuration file")->required();
  sim->add_option("--model", o.model, "model file")->required();
  sim->add_option("--controller", o.controller, "controller file")->required();
  sim->add_option("--out", o.out, "trajectory CSV to write")->required();

  auto* frr = app.add_subcommand("verify-frr", "sample the feedback refinement relation");
  frr->add_option("--config", o.config, "configuration file")->required();
  frr->add_option("--model", o.model, "model file (delay-free configurations)");
  frr->add_option("--samples", o.samples, "number of samples (default [run] samples)");
  frr->add_option("--seed", o.seed, "RNG seed (default [run] seed)");
  frr->add_option("--dump", o.dump, "write counterexamples here");

  auto* dot = app.add_subcommand("export-dot", "DOT graph of a model");
  dot->add_option("--model", o.model, "model file")->required();
  dot->add_option("--out", o.out, "DOT file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*abs)
      return cmd_abstract(o);
    if (*ref)
      return cmd_refine(o);
    if (*syn)
      return cmd_synthesize(o);
    if (*sim)
      return cmd_simulate(o);
    if (*frr)
      return cmd_verify_frr(o);
    if (*dot)
      return cmd_export_dot(o);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
