// dualuta: generate scenarios, run simulated elicitations, export
// indifference curves and serve live sessions over HTTP.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualuta/dualuta.hpp"
#include "dualuta/http_api.hpp"

using namespace dualuta;

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
  return read_json(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << text;
}

struct GenOptions {
  int criteria = 2;
  std::vector<int> intervals;
  std::uint64_t seed = 0;
  bool allow_identical = false;
  bool duplicate = false;
  LatticeParams lattice;
  std::string out;
};

int cmd_gen(const GenOptions& o) {
  GenerateParams p;
  p.intervals = o.intervals;
  if (p.intervals.empty()) p.intervals.assign(o.criteria, 2);
  if (p.intervals.size() == 1) p.intervals.assign(o.criteria, p.intervals[0]);
  if (static_cast<int>(p.intervals.size()) != o.criteria) {
    throw Error(ErrorCode::kInvalidArgument, "--breakpoints needs one interval count per criterion");
  }
  p.seed = o.seed;
  p.allow_identical = o.allow_identical || o.duplicate;
  p.duplicate = o.duplicate;
  p.lattice = o.lattice;
  write_text(o.out, scenario_to_json(generate_scenario(p)).dump(2) + "\n");
  return 0;
}

struct RunOptions {
  std::string scenario;
  std::string transcript;
  std::string report;
  std::string replay;
  std::string epsilon = "0";
  int sweep = 0;
  std::uint64_t seed = 1;
};

int run_one(const RunOptions& o) {
  Scenario sc = scenario_from_json(load_json(o.scenario));
  ElicitationOptions opts;
  opts.tolerance = Rational::parse(o.epsilon);
  SimulatedPair truth(sc.models[0], sc.models[1]);
  std::optional<ReplayTranscript> replay;
  if (!o.replay.empty()) {
    std::ifstream in(o.replay);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + o.replay);
    replay.emplace(read_transcript(in));
  }
  AnswerSource& src = replay ? static_cast<AnswerSource&>(*replay) : truth;
  RunResult result = run_elicitation(src, sc.grid, opts);
  const ElicitationState& st = run_state(result);

  if (!o.transcript.empty()) {
    std::ostringstream t;
    write_transcript(t, st.transcript);
    write_text(o.transcript, t.str());
  }
  Json report = make_report(result, &sc.models);
  if (!o.report.empty()) write_text(o.report, report.dump(2) + "\n");

  std::cerr << report["outcome"].get<std::string>() << ": " << report["verdict"].get<std::string>() << ", "
            << st.query_count() << " queries";
  if (const auto* f = std::get_if<ElicitationFailure>(&result)) std::cerr << " (" << f->what() << ")";
  std::cerr << "\n";
  return verdict_exit_code(result, sc.models);
}

/// Random scenarios with 2..5 criteria and 1..6 intervals each; prints one
/// line per failure and a summary.
int run_sweep(const RunOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> n_dist(2, 5);
  std::uniform_int_distribution<int> l_dist(1, 6);
  int failed = 0;
  long long queries = 0;
  for (int k = 0; k < o.sweep; ++k) {
    GenerateParams p;
    p.intervals.resize(n_dist(rng));
    for (int& l : p.intervals) l = l_dist(rng);
    p.seed = rng();
    Scenario sc = generate_scenario(p);
    SimulatedPair src(sc.models[0], sc.models[1]);
    RunResult r = run_elicitation(src, sc.grid);
    queries += run_state(r).query_count();
    if (verdict_exit_code(r, sc.models) != 0) {
      ++failed;
      std::cout << "seed " << p.seed << ": " << verdict(r, sc.models);
      if (const auto* f = std::get_if<ElicitationFailure>(&r)) std::cout << " (" << f->what() << ")";
      std::cout << "\n";
    }
  }
  std::cout << (o.sweep - failed) << "/" << o.sweep << " exact, " << queries << " queries in total\n";
  return failed == 0 ? 0 : 2;
}

struct PlotOptions {
  std::string scenario;
  std::string report;
  std::string plane = "0,1";
  int levels = 5;
  std::vector<std::string> level_values;
  std::string out;
};

int cmd_plot(const PlotOptions& o) {
  std::vector<UtaModel> models;
  std::vector<std::string> names;
  if (!o.scenario.empty()) {
    Scenario sc = scenario_from_json(load_json(o.scenario));
    models = sc.models;
    names = {"model1", "model2"};
  } else if (!o.report.empty()) {
    Json rep = load_json(o.report);
    Grid g = io::grid_from(io::field(rep, "grid"));
    for (const Json& m : io::field(rep, "models")) {
      models.emplace_back(g, io::slopes_from(io::field(m, "slopes")));
      names.push_back(io::field(m, "label").get<std::string>());
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "plot needs --scenario or --report");
  }
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  char comma = 0;
  std::istringstream ps(o.plane);
  if (!(ps >> i >> comma >> j) || comma != ',') throw Error(ErrorCode::kInvalidArgument, "--plane expects i,j");
  std::vector<Rational> levels;
  for (const auto& v : o.level_values) levels.push_back(Rational::parse(v));
  std::vector<NamedModel> named;
  for (std::size_t k = 0; k < models.size(); ++k) named.push_back({names[k], &models[k]});
  write_text(o.out, curves_to_json(i, j, indifference_curves(named, i, j, o.levels, levels)).dump(2) + "\n");
  return 0;
}

int cmd_serve(const std::string& host, int port) {
  SessionManager sessions;
  httplib::Server server;
  install_routes(server, sessions);
  std::cerr << "listening on " << host << ":" << port << "\n";
  return server.listen(host, port) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elicitation of two anonymous UTA models from matching queries"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a random two-model scenario");
  g->add_option("--criteria,-n", gen.criteria, "Number of criteria")->check(CLI::Range(2, 1000));
  g->add_option("--breakpoints,-L", gen.intervals, "Intervals per criterion (one value applies to all)")
      ->delimiter(',');
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_flag("--allow-identical", gen.allow_identical, "Keep equivalent model pairs");
  g->add_flag("--duplicate", gen.duplicate, "Make the second model a copy of the first");
  g->add_option("--slope-num-max", gen.lattice.slope_num_max, "Largest slope numerator");
  g->add_option("--slope-den-max", gen.lattice.slope_den_max, "Largest slope denominator");
  g->add_option("--step-num-max", gen.lattice.step_num_max, "Largest breakpoint step numerator");
  g->add_option("--step-den-max", gen.lattice.step_den_max, "Largest breakpoint step denominator");
  g->add_option("--out,-o", gen.out, "Output file (default stdout)");

  RunOptions run;
  auto* r = app.add_subcommand("run", "Elicit a scenario's models from simulated answers");
  r->add_option("--scenario", run.scenario, "Scenario file");
  r->add_option("--transcript", run.transcript, "Write the transcript here");
  r->add_option("--report", run.report, "Write the report here");
  r->add_option("--replay", run.replay, "Answer from this transcript instead of the models");
  r->add_option("--epsilon", run.epsilon, "Residual tolerance of the disambiguation systems");
  r->add_option("--sweep", run.sweep, "Run this many random scenarios instead");
  r->add_option("--seed", run.seed, "Seed of the sweep");

  PlotOptions plot;
  auto* p = app.add_subcommand("plot", "Export indifference curves of a plane");
  p->add_option("--scenario", plot.scenario, "Scenario file (ground-truth models)");
  p->add_option("--report", plot.report, "Report file (recovered models)");
  p->add_option("--plane", plot.plane, "Criteria pair i,j (0-based)");
  p->add_option("--levels", plot.levels, "Number of evenly spaced levels")->check(CLI::NonNegativeNumber);
  p->add_option("--level", plot.level_values, "Explicit level (repeatable)");
  p->add_option("--out,-o", plot.out, "Output file (default stdout)");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* s = app.add_subcommand("serve", "Serve live sessions over HTTP");
  s->add_option("--host", host, "Address to bind");
  s->add_option("--port", port, "Port");

  CLI11_PARSE(app, argc, argv);
  try {
    if (g->parsed()) return cmd_gen(gen);
    if (r->parsed()) {
      if (run.sweep > 0) return run_sweep(run);
      if (run.scenario.empty()) throw Error(ErrorCode::kInvalidArgument, "run needs --scenario or --sweep");
      return run_one(run);
    }
    if (p->parsed()) return cmd_plot(plot);
    if (s->parsed()) return cmd_serve(host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& [k, v] : e.context()) std::cerr << "  " << k << ": " << v << "\n";
    return 2;
  }
  return 0;
}
