// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "dualuta/http_api.hpp"
#include "support.hpp"

using namespace dualuta;
using namespace testing_support;

namespace {

// All comparisons are exact rationals; the only numeric limit is wall time.
constexpr int kRandomScenarios = 1000;
constexpr int kIdenticalRuns = 100;
constexpr int kPatternInstances = 1000;
constexpr int kDegeneracyInstances = 500;
constexpr int kSwapRuns = 100;
constexpr int kServiceScenarios = 20;
constexpr int kF1QueryLimit = 12;
constexpr double kRandomRuntimeLimitSeconds = 120.0;

struct Check {
  bool ok = true;
  std::string why;  // first failure only

  Check& fail(const std::string& msg) {
    if (ok) why = msg;
    ok = false;
    return *this;
  }
};

int failures = 0;

void report(const char* name, const Check& c) {
  std::cout << (c.ok ? "PASS" : "FAIL") << "  " << name;
  if (!c.ok) std::cout << "  (" << c.why << ")";
  std::cout << std::endl;
  if (!c.ok) ++failures;
}

void run_guarded(const char* name, const std::function<Check()>& body) {
  try {
    report(name, body());
  } catch (const std::exception& e) {
    Check c;
    c.fail(std::string("exception: ") + e.what());
    report(name, c);
  }
}

bool recovered_exactly(const RunResult& r, const std::vector<UtaModel>& truth) {
  const auto* o = std::get_if<ElicitationOutcome>(&r);
  return o && o->kind == ElicitationOutcome::Kind::kTwoModels &&
         pairs_equivalent(o->models[0], o->models[1], truth[0], truth[1]);
}

Check exact_recovery() {
  Check c;
  std::mt19937_64 rng(20240601);
  auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < kRandomScenarios; ++t) {
    Scenario sc = random_scenario(rng, 2, 5, 6);
    SimulatedPair src(sc.models[0], sc.models[1]);
    RunResult r = run_elicitation(src, sc.grid);
    if (!recovered_exactly(r, sc.models)) {
      c.fail("scenario " + std::to_string(t) + " (seed " + std::to_string(*sc.seed) + ")");
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > kRandomRuntimeLimitSeconds) c.fail("took " + std::to_string(secs) + " s");
  return c;
}

Check f1_end_to_end() {
  Check c;
  const Grid g = f1_grid();
  SimulatedPair src(f1_alpha(), f1_beta());

  SrCoefficients lam = sr_coefficients(single_rectangle(src, g, 0, 1, 1, 1));
  if (lam.for_b != R(2) || lam.for_c != R(1)) c.fail("R(1,1) ratios");

  NrInfo nr = neighboring_rectangles(src, g, 0, 1, 1, 1);
  NrCoefficients th = nr_coefficients(nr, g);
  if (th.theta_b != R(4) || th.theta_c != R(2) || th.phi_b != R(-1) || th.phi_c != R(-1, 2)) c.fail("theta/phi");

  SrCoefficients up = sr_coefficients(single_rectangle(src, g, 0, 1, 1, 2));
  SlopePairResult solved = solve_sr_nr(up, th, {1, 1}, {1, 2});
  if (solved.k != 1 || solved.k2 != 1 || solved.alpha != R(3) || solved.beta != R(1)) c.fail("fixture-label solve");

  SimulatedPair again(f1_alpha(), f1_beta());
  RunResult r = run_elicitation(again, g);
  if (!recovered_exactly(r, {f1_alpha(), f1_beta()})) {
    c.fail("not recovered");
    return c;
  }
  const ElicitationState& st = run_state(r);
  if (*st.find({1, 1}) != SlopePair{2, 1}) c.fail("initialization slopes");
  if (*st.find({0, 2}) != SlopePair{1, 2} || *st.find({1, 2}) != SlopePair{1, 3}) c.fail("engine-label slopes");
  if (st.query_count() > kF1QueryLimit) c.fail(std::to_string(st.query_count()) + " queries");
  return c;
}

Check identical_models() {
  Check c;
  std::mt19937_64 rng(515);
  for (int t = 0; t < kIdenticalRuns; ++t) {
    Scenario sc = random_scenario(rng, 2, 5, 6);
    SimulatedPair src(sc.models[0], sc.models[0]);
    RunResult r = run_elicitation(src, sc.grid);
    const auto* o = std::get_if<ElicitationOutcome>(&r);
    if (!o || o->kind != ElicitationOutcome::Kind::kIdenticalModels || o->models.size() != 1 ||
        !models_equivalent(o->models[0], sc.models[0])) {
      c.fail("run " + std::to_string(t));
    }
  }
  return c;
}

Check pattern_budgets() {
  Check c;
  std::mt19937_64 rng(8080);
  for (int t = 0; t < kPatternInstances; ++t) {
    Scenario sc = random_scenario(rng, 2, 4, 6);
    const Grid& g = sc.grid;
    SimulatedPair src(sc.models[0], sc.models[1]);
    CriterionIndex i = rng() % g.size();
    CriterionIndex j = (i + 1 + rng() % (g.size() - 1)) % g.size();
    IntervalIndex li = 1 + rng() % g.intervals(i);
    IntervalIndex lj = 1 + rng() % g.intervals(j);
    if (single_rectangle(src, g, i, j, li, lj).queries > 2) c.fail("single rectangle, instance " + std::to_string(t));
    if (lj < g.intervals(j)) {
      int bound = neighboring_query_bound(sc.models[0], sc.models[1], i, li, j, lj);
      if (neighboring_rectangles(src, g, i, li, j, lj).queries > bound) {
        c.fail("neighboring rectangles, instance " + std::to_string(t));
      }
    }
  }
  return c;
}

Check rectangle_coverage() {
  Check c;
  std::mt19937_64 rng(20240601);
  auto check = [&](const ElicitationState& st, const std::string& label) {
    auto ex = exploited_rectangles(st);
    if (!ex) return;
    if (ex->count() != ex->expected || ex->beyond_scan() != ex->expected - ex->already_scanned) {
      c.fail(label + ": " + std::to_string(ex->count()) + " rectangles, expected " + std::to_string(ex->expected));
      return;
    }
    std::set<IntervalIndex> rows, cols;
    for (const RectangleKey& r : ex->rectangles) {
      rows.insert(r.li);
      cols.insert(r.lj);
    }
    if (static_cast<int>(rows.size()) != st.grid.intervals(ex->i) ||
        static_cast<int>(cols.size()) != st.grid.intervals(ex->j)) {
      c.fail(label + ": a row or column is not covered");
    }
  };
  SimulatedPair f1(f1_alpha(), f1_beta());
  check(run_state(run_elicitation(f1, f1_grid())), "F1");
  for (int t = 0; t < kRandomScenarios; ++t) {
    Scenario sc = random_scenario(rng, 2, 5, 6);
    SimulatedPair src(sc.models[0], sc.models[1]);
    check(run_state(run_elicitation(src, sc.grid)), "scenario " + std::to_string(t));
  }
  return c;
}

Check degeneracy_oracle() {
  Check c;
  std::mt19937_64 rng(4242);
  for (int t = 0; t < kDegeneracyInstances; ++t) {
    DegeneracyCheck d = degeneracy_instance(rng, static_cast<System>(t % 3));
    if (d.solver_degenerate != d.brute_degenerate || d.solver_degenerate != d.ratio_condition ||
        (!d.solver_degenerate && !d.solved_truth)) {
      c.fail("instance " + std::to_string(t));
    }
  }
  return c;
}

Check anonymity() {
  Check c;
  std::mt19937_64 rng(303);
  auto compare = [&](const Grid& g, const UtaModel& a, const UtaModel& b, const std::string& label) {
    SimulatedPair ab(a, b);
    SimulatedPair ba(b, a);
    RunResult r1 = run_elicitation(ab, g);
    RunResult r2 = run_elicitation(ba, g);
    if (run_state(r1).transcript != run_state(r2).transcript) c.fail(label + ": transcripts differ");
    if (make_report(r1).dump() != make_report(r2).dump()) c.fail(label + ": reports differ");
  };
  compare(f1_grid(), f1_alpha(), f1_beta(), "F1");
  compare(proportional_step_grid(), proportional_step_alpha(), proportional_step_beta(), "failing run");
  for (int t = 0; t < kSwapRuns; ++t) {
    Scenario sc = random_scenario(rng, 2, 5, 6);
    compare(sc.grid, sc.models[0], sc.models[1], "scenario " + std::to_string(t));
  }
  return c;
}

Check service_equivalence() {
  Check c;
  SessionManager sessions;
  httplib::Server server;
  install_routes(server, sessions);
  int port = server.bind_to_any_port("127.0.0.1");
  if (port <= 0) {
    c.fail("could not bind");
    return c;
  }
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto scripted = [&](const Scenario& sc, const std::string& label) {
    httplib::Client cl("127.0.0.1", port);
    Json body = {{"grid", io::to_json(sc.grid)}, {"epsilon", "0"}};
    auto created = cl.Post("/sessions", body.dump(), "application/json");
    if (!created || created->status != 201) return void(c.fail(label + ": create"));
    const std::string base = "/sessions/" + parse_json(created->body)["id"].get<std::string>();
    Transcript seen;
    for (;;) {
      auto st = cl.Get(base);
      if (!st || parse_json(st->body)["status"] != "awaiting-answers") break;
      Query q = io::query_from(parse_json(cl.Get(base + "/query")->body)["query"]);
      std::vector<OptionalValue> answers;
      for (const UtaModel& m : sc.models) {
        answers.push_back(answer_indifference(m, q));
        Json v = {{"value", io::to_json(answers.back())}};
        auto r = cl.Post(base + "/answers", v.dump(), "application/json");
        if (!r || r->status != 200) return void(c.fail(label + ": answer rejected"));
      }
      seen.push_back({q, AnswerPair::sorted(answers[0], answers[1])});
    }
    auto res = cl.Get(base + "/result");
    if (!res || res->status != 200) return void(c.fail(label + ": no result"));
    Json served = parse_json(res->body)["report"];

    SimulatedPair src(sc.models[0], sc.models[1]);
    RunResult direct = run_elicitation(src, sc.grid);
    Json expected = make_report(direct, &sc.models);
    expected.erase("verdict");
    if (served.dump() != expected.dump()) c.fail(label + ": report differs");
    if (seen != run_state(direct).transcript) c.fail(label + ": query sequence differs");
  };

  scripted(Scenario{f1_grid(), {f1_alpha(), f1_beta()}, std::nullopt}, "F1");
  std::mt19937_64 rng(777);
  for (int t = 0; t < kServiceScenarios; ++t) scripted(random_scenario(rng, 2, 4, 4), "scenario " + std::to_string(t));
  server.stop();
  th.join();
  return c;
}

}  // namespace

int main() {
  run_guarded("exact recovery on 1000 random scenarios", exact_recovery);
  run_guarded("F1 end to end with checkpoints", f1_end_to_end);
  run_guarded("identical decision makers (100 runs)", identical_models);
  run_guarded("pattern query budgets", pattern_budgets);
  run_guarded("rectangle coverage of the first pair", rectangle_coverage);
  run_guarded("degeneracy oracle equivalence (500 instances)", degeneracy_oracle);
  run_guarded("anonymity under model swap", anonymity);
  run_guarded("service matches the library run", service_equivalence);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
