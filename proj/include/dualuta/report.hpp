#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dualuta/elicitation.hpp"
#include "dualuta/io.hpp"

namespace dualuta {

/// Finished run: either an outcome or the failure that stopped it.
using RunResult = std::variant<ElicitationOutcome, ElicitationFailure>;

inline const ElicitationState& run_state(const RunResult& r) {
  if (const auto* o = std::get_if<ElicitationOutcome>(&r)) return o->state;
  return std::get<ElicitationFailure>(r).state();
}

/// Runs the elicitation and keeps a failure as a value instead of throwing.
inline RunResult run_elicitation(AnswerSource& source, const Grid& grid, ElicitationOptions options = {}) {
  try {
    return elicit(source, grid, std::move(options));
  } catch (const ElicitationFailure& f) {
    return f;
  }
}

/// Rectangles of the first criteria pair whose records were used to identify
/// an interval. Identifying L_i + L_j - 1 intervals needs one per row and one
/// per column of that plane.
struct ExploitedRectangles {
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  std::set<RectangleKey> rectangles;  ///< canonical orientation
  int already_scanned = 0;
  int expected = 0;

  int count() const { return static_cast<int>(rectangles.size()); }
  int beyond_scan() const { return count() - already_scanned; }
};

inline std::optional<ExploitedRectangles> exploited_rectangles(const ElicitationState& st) {
  if (!st.initial_rectangle) return std::nullopt;
  ExploitedRectangles out;
  out.i = std::min(st.initial_rectangle->i, st.initial_rectangle->j);
  out.j = std::max(st.initial_rectangle->i, st.initial_rectangle->j);
  out.expected = st.grid.intervals(out.i) + st.grid.intervals(out.j) - 1;
  for (const StepRecord& s : st.steps) {
    if (s.target.criterion != out.i && s.target.criterion != out.j) continue;
    for (const RectangleKey& r : s.rectangles) {
      RectangleKey c = r.canonical();
      if (c.i == out.i && c.j == out.j) out.rectangles.insert(c);
    }
  }
  for (const RectangleKey& r : out.rectangles) {
    if (st.scanned.contains(r)) ++out.already_scanned;
  }
  return out;
}

namespace io {

inline Json to_json(const IntervalKey& k) { return Json::array({k.criterion, k.interval}); }
inline Json to_json(const RectangleKey& r) { return Json::array({r.i, r.j, r.li, r.lj}); }

inline Json to_json(const StepRecord& s) {
  Json refs = Json::array();
  for (const auto& r : s.references) refs.push_back(to_json(r));
  Json rects = Json::array();
  for (const auto& r : s.rectangles) rects.push_back(to_json(r));
  Json out = {{"kind", std::string(to_string(s.kind))}, {"target", to_json(s.target)}, {"references", refs},
              {"rectangles", rects}};
  out["neighboring"] = s.neighboring ? to_json(*s.neighboring) : Json(nullptr);
  out["k"] = s.k;
  out["k2"] = s.k2;
  out["alpha"] = to_json(s.slopes.alpha);
  out["beta"] = to_json(s.slopes.beta);
  return out;
}

inline Json model_entry(const std::string& label, const UtaModel& m) {
  return {{"label", label}, {"slopes", slopes_json(m.slopes())}};
}

inline Json normalized_entry(const std::string& label, const UtaModel& m) {
  NormalizedModel n = renormalize_01(m, true);
  Json w = Json::array();
  for (const auto& x : *n.weights) w.push_back(to_json(x));
  return {{"label", label}, {"slopes", slopes_json(n.model.slopes())}, {"weights", w}};
}

}  // namespace io

inline std::vector<std::string> model_labels(const ElicitationOutcome& o) {
  if (o.kind == ElicitationOutcome::Kind::kIdenticalModels) return {"common"};
  return {"alpha", "beta"};
}

inline const char* outcome_name(const RunResult& r) {
  if (const auto* o = std::get_if<ElicitationOutcome>(&r)) {
    return o->kind == ElicitationOutcome::Kind::kIdenticalModels ? "identical" : "two-models";
  }
  return "degenerate";
}

inline std::string verdict(const RunResult& r, const std::vector<UtaModel>& truth) {
  const auto* o = std::get_if<ElicitationOutcome>(&r);
  if (!o) return "not recovered";
  bool ok = false;
  if (o->kind == ElicitationOutcome::Kind::kIdenticalModels) {
    ok = models_equivalent(truth[0], truth[1]) && models_equivalent(o->models[0], truth[0]);
  } else {
    ok = pairs_equivalent(o->models[0], o->models[1], truth[0], truth[1]);
  }
  return ok ? "exact match" : "mismatch";
}

/// The run summary written by `dualuta run` and returned by the session
/// service. The verdict is only present when the ground truth is known.
inline Json make_report(const RunResult& result, const std::vector<UtaModel>* truth = nullptr) {
  const ElicitationState& st = run_state(result);
  Json out;
  out["outcome"] = outcome_name(result);
  out["grid"] = io::to_json(st.grid);
  out["anchor"] = st.anchor ? io::to_json(*st.anchor) : Json(nullptr);

  Json models = Json::array();
  Json normalized = Json::array();
  if (const auto* o = std::get_if<ElicitationOutcome>(&result)) {
    auto labels = model_labels(*o);
    for (std::size_t k = 0; k < o->models.size(); ++k) {
      models.push_back(io::model_entry(labels[k], o->models[k]));
      normalized.push_back(io::normalized_entry(labels[k], o->models[k]));
    }
  }
  out["models"] = models;
  out["normalized_01"] = normalized;
  out["query_count"] = st.query_count();

  if (auto ex = exploited_rectangles(st)) {
    out["exploited_rectangles"] = {{"plane", Json::array({ex->i, ex->j})},
                                   {"count", ex->count()},
                                   {"already_scanned", ex->already_scanned},
                                   {"beyond_scan", ex->beyond_scan()},
                                   {"expected", ex->expected}};
  } else {
    out["exploited_rectangles"] = nullptr;
  }
  const PatternCounts& pc = st.counts;
  out["patterns"] = {
      {"scan", {{"runs", pc.scan_runs}, {"queries", pc.scan_queries}}},
      {"single_rectangle", {{"runs", pc.single_runs}, {"queries", pc.single_queries}}},
      {"neighboring_rectangles", {{"runs", pc.neighboring_runs}, {"queries", pc.neighboring_queries}}}};
  Json steps = Json::array();
  for (const auto& s : st.steps) steps.push_back(io::to_json(s));
  out["steps"] = steps;
  if (const auto* f = std::get_if<ElicitationFailure>(&result)) out["error"] = error_to_json(*f);
  if (truth) out["verdict"] = verdict(result, *truth);
  return out;
}

/// Exit status of `dualuta run`: 0 exact recovery, 1 wrong recovery, 2 no
/// recovery.
inline int verdict_exit_code(const RunResult& r, const std::vector<UtaModel>& truth) {
  std::string v = verdict(r, truth);
  if (v == "exact match") return 0;
  return v == "mismatch" ? 1 : 2;
}

}  // namespace dualuta
