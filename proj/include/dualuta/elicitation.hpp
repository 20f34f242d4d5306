#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dualuta/algebra.hpp"
#include "dualuta/error.hpp"
#include "dualuta/model.hpp"
#include "dualuta/oracle.hpp"
#include "dualuta/patterns.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

struct IntervalKey {
  CriterionIndex criterion = 0;
  IntervalIndex interval = 1;
  friend auto operator<=>(const IntervalKey&, const IntervalKey&) = default;
  std::string label() const { return "(" + std::to_string(criterion) + "," + std::to_string(interval) + ")"; }
};

/// Rectangle R(li, lj) of the oriented plane (i, j).
struct RectangleKey {
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  IntervalIndex li = 1;
  IntervalIndex lj = 1;
  friend auto operator<=>(const RectangleKey&, const RectangleKey&) = default;

  /// Same rectangle with the lower criterion first.
  RectangleKey canonical() const { return i < j ? *this : RectangleKey{j, i, lj, li}; }
  std::string label() const {
    return "plane (" + std::to_string(i) + "," + std::to_string(j) + ") R(" + std::to_string(li) + "," +
           std::to_string(lj) + ")";
  }
};

/// A rectangle on which both decision-makers answered identically: both
/// satisfy gamma_{j,lj} = ratio * gamma_{i,li}.
struct UnanimityRecord {
  RectangleKey rectangle;
  Rational ratio;
};

enum class StepKind { kInitialization, kSingleNeighboring, kDownward, kTwoSingle, kUnanimityRecord };

inline std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kInitialization: return "initialization";
    case StepKind::kSingleNeighboring: return "single+neighboring";
    case StepKind::kDownward: return "downward";
    case StepKind::kTwoSingle: return "two-single";
    case StepKind::kUnanimityRecord: return "unanimity-record";
  }
  return "unknown";
}

/// How one interval got identified.
struct StepRecord {
  StepKind kind = StepKind::kInitialization;
  IntervalKey target;
  std::vector<IntervalKey> references;
  std::vector<RectangleKey> rectangles;  ///< single-rectangle records used
  std::optional<RectangleKey> neighboring;
  std::optional<SrCoefficients> sr;
  std::optional<SrCoefficients> sr2;
  std::optional<NrCoefficients> nr;
  SlopePair slopes;
  int k = 0;
  int k2 = 0;
  bool unanimous = false;
};

struct PatternCounts {
  int scan_runs = 0;
  int scan_queries = 0;
  int single_runs = 0;
  int single_queries = 0;
  int neighboring_runs = 0;
  int neighboring_queries = 0;
};

struct ElicitationOptions {
  /// Residual allowed in the disambiguation systems. Zero means exact
  /// equality, which is what simulated sources need.
  Rational tolerance;
  PatternLimits limits;
};

struct ElicitationState {
  Grid grid;
  std::map<IntervalKey, SlopePair> known;
  std::optional<IntervalKey> anchor;
  std::optional<RectangleKey> initial_rectangle;
  std::set<CriterionIndex> complete;
  Transcript transcript;
  std::vector<UnanimityRecord> unanimity;
  std::set<RectangleKey> scanned;
  std::vector<StepRecord> steps;
  PatternCounts counts;

  int query_count() const { return static_cast<int>(transcript.size()); }
  const SlopePair* find(IntervalKey key) const {
    auto it = known.find(key);
    return it == known.end() ? nullptr : &it->second;
  }
};

struct ElicitationOutcome {
  enum class Kind { kTwoModels, kIdenticalModels };
  Kind kind = Kind::kTwoModels;
  /// Two models (unordered pair, both with unit slope on the anchor interval)
  /// or the single common model.
  std::vector<UtaModel> models;
  ElicitationState state;

  const Transcript& transcript() const { return state.transcript; }
  int query_count() const { return state.query_count(); }
};

/// A failed run: the original error plus everything asked so far.
class ElicitationFailure : public Error {
 public:
  ElicitationFailure(const Error& cause, ElicitationState state)
      : Error(cause), state_(std::move(state)) {}
  const ElicitationState& state() const { return state_; }

 private:
  ElicitationState state_;
};

/// Identifies two anonymous UTA models through matching queries.
///
/// The run scans the planes (0, j) for a rectangle where the two
/// decision-makers disagree, fixes the labelling and the unit slope there,
/// chains through every interval of that pair of criteria, then brings in
/// each remaining criterion from two references of different alpha/beta
/// ratio.
class Elicitor {
 public:
  Elicitor(AnswerSource& source, Grid grid, ElicitationOptions options = {})
      : options_(std::move(options)), recorder_(source, state_.transcript) {
    state_.grid = std::move(grid);
  }
  Elicitor(const Elicitor&) = delete;
  Elicitor& operator=(const Elicitor&) = delete;

  const ElicitationState& state() const { return state_; }

  /// Scans the planes (0, 1), (0, 2), ... in growing squares (every rectangle
  /// with max(li, lj) = t before t + 1) and returns the first single-rectangle
  /// record with distinct answers. nullopt means every rectangle was
  /// unanimous; the records are kept in the state.
  std::optional<SrInfo> find_initial_rectangle() {
    const Grid& g = state_.grid;
    for (CriterionIndex j = 1; j < g.size(); ++j) {
      const int li_max = g.intervals(0);
      const int lj_max = g.intervals(j);
      for (int t = 1; t <= std::max(li_max, lj_max); ++t) {
        std::vector<std::pair<int, int>> shell;
        if (t <= li_max) {
          for (int lj = 1; lj <= std::min(t, lj_max); ++lj) shell.emplace_back(t, lj);
        }
        if (t <= lj_max) {
          for (int li = 1; li < t && li <= li_max; ++li) shell.emplace_back(li, t);
        }
        for (auto [li, lj] : shell) {
          RectangleKey rect{0, j, li, lj};
          const SrInfo& info = single_on(rect, /*scan=*/true);
          state_.scanned.insert(rect);
          if (!info.unanimous()) return info;
          state_.unanimity.push_back({rect, sr_coefficients(info).for_b});
        }
      }
    }
    return std::nullopt;
  }

  /// Unit slope on interval li of criterion i for both decision-makers; the
  /// one who answered b is labelled alpha.
  void initialize(const SrInfo& found) {
    if (state_.anchor) throw Error(ErrorCode::kStateError, "elicitation already initialized");
    if (found.unanimous()) {
      throw Error(ErrorCode::kInvalidArgument, "initialization needs two distinct answers",
                  detail::plane_context(found.i, found.j, found.li, found.lj));
    }
    SrCoefficients coef = sr_coefficients(found);
    IntervalKey anchor{found.i, found.li};
    RectangleKey rect{found.i, found.j, found.li, found.lj};
    state_.anchor = anchor;
    state_.initial_rectangle = rect;
    StepRecord anchor_step{.kind = StepKind::kInitialization, .target = anchor, .rectangles = {rect}};
    set_known(anchor, {1, 1}, anchor_step);
    StepRecord step{.kind = StepKind::kInitialization,
                    .target = {found.j, found.lj},
                    .references = {anchor},
                    .rectangles = {rect},
                    .sr = coef};
    set_known(step.target, {coef.for_b, coef.for_c}, step);
  }

  /// Identifies every interval of criteria i and j: upward on j, upward on i,
  /// then downward on j and i, using the other criterion of the pair as
  /// reference.
  void elicit_pair(CriterionIndex i, CriterionIndex j) {
    require_initialized();
    const RectangleKey& init = *state_.initial_rectangle;
    std::vector<IntervalKey> plan;
    const int li0 = init.i == i ? init.li : init.lj;
    const int lj0 = init.i == i ? init.lj : init.li;
    for (int l = lj0 + 1; l <= state_.grid.intervals(j); ++l) plan.push_back({j, l});
    for (int l = li0 + 1; l <= state_.grid.intervals(i); ++l) plan.push_back({i, l});
    for (int l = lj0 - 1; l >= 1; --l) plan.push_back({j, l});
    for (int l = li0 - 1; l >= 1; --l) plan.push_back({i, l});
    auto references_for = [&](CriterionIndex c) { return std::set<CriterionIndex>{c == i ? j : i}; };
    work_through(plan, references_for);
    state_.complete.insert(i);
    state_.complete.insert(j);
  }

  /// Identifies criterion c from the completed criteria: interval 1 from two
  /// single-rectangle records, then upward interval by interval.
  void elicit_remaining(CriterionIndex c) {
    require_initialized();
    if (state_.complete.contains(c)) throw Error(ErrorCode::kStateError, "criterion already elicited");
    if (state_.complete.size() < 2) throw Error(ErrorCode::kStateError, "the first pair must be elicited first");
    const std::set<CriterionIndex> refs = state_.complete;
    if (!state_.find({c, 1})) {
      last_error_.reset();
      if (!try_two_single(c, 1, refs)) throw last_error_for({c, 1});
    }
    std::vector<IntervalKey> plan;
    for (int l = 2; l <= state_.grid.intervals(c); ++l) plan.push_back({c, l});
    work_through(plan, [&](CriterionIndex) { return refs; });
    state_.complete.insert(c);
  }

  /// Full run. Errors other than a replay running out of answers are
  /// rethrown as ElicitationFailure with the transcript so far.
  ElicitationOutcome run() {
    try {
      std::optional<SrInfo> found = find_initial_rectangle();
      if (!found) return identical_outcome();
      initialize(*found);
      elicit_pair(found->i, found->j);
      for (CriterionIndex c = 0; c < state_.grid.size(); ++c) {
        if (!state_.complete.contains(c)) elicit_remaining(c);
      }
      cross_check_unanimity();
      ElicitationOutcome out{ElicitationOutcome::Kind::kTwoModels, {build_model(true), build_model(false)}, state_};
      return out;
    } catch (const ReplayTranscript::Exhausted&) {
      throw;
    } catch (const ElicitationFailure&) {
      throw;
    } catch (const Error& e) {
      throw ElicitationFailure(e, state_);
    }
  }

 private:
  void require_initialized() const {
    if (!state_.anchor) throw Error(ErrorCode::kStateError, "elicitation not initialized");
  }

  void set_known(IntervalKey key, SlopePair slopes, StepRecord step) {
    if (slopes.alpha.sign() <= 0 || slopes.beta.sign() <= 0) {
      throw Error(ErrorCode::kInconsistentAnswers, "identified slope is not positive",
                  {{"interval", key.label()}});
    }
    if (const SlopePair* old = state_.find(key)) {
      if (abs(old->alpha - slopes.alpha) > options_.tolerance || abs(old->beta - slopes.beta) > options_.tolerance) {
        throw Error(ErrorCode::kInconsistentAnswers, "interval identified twice with different slopes",
                    {{"interval", key.label()}});
      }
      return;
    }
    state_.known.emplace(key, slopes);
    step.target = key;
    step.slopes = std::move(slopes);
    state_.steps.push_back(std::move(step));
  }

  const SrInfo& single_on(const RectangleKey& r, bool scan = false) {
    auto it = sr_cache_.find(r);
    if (it != sr_cache_.end()) return it->second;
    SrInfo info = single_rectangle(recorder_, state_.grid, r.i, r.j, r.li, r.lj);
    if (scan) {
      ++state_.counts.scan_runs;
      state_.counts.scan_queries += info.queries;
    } else {
      ++state_.counts.single_runs;
      state_.counts.single_queries += info.queries;
    }
    return sr_cache_.emplace(r, std::move(info)).first->second;
  }

  /// Neighboring-rectangles record between R(li, lj) and R(li, lj + 1).
  const NrInfo& neighboring_on(const RectangleKey& r) {
    auto it = nr_cache_.find(r);
    if (it != nr_cache_.end()) return it->second;
    NrInfo info = neighboring_rectangles(recorder_, state_.grid, r.i, r.li, r.j, r.lj, options_.limits);
    ++state_.counts.neighboring_runs;
    state_.counts.neighboring_queries += info.queries;
    return nr_cache_.emplace(r, std::move(info)).first->second;
  }

  /// Known intervals on the given criteria, most preferred first: the anchor,
  /// then the interval fixed at initialization, then by (criterion, interval).
  std::vector<IntervalKey> reference_candidates(const std::set<CriterionIndex>& criteria) const {
    std::vector<IntervalKey> out;
    auto push = [&](IntervalKey k) {
      if (criteria.contains(k.criterion) && state_.find(k) &&
          std::find(out.begin(), out.end(), k) == out.end()) {
        out.push_back(k);
      }
    };
    push(*state_.anchor);
    push({state_.initial_rectangle->j, state_.initial_rectangle->lj});
    for (const auto& [k, _] : state_.known) push(k);
    return out;
  }

  static bool recoverable(const Error& e) {
    return e.code() == ErrorCode::kDegenerate || e.code() == ErrorCode::kPhiZero;
  }

  bool try_upward(CriterionIndex c, IntervalIndex l, const std::set<CriterionIndex>& criteria) {
    const SlopePair below = *state_.find({c, l - 1});
    bool tried = false;
    for (const IntervalKey& ref : reference_candidates(criteria)) {
      const SlopePair refs = *state_.find(ref);
      if (refs.ratio() == below.ratio()) continue;
      tried = true;
      RectangleKey sr_rect{ref.criterion, c, ref.interval, l};
      RectangleKey nr_rect{ref.criterion, c, ref.interval, l - 1};
      try {
        SrCoefficients sr = sr_coefficients(single_on(sr_rect));
        NrCoefficients nr = nr_coefficients(neighboring_on(nr_rect), state_.grid);
        SlopePairResult res = solve_sr_nr(sr, nr, refs, below, options_.tolerance);
        set_known({c, l}, res.slopes(),
                  StepRecord{.kind = StepKind::kSingleNeighboring,
                             .references = {ref, {c, l - 1}},
                             .rectangles = {sr_rect},
                             .neighboring = nr_rect,
                             .sr = sr,
                             .nr = nr,
                             .k = res.k,
                             .k2 = res.k2,
                             .unanimous = res.unanimous});
        return true;
      } catch (const Error& e) {
        if (!recoverable(e)) throw;
        remember(e.with_context("target", IntervalKey{c, l}.label())
                     .with_context("reference", ref.label())
                     .with_context("rectangle", sr_rect.label()));
      }
    }
    if (!tried) no_reference({c, l});
    return false;
  }

  bool try_downward(CriterionIndex c, IntervalIndex l, const std::set<CriterionIndex>& criteria) {
    const SlopePair above = *state_.find({c, l + 1});
    bool tried = false;
    for (const IntervalKey& ref : reference_candidates(criteria)) {
      const SlopePair refs = *state_.find(ref);
      if (refs.ratio() == above.ratio()) continue;
      tried = true;
      RectangleKey sr_rect{ref.criterion, c, ref.interval, l};
      RectangleKey nr_rect{ref.criterion, c, ref.interval, l};
      try {
        SrCoefficients sr = sr_coefficients(single_on(sr_rect));
        NrCoefficients nr = nr_coefficients(neighboring_on(nr_rect), state_.grid);
        SlopePairResult res = solve_downward(sr, nr, refs, above, options_.tolerance);
        set_known({c, l}, res.slopes(),
                  StepRecord{.kind = StepKind::kDownward,
                             .references = {ref, {c, l + 1}},
                             .rectangles = {sr_rect},
                             .neighboring = nr_rect,
                             .sr = sr,
                             .nr = nr,
                             .k = res.k,
                             .k2 = res.k2,
                             .unanimous = res.unanimous});
        return true;
      } catch (const Error& e) {
        if (!recoverable(e)) throw;
        remember(e.with_context("target", IntervalKey{c, l}.label())
                     .with_context("reference", ref.label())
                     .with_context("rectangle", sr_rect.label()));
      }
    }
    if (!tried) no_reference({c, l});
    return false;
  }

  bool try_two_single(CriterionIndex c, IntervalIndex l, const std::set<CriterionIndex>& criteria) {
    const std::vector<IntervalKey> cands = reference_candidates(criteria);
    bool tried = false;
    for (std::size_t a = 0; a < cands.size(); ++a) {
      for (std::size_t b = a + 1; b < cands.size(); ++b) {
        const SlopePair r1 = *state_.find(cands[a]);
        const SlopePair r2 = *state_.find(cands[b]);
        if (r1.ratio() == r2.ratio()) continue;
        tried = true;
        RectangleKey rect1{cands[a].criterion, c, cands[a].interval, l};
        RectangleKey rect2{cands[b].criterion, c, cands[b].interval, l};
        try {
          SrCoefficients sr1 = sr_coefficients(single_on(rect1));
          SrCoefficients sr2 = sr_coefficients(single_on(rect2));
          SlopePairResult res = solve_two_sr(sr1, sr2, r1, r2, options_.tolerance);
          set_known({c, l}, res.slopes(),
                    StepRecord{.kind = StepKind::kTwoSingle,
                               .references = {cands[a], cands[b]},
                               .rectangles = {rect1, rect2},
                               .sr = sr1,
                               .sr2 = sr2,
                               .k = res.k,
                               .k2 = res.k2,
                               .unanimous = res.unanimous});
          return true;
        } catch (const Error& e) {
          if (!recoverable(e)) throw;
          remember(e.with_context("target", IntervalKey{c, l}.label()).with_context("rectangle", rect1.label()));
        }
      }
    }
    if (!tried) no_reference({c, l});
    return false;
  }

  /// Uses a scanned unanimous rectangle linking (c, l) to a known interval.
  bool try_unanimity(CriterionIndex c, IntervalIndex l) {
    for (const UnanimityRecord& rec : state_.unanimity) {
      const RectangleKey& r = rec.rectangle;
      std::optional<SlopePair> slopes;
      IntervalKey ref;
      if (r.j == c && r.lj == l && state_.find({r.i, r.li})) {
        ref = {r.i, r.li};
        const SlopePair& g = *state_.find(ref);
        slopes = SlopePair{rec.ratio * g.alpha, rec.ratio * g.beta};
      } else if (r.i == c && r.li == l && state_.find({r.j, r.lj})) {
        ref = {r.j, r.lj};
        const SlopePair& g = *state_.find(ref);
        slopes = SlopePair{g.alpha / rec.ratio, g.beta / rec.ratio};
      }
      if (slopes) {
        set_known({c, l}, *slopes,
                  StepRecord{.kind = StepKind::kUnanimityRecord,
                             .references = {ref},
                             .rectangles = {r},
                             .sr = SrCoefficients{rec.ratio, rec.ratio},
                             .unanimous = true});
        return true;
      }
    }
    return false;
  }

  bool try_identify(IntervalKey t, const std::set<CriterionIndex>& criteria) {
    const auto [c, l] = t;
    last_error_.reset();
    if (state_.find({c, l - 1}) && try_upward(c, l, criteria)) return true;
    if (l < state_.grid.intervals(c) && state_.find({c, l + 1})) {
      if (try_downward(c, l, criteria)) return true;
      if (try_unanimity(c, l)) return true;
    }
    const bool adjacent_known = state_.find({c, l - 1}) || (l < state_.grid.intervals(c) && state_.find({c, l + 1}));
    if (adjacent_known && try_two_single(c, l, criteria)) return true;
    return false;
  }

  /// Identifies the planned intervals in order, revisiting the ones that were
  /// blocked until no further progress is possible.
  template <typename RefsFor>
  void work_through(std::vector<IntervalKey> plan, RefsFor references_for) {
    std::erase_if(plan, [&](const IntervalKey& k) { return state_.find(k) != nullptr; });
    while (!plan.empty()) {
      bool progress = false;
      for (auto it = plan.begin(); it != plan.end();) {
        if (try_identify(*it, references_for(it->criterion))) {
          it = plan.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
      if (!progress) throw last_error_for(plan.front());
    }
  }

  void remember(Error e) { last_error_ = std::move(e); }

  void no_reference(IntervalKey target) {
    if (last_error_) return;
    last_error_ = Error(ErrorCode::kNoValidReferencePair, "no known reference interval separates the two models",
                        {{"target", target.label()}});
  }

  Error last_error_for(IntervalKey target) const {
    if (last_error_) return *last_error_;
    return Error(ErrorCode::kNoValidReferencePair, "interval could not be reached", {{"target", target.label()}});
  }

  void cross_check_unanimity() const {
    for (const UnanimityRecord& rec : state_.unanimity) {
      const RectangleKey& r = rec.rectangle;
      const SlopePair* gi = state_.find({r.i, r.li});
      const SlopePair* gj = state_.find({r.j, r.lj});
      if (!gi || !gj) continue;
      if (abs(rec.ratio * gi->alpha - gj->alpha) > options_.tolerance ||
          abs(rec.ratio * gi->beta - gj->beta) > options_.tolerance) {
        throw Error(ErrorCode::kInconsistentAnswers, "identified slopes contradict a unanimous rectangle",
                    {{"rectangle", r.label()}});
      }
    }
  }

  ElicitationOutcome identical_outcome() {
    const Grid& g = state_.grid;
    IntervalKey anchor{0, 1};
    state_.anchor = anchor;
    set_known(anchor, {1, 1}, StepRecord{.kind = StepKind::kInitialization});
    auto ratio_at = [&](CriterionIndex j, int li, int lj) -> const Rational& {
      for (const auto& rec : state_.unanimity) {
        if (rec.rectangle == RectangleKey{0, j, li, lj}) return rec.ratio;
      }
      throw Error(ErrorCode::kStateError, "missing unanimity record");
    };
    auto record_step = [&](IntervalKey target, IntervalKey ref, RectangleKey rect, const Rational& ratio) {
      return StepRecord{.kind = StepKind::kUnanimityRecord,
                        .target = target,
                        .references = {ref},
                        .rectangles = {rect},
                        .sr = SrCoefficients{ratio, ratio},
                        .unanimous = true};
    };
    for (CriterionIndex j = 1; j < g.size(); ++j) {
      for (int lj = 1; lj <= g.intervals(j); ++lj) {
        const Rational& r = ratio_at(j, 1, lj);
        set_known({j, lj}, {r, r}, record_step({j, lj}, anchor, {0, j, 1, lj}, r));
      }
    }
    const SlopePair first = *state_.find({1, 1});
    for (int li = 2; li <= g.intervals(0); ++li) {
      const Rational& r = ratio_at(1, li, 1);
      set_known({0, li}, {first.alpha / r, first.beta / r}, record_step({0, li}, {1, 1}, {0, 1, li, 1}, r));
    }
    for (CriterionIndex c = 0; c < g.size(); ++c) state_.complete.insert(c);
    cross_check_unanimity();
    return ElicitationOutcome{ElicitationOutcome::Kind::kIdenticalModels, {build_model(true)}, state_};
  }

  UtaModel build_model(bool alpha) const {
    const Grid& g = state_.grid;
    SlopeTable slopes(g.size());
    for (CriterionIndex c = 0; c < g.size(); ++c) {
      for (int l = 1; l <= g.intervals(c); ++l) {
        const SlopePair* s = state_.find({c, l});
        if (!s) {
          throw Error(ErrorCode::kStateError, "interval left unidentified", {{"interval", IntervalKey{c, l}.label()}});
        }
        slopes[c].push_back(alpha ? s->alpha : s->beta);
      }
    }
    return UtaModel(g, std::move(slopes));
  }

  ElicitationOptions options_;
  ElicitationState state_;
  RecordingSource recorder_;
  std::map<RectangleKey, SrInfo> sr_cache_;
  std::map<RectangleKey, NrInfo> nr_cache_;
  std::optional<Error> last_error_;
};

/// Convenience wrapper: one complete run against `source`.
inline ElicitationOutcome elicit(AnswerSource& source, const Grid& grid, ElicitationOptions options = {}) {
  Elicitor e(source, grid, std::move(options));
  return e.run();
}

}  // namespace dualuta
