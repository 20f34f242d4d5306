#pragma once

#include <string>

#include "dualuta/error.hpp"
#include "dualuta/model.hpp"
#include "dualuta/oracle.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

/// Three points of rectangle R(li, lj) of the plane (i, j) such that one
/// decision-maker is indifferent between a and b and the other between a and
/// c. b == c means both answered the same.
struct SrInfo {
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  IntervalIndex li = 1;
  IntervalIndex lj = 1;
  PlanePoint a;
  PlanePoint b;
  PlanePoint c;
  int case_id = 0;  ///< which branch of the pattern produced the points (1..3)
  int queries = 0;

  bool unanimous() const { return b == c; }
};

/// Indifferences a ~ b and a ~ c across the breakpoint x_{j,lj}: a lies in
/// R(li, lj), b and c lie on the left edge of R(li, lj + 1).
struct NrInfo {
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  IntervalIndex li = 1;
  IntervalIndex lj = 1;
  PlanePoint a;
  PlanePoint b;
  PlanePoint c;
  int queries = 0;
  int halvings = 0;         ///< probe moved left (an answer above the band)
  int slope_updates = 0;    ///< probe line flattened (an answer below the breakpoint)
  Rational initial_lambda;
  Rational initial_delta;

  bool unanimous() const { return b == c; }
};

struct PatternLimits {
  /// Resolution below which the neighboring-rectangles probe is considered
  /// stalled; sets the iteration budget together with the rectangle size.
  Rational precision_floor = Rational::from_integers(1, Rational::Integer(1) << 64);
};

namespace detail {

inline bool inside(const CriterionScale& s, IntervalIndex l, const Rational& v) {
  return s.interval_low(l) <= v && v <= s.interval_high(l);
}

inline std::string rect_label(IntervalIndex li, IntervalIndex lj) {
  return "(" + std::to_string(li) + "," + std::to_string(lj) + ")";
}

inline ErrorContext plane_context(CriterionIndex i, CriterionIndex j, IntervalIndex li, IntervalIndex lj) {
  return {{"plane", "(" + std::to_string(i) + "," + std::to_string(j) + ")"},
          {"rectangle", rect_label(li, lj)}};
}

}  // namespace detail

/// Checks the containment and non-degeneracy invariants of an SrInfo.
inline void validate(const SrInfo& info, const Grid& grid) {
  const CriterionScale& si = grid.scale(info.i);
  const CriterionScale& sj = grid.scale(info.j);
  auto ctx = detail::plane_context(info.i, info.j, info.li, info.lj);
  for (const PlanePoint* p : {&info.a, &info.b, &info.c}) {
    if (!detail::inside(si, info.li, p->vi) || !detail::inside(sj, info.lj, p->vj)) {
      throw Error(ErrorCode::kOracleFailure, "single-rectangle point outside its rectangle", ctx);
    }
  }
  if (info.b == info.a || info.c == info.a || info.b.vj == info.a.vj || info.c.vj == info.a.vj) {
    throw Error(ErrorCode::kOracleFailure, "single-rectangle answers are degenerate", ctx);
  }
}

/// Checks the containment invariants of an NrInfo. a may sit on the shared
/// breakpoint (a flat probe line); b and c must be strictly above it.
inline void validate(const NrInfo& info, const Grid& grid) {
  const CriterionScale& si = grid.scale(info.i);
  const CriterionScale& sj = grid.scale(info.j);
  auto ctx = detail::plane_context(info.i, info.j, info.li, info.lj);
  const Rational& mid = sj.interval_high(info.lj);
  if (!detail::inside(si, info.li, info.a.vi) || !detail::inside(sj, info.lj, info.a.vj)) {
    throw Error(ErrorCode::kOracleFailure, "neighboring-rectangles probe outside its rectangle", ctx);
  }
  for (const PlanePoint* p : {&info.b, &info.c}) {
    if (p->vi != si.interval_low(info.li) || !(p->vj > mid) || !(p->vj <= sj.interval_high(info.lj + 1))) {
      throw Error(ErrorCode::kOracleFailure, "neighboring-rectangles answer outside the upper rectangle", ctx);
    }
  }
  if (!(info.a.vi > si.interval_low(info.li))) {
    throw Error(ErrorCode::kOracleFailure, "neighboring-rectangles probe on the left edge", ctx);
  }
}

/// Collects single-rectangle information on R(li, lj) of the plane (i, j) in
/// at most two queries.
///
/// The first query goes from the bottom-right corner to the left edge. If
/// both answers stay on the left edge we are done; if only the lower one does,
/// the second query starts from that answer towards the bottom edge;
/// otherwise it starts from the top-left corner. A missing answer counts as
/// above the rectangle.
inline SrInfo single_rectangle(AnswerSource& src, const Grid& grid, CriterionIndex i, CriterionIndex j,
                               IntervalIndex li, IntervalIndex lj) {
  grid.check_interval(i, li);
  grid.check_interval(j, lj);
  if (i == j) throw Error(ErrorCode::kInvalidArgument, "a plane needs two distinct criteria");
  const CriterionScale& si = grid.scale(i);
  const CriterionScale& sj = grid.scale(j);
  const Rational& left = si.interval_low(li);
  const Rational& right = si.interval_high(li);
  const Rational& bottom = sj.interval_low(lj);
  const Rational& top = sj.interval_high(lj);
  auto ctx = detail::plane_context(i, j, li, lj);

  SrInfo info{.i = i, .j = j, .li = li, .lj = lj};
  AnswerPair first = src.answer(Query{i, j, right, bottom, left});
  info.queries = 1;

  auto bottom_edge = [&](const Rational& from_j) {
    AnswerPair second = src.answer(Query{j, i, from_j, left, bottom});
    info.queries = 2;
    if (!second.low || !second.high) {
      throw Error(ErrorCode::kOracleFailure, "follow-up query left unanswered", ctx);
    }
    info.b = {*second.low, bottom};
    info.c = {*second.high, bottom};
  };

  if (first.high && *first.high <= top) {
    info.case_id = 1;
    info.a = {right, bottom};
    info.b = {left, *first.low};
    info.c = {left, *first.high};
  } else if (first.low && *first.low <= top) {
    info.case_id = 2;
    info.a = {left, *first.low};
    bottom_edge(*first.low);
  } else {
    info.case_id = 3;
    info.a = {left, top};
    bottom_edge(top);
  }
  validate(info, grid);
  return info;
}

/// Iteration budget of neighboring_rectangles: 64 plus the number of halvings
/// that bring lambda0 * delta0 down to the precision floor.
inline int neighboring_iteration_budget(const Rational& lambda0, const Rational& delta0, const PatternLimits& limits) {
  Rational span = lambda0 * delta0 / limits.precision_floor;
  return 64 + (span > 1 ? ceil_log2(span) : 0);
}

/// Collects neighboring-rectangles information between R(li, lj) and
/// R(li, lj + 1) of the plane (i, j).
///
/// The probe (x_{i,li-1} + delta, x_{j,lj} - lambda * delta) starts at the
/// centre of the lower rectangle and is asked for its equivalent on the left
/// edge. When an answer overshoots the upper rectangle, delta is halved (the
/// probe slides towards the corner along its line). When an answer falls at or
/// below the shared breakpoint, lambda becomes half the observed drop, which
/// flattens the probe line below that decision-maker's indifference slope.
/// An answer exactly on the breakpoint means the probe line already follows
/// that slope; lambda is then halved, since a zero drop would put the next
/// probe on the breakpoint and leave the upper interval out of the record.
inline NrInfo neighboring_rectangles(AnswerSource& src, const Grid& grid, CriterionIndex i, IntervalIndex li,
                                     CriterionIndex j, IntervalIndex lj, const PatternLimits& limits = {}) {
  grid.check_interval(i, li);
  grid.check_interval(j, lj);
  if (i == j) throw Error(ErrorCode::kInvalidArgument, "a plane needs two distinct criteria");
  if (lj >= grid.intervals(j)) {
    throw Error(ErrorCode::kInvalidArgument, "neighboring rectangles need an interval above lj",
                {{"criterion", std::to_string(j)}, {"interval", std::to_string(lj)}});
  }
  const CriterionScale& si = grid.scale(i);
  const CriterionScale& sj = grid.scale(j);
  const Rational& left = si.interval_low(li);
  const Rational& below = sj.interval_low(lj);
  const Rational& mid = sj.interval_high(lj);
  const Rational& above = sj.interval_high(lj + 1);
  auto ctx = detail::plane_context(i, j, li, lj);

  Rational delta = (si.interval_high(li) - left) / 2;
  Rational lambda = (mid - below) / (2 * delta);
  NrInfo info{.i = i, .j = j, .li = li, .lj = lj, .initial_lambda = lambda, .initial_delta = delta};
  const int budget = neighboring_iteration_budget(lambda, delta, limits);

  for (;;) {
    PlanePoint probe{left + delta, mid - lambda * delta};
    AnswerPair ans = src.answer(Query{i, j, probe.vi, probe.vj, left});
    ++info.queries;

    bool low_above_mid = !ans.low || *ans.low > mid;
    if (low_above_mid && ans.high && *ans.high <= above) {
      info.a = probe;
      info.b = {left, *ans.low};
      info.c = {left, *ans.high};
      break;
    }
    if (info.queries > budget) {
      throw Error(ErrorCode::kIterationBudgetExceeded, "neighboring-rectangles probe did not settle",
                  detail::plane_context(i, j, li, lj));
    }
    if (low_above_mid) {
      delta /= 2;
      ++info.halvings;
    } else {
      if (*ans.low < below) throw Error(ErrorCode::kOracleFailure, "answer below the lower rectangle", ctx);
      lambda = *ans.low == mid ? lambda / 2 : (mid - *ans.low) / (2 * delta);
      ++info.slope_updates;
    }
  }
  validate(info, grid);
  return info;
}

}  // namespace dualuta
