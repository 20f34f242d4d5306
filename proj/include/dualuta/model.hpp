#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dualuta/error.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

/// Criteria are addressed by 0-based position in the grid. Intervals use one
/// convention everywhere: interval l (1 <= l <= L) is [x_{l-1}, x_l].
using CriterionIndex = std::size_t;
using IntervalIndex = int;

/// Breakpoints x_0 < x_1 < ... < x_L of one criterion.
struct CriterionScale {
  std::string name;
  std::vector<Rational> breakpoints;

  int intervals() const { return static_cast<int>(breakpoints.size()) - 1; }
  const Rational& lowest() const { return breakpoints.front(); }
  const Rational& highest() const { return breakpoints.back(); }
  /// Left end of interval l.
  const Rational& interval_low(IntervalIndex l) const { return breakpoints.at(l - 1); }
  /// Right end of interval l.
  const Rational& interval_high(IntervalIndex l) const { return breakpoints.at(l); }
  bool contains(const Rational& x) const { return lowest() <= x && x <= highest(); }

  /// Interval containing x; a breakpoint belongs to the interval on its left
  /// (x_0 belongs to interval 1).
  IntervalIndex interval_of(const Rational& x) const {
    for (IntervalIndex l = 1; l <= intervals(); ++l) {
      if (x <= interval_high(l)) return l;
    }
    return intervals();
  }

  friend bool operator==(const CriterionScale&, const CriterionScale&) = default;
};

class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<CriterionScale> scales) : scales_(std::move(scales)) { validate(); }

  std::size_t size() const { return scales_.size(); }
  const CriterionScale& operator[](CriterionIndex i) const { return scales_.at(i); }
  const CriterionScale& scale(CriterionIndex i) const { return scales_.at(i); }
  const std::vector<CriterionScale>& scales() const { return scales_; }
  int intervals(CriterionIndex i) const { return scales_.at(i).intervals(); }

  void check_criterion(CriterionIndex i) const {
    if (i >= scales_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "criterion index out of range",
                  {{"criterion", std::to_string(i)}});
    }
  }
  void check_interval(CriterionIndex i, IntervalIndex l) const {
    check_criterion(i);
    if (l < 1 || l > intervals(i)) {
      throw Error(ErrorCode::kInvalidArgument, "interval label out of range",
                  {{"criterion", std::to_string(i)}, {"interval", std::to_string(l)}});
    }
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  void validate() const {
    if (scales_.size() < 2) throw Error(ErrorCode::kInvalidGrid, "a grid needs at least two criteria");
    std::set<std::string> names;
    for (const auto& s : scales_) {
      if (!names.insert(s.name).second) {
        throw Error(ErrorCode::kInvalidGrid, "duplicate criterion name", {{"name", s.name}});
      }
      if (s.breakpoints.size() < 2) {
        throw Error(ErrorCode::kInvalidGrid, "a criterion needs at least one interval", {{"name", s.name}});
      }
      for (std::size_t k = 1; k < s.breakpoints.size(); ++k) {
        if (!(s.breakpoints[k - 1] < s.breakpoints[k])) {
          throw Error(ErrorCode::kInvalidGrid, "breakpoints must be strictly increasing",
                      {{"name", s.name}, {"index", std::to_string(k)}});
        }
      }
    }
  }

  std::vector<CriterionScale> scales_;
};

/// Per-criterion slopes of the marginal value functions of one decision-maker.
/// Each marginal is anchored at u_i(x_{i,0}) = 0.
using SlopeTable = std::vector<std::vector<Rational>>;

class UtaModel {
 public:
  UtaModel(Grid grid, SlopeTable slopes) : grid_(std::move(grid)), slopes_(std::move(slopes)) {
    if (slopes_.size() != grid_.size()) {
      throw Error(ErrorCode::kInvalidModel, "one slope vector per criterion expected");
    }
    for (CriterionIndex i = 0; i < grid_.size(); ++i) {
      if (static_cast<int>(slopes_[i].size()) != grid_.intervals(i)) {
        throw Error(ErrorCode::kInvalidModel, "slope vector length must equal the interval count",
                    {{"criterion", std::to_string(i)}});
      }
      for (const auto& g : slopes_[i]) {
        if (g.sign() <= 0) {
          throw Error(ErrorCode::kInvalidModel, "slopes must be strictly positive",
                      {{"criterion", std::to_string(i)}, {"slope", g.to_string()}});
        }
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const SlopeTable& slopes() const { return slopes_; }
  const Rational& slope(CriterionIndex i, IntervalIndex l) const { return slopes_.at(i).at(l - 1); }

  friend bool operator==(const UtaModel&, const UtaModel&) = default;

 private:
  Grid grid_;
  SlopeTable slopes_;
};

/// A point of the plane X_i x X_j; the criteria are carried by the enclosing
/// record (SrInfo, NrInfo, query).
struct PlanePoint {
  Rational vi;
  Rational vj;
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// u_i(x), exact, with u_i(x_{i,0}) = 0.
inline Rational eval_marginal(const UtaModel& model, CriterionIndex i, const Rational& x) {
  const CriterionScale& s = model.grid().scale(i);
  if (!s.contains(x)) {
    throw Error(ErrorCode::kOutOfScale, "value outside the criterion scale",
                {{"criterion", s.name}, {"value", x.to_string()}});
  }
  Rational u;
  for (IntervalIndex l = 1; l <= s.intervals(); ++l) {
    const Rational& lo = s.interval_low(l);
    const Rational& hi = s.interval_high(l);
    if (x <= hi) return u + model.slope(i, l) * (x - lo);
    u += model.slope(i, l) * (hi - lo);
  }
  return u;
}

/// u_i(x_{i,L_i}).
inline Rational marginal_range(const UtaModel& model, CriterionIndex i) {
  return eval_marginal(model, i, model.grid().scale(i).highest());
}

/// The unique x with u_i(x) = v, or nullopt when v is outside [0, u_i(x_{i,L_i})].
inline std::optional<Rational> invert_marginal(const UtaModel& model, CriterionIndex i, const Rational& v) {
  if (v.sign() < 0) return std::nullopt;
  const CriterionScale& s = model.grid().scale(i);
  Rational u;
  for (IntervalIndex l = 1; l <= s.intervals(); ++l) {
    const Rational& lo = s.interval_low(l);
    Rational next = u + model.slope(i, l) * (s.interval_high(l) - lo);
    if (v <= next) return lo + (v - u) / model.slope(i, l);
    u = std::move(next);
  }
  return std::nullopt;
}

inline UtaModel scale_model(const UtaModel& model, const Rational& factor) {
  if (factor.sign() <= 0) throw Error(ErrorCode::kInvalidArgument, "scale factor must be positive");
  SlopeTable slopes = model.slopes();
  for (auto& row : slopes) {
    for (auto& g : row) g *= factor;
  }
  return UtaModel(model.grid(), std::move(slopes));
}

/// Divides every slope by gamma_{i,l}, so that interval l of criterion i has unit slope.
inline UtaModel normalize_unit_slope(const UtaModel& model, CriterionIndex i, IntervalIndex l) {
  model.grid().check_interval(i, l);
  return scale_model(model, Rational(1) / model.slope(i, l));
}

/// Model rescaled to the usual convention sum_i u_i(x_{i,L_i}) = 1 (each
/// marginal still starts at 0). `weights` holds u_i(x_{i,L_i}) when requested.
struct NormalizedModel {
  UtaModel model;
  std::optional<std::vector<Rational>> weights;
};

inline NormalizedModel renormalize_01(const UtaModel& model, bool weights_out = false) {
  Rational total;
  for (CriterionIndex i = 0; i < model.grid().size(); ++i) total += marginal_range(model, i);
  UtaModel scaled = scale_model(model, Rational(1) / total);
  NormalizedModel out{scaled, std::nullopt};
  if (weights_out) {
    std::vector<Rational> w;
    for (CriterionIndex i = 0; i < scaled.grid().size(); ++i) w.push_back(marginal_range(scaled, i));
    out.weights = std::move(w);
  }
  return out;
}

/// True iff b's slopes are a single positive multiple of a's (same preferences).
inline bool models_equivalent(const UtaModel& a, const UtaModel& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::kGridMismatch, "models are defined on different grids");
  const Rational c = b.slope(0, 1) / a.slope(0, 1);
  for (CriterionIndex i = 0; i < a.grid().size(); ++i) {
    for (IntervalIndex l = 1; l <= a.grid().intervals(i); ++l) {
      if (b.slope(i, l) != c * a.slope(i, l)) return false;
    }
  }
  return true;
}

/// Unordered-pair equivalence: {a1, a2} matches {b1, b2} under models_equivalent.
inline bool pairs_equivalent(const UtaModel& a1, const UtaModel& a2, const UtaModel& b1, const UtaModel& b2) {
  return (models_equivalent(a1, b1) && models_equivalent(a2, b2)) ||
         (models_equivalent(a1, b2) && models_equivalent(a2, b1));
}

}  // namespace dualuta
