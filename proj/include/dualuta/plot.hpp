#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dualuta/io.hpp"
#include "dualuta/model.hpp"

namespace dualuta {

/// Level set u_i(v_i) + u_j(v_j) = level of one model in the plane (i, j),
/// every other criterion held at its lowest value. The curve is linear inside
/// each rectangle, so its vertices are exactly its crossings of the grid lines.
struct IndifferenceCurve {
  std::string model;
  Rational level;
  std::vector<PlanePoint> points;  ///< ordered by increasing v_i
};

inline std::vector<PlanePoint> level_polyline(const UtaModel& m, CriterionIndex i, CriterionIndex j,
                                              const Rational& level) {
  const Grid& g = m.grid();
  g.check_criterion(i);
  g.check_criterion(j);
  if (i == j) throw Error(ErrorCode::kInvalidArgument, "a plane needs two distinct criteria");
  std::vector<PlanePoint> pts;
  for (const Rational& x : g.scale(i).breakpoints) {
    if (auto y = invert_marginal(m, j, level - eval_marginal(m, i, x))) pts.push_back({x, *y});
  }
  for (const Rational& y : g.scale(j).breakpoints) {
    if (auto x = invert_marginal(m, i, level - eval_marginal(m, j, y))) pts.push_back({*x, y});
  }
  std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) {
    return a.vi < b.vi || (a.vi == b.vi && b.vj < a.vj);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// The levels k * U / (count + 1), k = 1..count, where U is the model's
/// largest value in the plane.
inline std::vector<Rational> even_levels(const UtaModel& m, CriterionIndex i, CriterionIndex j, int count) {
  Rational top = marginal_range(m, i) + marginal_range(m, j);
  std::vector<Rational> out;
  for (int k = 1; k <= count; ++k) out.push_back(top * k / (count + 1));
  return out;
}

struct NamedModel {
  std::string name;
  const UtaModel* model;
};

/// Curves for every model at the given levels, or at `count` evenly spaced
/// levels per model when `levels` is empty. Levels the model cannot reach
/// produce no curve.
inline std::vector<IndifferenceCurve> indifference_curves(const std::vector<NamedModel>& models, CriterionIndex i,
                                                          CriterionIndex j, int count,
                                                          const std::vector<Rational>& levels = {}) {
  std::vector<IndifferenceCurve> out;
  for (const auto& [name, m] : models) {
    for (const Rational& v : levels.empty() ? even_levels(*m, i, j, count) : levels) {
      std::vector<PlanePoint> pts = level_polyline(*m, i, j, v);
      if (!pts.empty()) out.push_back({name, v, std::move(pts)});
    }
  }
  return out;
}

inline Json curves_to_json(CriterionIndex i, CriterionIndex j, const std::vector<IndifferenceCurve>& curves) {
  Json list = Json::array();
  for (const auto& c : curves) {
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back(Json::array({io::to_json(p.vi), io::to_json(p.vj)}));
    list.push_back({{"model", c.model}, {"level", io::to_json(c.level)}, {"points", pts}});
  }
  return {{"plane", Json::array({i, j})}, {"curves", list}};
}

}  // namespace dualuta
