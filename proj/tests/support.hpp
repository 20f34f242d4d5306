#pragma once

// Fixtures and reference computations used by the tests. The reference
// computations deliberately avoid the library's own evaluation and solving
// code: marginals are interpolated from cumulative breakpoint values, and the
// disambiguation checks work from the raw indifference points.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "dualuta/dualuta.hpp"

namespace testing_support {

using namespace dualuta;

// ---------------------------------------------------------------------------
// Fixtures

/// Two criteria on [0,4] with a breakpoint at 2.
inline Grid f1_grid() { return Grid({{"crit1", {0, 2, 4}}, {"crit2", {0, 2, 4}}}); }

inline UtaModel f1_alpha() { return UtaModel(f1_grid(), {{1, 2}, {1, 3}}); }
inline UtaModel f1_beta() { return UtaModel(f1_grid(), {{1, 1}, {2, 1}}); }

/// F1 with a third criterion on which the two models differ.
inline Grid f1_three_grid() { return Grid({{"crit1", {0, 2, 4}}, {"crit2", {0, 2, 4}}, {"crit3", {0, 2, 4}}}); }
inline UtaModel f1_three_alpha() { return UtaModel(f1_three_grid(), {{1, 2}, {1, 3}, {1, 1}}); }
inline UtaModel f1_three_beta() { return UtaModel(f1_three_grid(), {{1, 1}, {2, 1}, {3, 1}}); }

inline Rational R(long long n, long long d = 1) { return Rational(n, d); }

/// Crit1 has a single interval and crit2 interval 2 has the same cross-model
/// ratio as crit1, while interval 3 does not. Climbing into interval 3 has
/// only crit1 as a reference, whose ratio equals the one below: the records
/// cannot tell the two slope assignments apart.
inline Grid proportional_step_grid() { return Grid({{"crit1", {0, 2}}, {"crit2", {0, 2, 4, 6}}}); }
inline UtaModel proportional_step_alpha() { return UtaModel(proportional_step_grid(), {{1}, {2, 1, 3}}); }
inline UtaModel proportional_step_beta() { return UtaModel(proportional_step_grid(), {{1}, {1, 1, 1}}); }

// ---------------------------------------------------------------------------
// Marginal values from cumulative breakpoint values

inline std::vector<Rational> cumulative(const UtaModel& m, CriterionIndex i) {
  const auto& bp = m.grid().scale(i).breakpoints;
  std::vector<Rational> u{Rational(0)};
  for (std::size_t k = 1; k < bp.size(); ++k) u.push_back(u.back() + m.slopes()[i][k - 1] * (bp[k] - bp[k - 1]));
  return u;
}

inline Rational value_at(const UtaModel& m, CriterionIndex i, const Rational& x) {
  const auto& bp = m.grid().scale(i).breakpoints;
  auto u = cumulative(m, i);
  auto it = std::upper_bound(bp.begin(), bp.end(), x);
  std::size_t k = it == bp.end() ? bp.size() - 1 : static_cast<std::size_t>(it - bp.begin());
  if (k == 0) k = 1;
  const Rational t = (x - bp[k - 1]) / (bp[k] - bp[k - 1]);
  return u[k - 1] + t * (u[k] - u[k - 1]);
}

inline std::optional<Rational> level_point(const UtaModel& m, CriterionIndex i, const Rational& v) {
  const auto& bp = m.grid().scale(i).breakpoints;
  auto u = cumulative(m, i);
  if (v.sign() < 0 || v > u.back()) return std::nullopt;
  for (std::size_t k = 1; k < bp.size(); ++k) {
    if (v <= u[k]) return bp[k - 1] + (v - u[k - 1]) / (u[k] - u[k - 1]) * (bp[k] - bp[k - 1]);
  }
  return std::nullopt;
}

/// Value of the two-criterion profile (v_i, v_j), others at their lowest.
inline Rational plane_value(const UtaModel& m, CriterionIndex i, CriterionIndex j, const PlanePoint& p) {
  return value_at(m, i, p.vi) + value_at(m, j, p.vj);
}

// ---------------------------------------------------------------------------
// Random scenarios

inline std::vector<int> random_intervals(std::mt19937_64& rng, int n_min = 2, int n_max = 5, int l_max = 6) {
  std::uniform_int_distribution<int> n(n_min, n_max);
  std::uniform_int_distribution<int> l(1, l_max);
  std::vector<int> out(n(rng));
  for (int& x : out) x = l(rng);
  return out;
}

inline Scenario random_scenario(std::mt19937_64& rng, int n_min = 2, int n_max = 5, int l_max = 6) {
  GenerateParams p;
  p.intervals = random_intervals(rng, n_min, n_max, l_max);
  p.seed = rng();
  return generate_scenario(p);
}

// ---------------------------------------------------------------------------
// Neighboring-rectangles query bound from the ground truth

/// 1 final query, plus the probe-line updates while lambda is at least the
/// flattest indifference slope s_min = min gamma_i / gamma_{j,lj}, plus the
/// halvings that bring delta under w * gamma_{j,lj+1} / gamma_i.
inline int neighboring_query_bound(const UtaModel& a, const UtaModel& b, CriterionIndex i, IntervalIndex li,
                                   CriterionIndex j, IntervalIndex lj) {
  const Grid& g = a.grid();
  const Rational delta0 = (g.scale(i).interval_high(li) - g.scale(i).interval_low(li)) / 2;
  const Rational lambda0 = (g.scale(j).interval_high(lj) - g.scale(j).interval_low(lj)) / (2 * delta0);
  const Rational w = g.scale(j).interval_high(lj + 1) - g.scale(j).interval_low(lj + 1);
  Rational s_min = std::min(a.slope(i, li) / a.slope(j, lj), b.slope(i, li) / b.slope(j, lj));
  int case2 = lambda0 >= s_min ? 1 + ceil_log2(lambda0 / s_min) : 0;
  Rational steep = std::max(a.slope(i, li) / a.slope(j, lj + 1), b.slope(i, li) / b.slope(j, lj + 1));
  Rational span = delta0 * steep / w;
  int case1 = span > 1 ? ceil_log2(span) : 0;
  return 1 + case2 + case1;
}

// ---------------------------------------------------------------------------
// Brute-force disambiguation from raw points

/// gamma_target implied by "a ~ p" inside one rectangle of the plane (i, j)
/// with reference slope gamma_ref on i.
inline Rational sr_implied(const SrInfo& s, const PlanePoint& p, const Rational& gamma_ref) {
  return gamma_ref * (p.vi - s.a.vi) / (s.a.vj - p.vj);
}

/// gamma_{j,lj+1} implied by "a ~ p" across the breakpoint x_{j,lj}.
inline Rational nr_implied_upper(const NrInfo& n, const Grid& g, const PlanePoint& p, const Rational& gamma_ref,
                                 const Rational& gamma_lower) {
  const Rational& mid = g.scale(n.j).interval_high(n.lj);
  const Rational& left = g.scale(n.i).interval_low(n.li);
  return (gamma_ref * (n.a.vi - left) - gamma_lower * (mid - n.a.vj)) / (p.vj - mid);
}

/// gamma_{j,lj} implied by "a ~ p" given the upper slope; nullopt when the
/// probe sits on the breakpoint (the lower slope does not appear).
inline std::optional<Rational> nr_implied_lower(const NrInfo& n, const Grid& g, const PlanePoint& p,
                                                const Rational& gamma_ref, const Rational& gamma_upper) {
  const Rational& mid = g.scale(n.j).interval_high(n.lj);
  const Rational& left = g.scale(n.i).interval_low(n.li);
  if (mid == n.a.vj) return std::nullopt;
  return (gamma_ref * (n.a.vi - left) - gamma_upper * (p.vj - mid)) / (mid - n.a.vj);
}

using Outcome = std::pair<Rational, Rational>;

/// Distinct (alpha, beta) outcomes over the assignments that make every
/// indifference hold. Each record gives its points to the decision-makers in
/// one of two ways.
template <typename F>
std::set<Outcome> consistent_outcomes(F implied_pair) {
  std::set<Outcome> out;
  for (int k : {0, 1}) {
    for (int k2 : {0, 1}) {
      if (auto o = implied_pair(k, k2)) out.insert(*o);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degeneracy instances

enum class System { kTwoSingle, kSingleNeighboring, kDownward };

struct DegeneracyCheck {
  System system = System::kTwoSingle;
  bool solver_degenerate = false;  ///< the solver raised Degenerate
  bool brute_degenerate = false;   ///< several consistent assignments, different outcomes
  bool ratio_condition = false;    ///< predicted from slope ratios alone
  bool solved_truth = false;       ///< when solved, the result equals the truth
  bool forced_coincidence = false;
};

/// Two models on a small grid, with the ratios that matter made equal on
/// purpose about half of the time. Model 0 is alpha.
inline DegeneracyCheck degeneracy_instance(std::mt19937_64& rng, System system) {
  ScenarioGenerator gen(rng());
  const bool two_single = system == System::kTwoSingle;
  Grid g = gen.grid(two_single ? std::vector<int>{2, 1} : std::vector<int>{1, 2});
  SlopeTable a = gen.model(g).slopes();
  SlopeTable b = gen.model(g).slopes();
  std::bernoulli_distribution half(0.5);
  std::bernoulli_distribution third(1.0 / 3);

  // ratio(x) = alpha_x / beta_x; make beta_x carry a chosen ratio.
  auto set_ratio = [&](std::size_t c, std::size_t l, const Rational& rho) { b[c][l] = a[c][l] / rho; };
  auto rho = [&](std::size_t c, std::size_t l) { return a[c][l] / b[c][l]; };

  DegeneracyCheck out;
  out.system = system;
  // Interval playing the role of the second reference / previous / next.
  const std::size_t oc = two_single ? 0 : 1;
  const std::size_t ol = two_single ? 1 : (system == System::kSingleNeighboring ? 0 : 1);
  const std::size_t tc = 1;
  const std::size_t tl = two_single ? 0 : (system == System::kSingleNeighboring ? 1 : 0);
  if (half(rng)) {
    set_ratio(oc, ol, rho(0, 0));
    out.forced_coincidence = true;
  }
  if (third(rng)) set_ratio(tc, tl, rho(0, 0));
  UtaModel m0(g, a);
  UtaModel m1(g, b);
  SimulatedPair src(m0, m1);
  auto pair_at = [&](CriterionIndex c, IntervalIndex l) { return SlopePair{m0.slope(c, l), m1.slope(c, l)}; };
  const SlopePair ref = pair_at(0, 1);
  const SlopePair truth = pair_at(tc, static_cast<IntervalIndex>(tl + 1));
  auto pick = [](int k, const PlanePoint& b_pt, const PlanePoint& c_pt) -> const PlanePoint& {
    return k ? b_pt : c_pt;
  };

  std::optional<SlopePairResult> solved;
  auto attempt = [&](auto solve) {
    try {
      solved = solve();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      out.solver_degenerate = true;
    }
  };

  if (two_single) {
    const SlopePair ref2 = pair_at(0, 2);
    SrInfo s1 = single_rectangle(src, g, 0, 1, 1, 1);
    SrInfo s2 = single_rectangle(src, g, 0, 1, 2, 1);
    auto outcomes = consistent_outcomes([&](int k, int k2) -> std::optional<Outcome> {
      Rational a1 = sr_implied(s1, pick(k, s1.b, s1.c), ref.alpha);
      Rational b1 = sr_implied(s1, pick(1 - k, s1.b, s1.c), ref.beta);
      Rational a2 = sr_implied(s2, pick(k2, s2.b, s2.c), ref2.alpha);
      Rational b2 = sr_implied(s2, pick(1 - k2, s2.b, s2.c), ref2.beta);
      if (a1 != a2 || b1 != b2) return std::nullopt;
      return Outcome{a1, b1};
    });
    out.brute_degenerate = outcomes.size() > 1;
    out.ratio_condition = ref.ratio() == ref2.ratio() && truth.ratio() != ref.ratio();
    attempt([&] { return solve_two_sr(sr_coefficients(s1), sr_coefficients(s2), ref, ref2); });
  } else if (system == System::kSingleNeighboring) {
    const SlopePair prev = pair_at(1, 1);
    SrInfo s = single_rectangle(src, g, 0, 1, 1, 2);
    NrInfo n = neighboring_rectangles(src, g, 0, 1, 1, 1);
    auto outcomes = consistent_outcomes([&](int k, int k2) -> std::optional<Outcome> {
      Rational a1 = sr_implied(s, pick(k, s.b, s.c), ref.alpha);
      Rational b1 = sr_implied(s, pick(1 - k, s.b, s.c), ref.beta);
      Rational a2 = nr_implied_upper(n, g, pick(k2, n.b, n.c), ref.alpha, prev.alpha);
      Rational b2 = nr_implied_upper(n, g, pick(1 - k2, n.b, n.c), ref.beta, prev.beta);
      if (a1 != a2 || b1 != b2) return std::nullopt;
      return Outcome{a1, b1};
    });
    out.brute_degenerate = outcomes.size() > 1;
    const bool flat_probe = n.a.vj == g.scale(1).interval_high(1);
    out.ratio_condition = (ref.ratio() == prev.ratio() || flat_probe) && truth.ratio() != ref.ratio();
    attempt([&] { return solve_sr_nr(sr_coefficients(s), nr_coefficients(n, g), ref, prev); });
  } else {
    const SlopePair next = pair_at(1, 2);
    SrInfo s = single_rectangle(src, g, 0, 1, 1, 1);
    NrInfo n = neighboring_rectangles(src, g, 0, 1, 1, 1);
    if (n.a.vj == g.scale(1).interval_high(1)) return degeneracy_instance(rng, system);
    auto outcomes = consistent_outcomes([&](int k, int k2) -> std::optional<Outcome> {
      Rational a1 = sr_implied(s, pick(k, s.b, s.c), ref.alpha);
      Rational b1 = sr_implied(s, pick(1 - k, s.b, s.c), ref.beta);
      auto a2 = nr_implied_lower(n, g, pick(k2, n.b, n.c), ref.alpha, next.alpha);
      auto b2 = nr_implied_lower(n, g, pick(1 - k2, n.b, n.c), ref.beta, next.beta);
      if (a1 != *a2 || b1 != *b2) return std::nullopt;
      return Outcome{a1, b1};
    });
    out.brute_degenerate = outcomes.size() > 1;
    out.ratio_condition = next.ratio() == ref.ratio() && truth.ratio() != ref.ratio();
    attempt([&] { return solve_downward(sr_coefficients(s), nr_coefficients(n, g), ref, next); });
  }
  out.solved_truth = solved && solved->slopes() == truth;
  return out;
}

}  // namespace testing_support
