#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dualuta/error.hpp"
#include "dualuta/patterns.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

/// Slope-ratio pair of a single-rectangle record. The decision-maker who
/// answered b satisfies gamma_{j,lj} = for_b * gamma_{i,li}; the other one
/// uses for_c.
struct SrCoefficients {
  Rational for_b;
  Rational for_c;
  bool unanimous() const { return for_b == for_c; }
};

/// Coefficients of a neighboring-rectangles record. The decision-maker who
/// answered b satisfies
///   gamma_{j,lj+1} = theta_b * gamma_{i,li} + phi_b * gamma_{j,lj}
/// and likewise with the c coefficients for the other one.
struct NrCoefficients {
  Rational theta_b;
  Rational theta_c;
  Rational phi_b;
  Rational phi_c;
  bool unanimous() const { return theta_b == theta_c && phi_b == phi_c; }
};

/// Known slopes of one interval for the two labelled decision-makers.
struct SlopePair {
  Rational alpha;
  Rational beta;
  Rational ratio() const { return alpha / beta; }
  friend bool operator==(const SlopePair&, const SlopePair&) = default;
};

/// Result of a disambiguation. k = 1 means alpha takes the b coefficients of
/// the first record (k2 likewise for the second record).
struct SlopePairResult {
  Rational alpha;
  Rational beta;
  int k = 0;
  int k2 = 0;
  bool unanimous = false;
  Rational residual;  ///< max equation residual of the chosen assignment

  SlopePair slopes() const { return {alpha, beta}; }
};

inline SrCoefficients sr_coefficients(const SrInfo& info) {
  if (info.a.vj == info.b.vj || info.a.vj == info.c.vj) {
    throw Error(ErrorCode::kDegenerateGeometry, "single-rectangle points share a j coordinate",
                detail::plane_context(info.i, info.j, info.li, info.lj));
  }
  return {(info.b.vi - info.a.vi) / (info.a.vj - info.b.vj), (info.c.vi - info.a.vi) / (info.a.vj - info.c.vj)};
}

inline NrCoefficients nr_coefficients(const NrInfo& info, const Grid& grid) {
  const Rational& mid = grid.scale(info.j).interval_high(info.lj);
  Rational db = info.b.vj - mid;
  Rational dc = info.c.vj - mid;
  if (db.is_zero() || dc.is_zero()) {
    throw Error(ErrorCode::kDegenerateGeometry, "neighboring-rectangles answer on the shared breakpoint",
                detail::plane_context(info.i, info.j, info.li, info.lj));
  }
  Rational rise = info.a.vj - mid;
  return {(info.a.vi - info.b.vi) / db, (info.a.vi - info.c.vi) / dc, rise / db, rise / dc};
}

namespace detail {

struct Candidate {
  int k;
  int k2;
  Rational alpha;
  Rational beta;
  Rational residual;
};

/// Keeps the assignments within tolerance, picks the smallest residual and
/// refuses when the best assignments disagree on the outcome.
inline SlopePairResult select_assignment(std::vector<Candidate> candidates, const Rational& tolerance,
                                         bool unanimous, const char* system) {
  std::erase_if(candidates, [&](const Candidate& c) { return c.residual > tolerance; });
  if (candidates.empty()) {
    throw Error(ErrorCode::kInconsistentAnswers, std::string("no answer assignment satisfies the ") + system,
                {{"system", system}});
  }
  const Rational best =
      std::min_element(candidates.begin(), candidates.end(),
                       [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; })
          ->residual;
  std::erase_if(candidates, [&](const Candidate& c) { return c.residual != best; });
  const Candidate& first = candidates.front();
  for (const Candidate& c : candidates) {
    if (c.alpha != first.alpha || c.beta != first.beta) {
      std::string worlds;
      for (const Candidate& w : candidates) {
        worlds += "(" + std::to_string(w.k) + "," + std::to_string(w.k2) + ")->(" + w.alpha.to_string() + "," +
                  w.beta.to_string() + ") ";
      }
      throw Error(ErrorCode::kDegenerate, std::string("several answer assignments fit the ") + system,
                  {{"system", system}, {"assignments", worlds}});
    }
  }
  return {first.alpha, first.beta, first.k, first.k2, unanimous, first.residual};
}

inline const Rational& pick(int k, const Rational& for_b, const Rational& for_c) { return k ? for_b : for_c; }

}  // namespace detail

/// Slopes of one target interval from two single-rectangle records that use
/// two different known reference intervals (ref1 for sr1, ref2 for sr2).
///
/// Enumerates the four answer-to-decision-maker assignments and keeps the
/// ones for which both records predict the same slopes. Several surviving
/// assignments are fine as long as they agree; otherwise the records cannot
/// tell the two decision-makers apart (Degenerate), which happens when the two
/// references have the same alpha/beta ratio.
inline SlopePairResult solve_two_sr(const SrCoefficients& sr1, const SrCoefficients& sr2, const SlopePair& ref1,
                                    const SlopePair& ref2, const Rational& tolerance = {}) {
  std::vector<detail::Candidate> candidates;
  for (int k : {0, 1}) {
    for (int k2 : {0, 1}) {
      Rational a1 = detail::pick(k, sr1.for_b, sr1.for_c) * ref1.alpha;
      Rational b1 = detail::pick(1 - k, sr1.for_b, sr1.for_c) * ref1.beta;
      Rational a2 = detail::pick(k2, sr2.for_b, sr2.for_c) * ref2.alpha;
      Rational b2 = detail::pick(1 - k2, sr2.for_b, sr2.for_c) * ref2.beta;
      Rational residual = std::max(abs(a1 - a2), abs(b1 - b2));
      candidates.push_back({k, k2, a1, b1, residual});
    }
  }
  return detail::select_assignment(std::move(candidates), tolerance, sr1.unanimous() && sr2.unanimous(),
                                   "two single-rectangle system");
}

/// Slopes of interval lj+1 of criterion j from a single-rectangle record on
/// R(li, lj+1) and a neighboring-rectangles record across x_{j,lj}, given the
/// known slopes of interval li of i (`ref`) and interval lj of j (`below`).
inline SlopePairResult solve_sr_nr(const SrCoefficients& sr, const NrCoefficients& nr, const SlopePair& ref,
                                   const SlopePair& below, const Rational& tolerance = {}) {
  std::vector<detail::Candidate> candidates;
  for (int k : {0, 1}) {
    for (int k2 : {0, 1}) {
      Rational a_sr = detail::pick(k, sr.for_b, sr.for_c) * ref.alpha;
      Rational b_sr = detail::pick(1 - k, sr.for_b, sr.for_c) * ref.beta;
      Rational a_nr = detail::pick(k2, nr.theta_b, nr.theta_c) * ref.alpha +
                      detail::pick(k2, nr.phi_b, nr.phi_c) * below.alpha;
      Rational b_nr = detail::pick(1 - k2, nr.theta_b, nr.theta_c) * ref.beta +
                      detail::pick(1 - k2, nr.phi_b, nr.phi_c) * below.beta;
      Rational residual = std::max(abs(a_sr - a_nr), abs(b_sr - b_nr));
      candidates.push_back({k, k2, a_sr, b_sr, residual});
    }
  }
  return detail::select_assignment(std::move(candidates), tolerance, sr.unanimous() && nr.unanimous(),
                                   "single/neighboring-rectangles system");
}

/// Mirror of solve_sr_nr: slopes of interval lj of criterion j from a
/// single-rectangle record on R(li, lj) and a neighboring-rectangles record
/// across x_{j,lj}, given interval li of i (`ref`) and interval lj+1 of j
/// (`above`). The neighboring relation is solved for the lower slope, which
/// needs phi != 0 (a probe strictly below the breakpoint).
inline SlopePairResult solve_downward(const SrCoefficients& sr, const NrCoefficients& nr, const SlopePair& ref,
                                      const SlopePair& above, const Rational& tolerance = {}) {
  if (nr.phi_b.is_zero() || nr.phi_c.is_zero()) {
    throw Error(ErrorCode::kPhiZero, "neighboring-rectangles probe lies on the breakpoint");
  }
  std::vector<detail::Candidate> candidates;
  for (int k : {0, 1}) {
    for (int k2 : {0, 1}) {
      Rational a_sr = detail::pick(k, sr.for_b, sr.for_c) * ref.alpha;
      Rational b_sr = detail::pick(1 - k, sr.for_b, sr.for_c) * ref.beta;
      Rational a_nr = (above.alpha - detail::pick(k2, nr.theta_b, nr.theta_c) * ref.alpha) /
                      detail::pick(k2, nr.phi_b, nr.phi_c);
      Rational b_nr = (above.beta - detail::pick(1 - k2, nr.theta_b, nr.theta_c) * ref.beta) /
                      detail::pick(1 - k2, nr.phi_b, nr.phi_c);
      Rational residual = std::max(abs(a_sr - a_nr), abs(b_sr - b_nr));
      candidates.push_back({k, k2, a_sr, b_sr, residual});
    }
  }
  return detail::select_assignment(std::move(candidates), tolerance, sr.unanimous() && nr.unanimous(),
                                   "downward single/neighboring-rectangles system");
}

}  // namespace dualuta
