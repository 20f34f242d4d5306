#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dualuta/error.hpp"
#include "dualuta/io.hpp"
#include "dualuta/model.hpp"

namespace dualuta {

/// Slopes are drawn as p/q with 1 <= p <= slope_num_max, 1 <= q <= slope_den_max;
/// breakpoint increments likewise. A fine lattice keeps accidental
/// coincidences between slope ratios rare.
struct LatticeParams {
  std::int64_t slope_num_max = 1000;
  std::int64_t slope_den_max = 100;
  std::int64_t step_num_max = 100;
  std::int64_t step_den_max = 10;
};

struct GenerateParams {
  std::vector<int> intervals;  ///< L_i per criterion
  std::uint64_t seed = 0;
  bool allow_identical = false;
  bool duplicate = false;  ///< second model is a copy of the first
  LatticeParams lattice;
};

class ScenarioGenerator {
 public:
  explicit ScenarioGenerator(std::uint64_t seed, LatticeParams lattice = {}) : rng_(seed), lattice_(lattice) {
    if (lattice_.slope_num_max < 1 || lattice_.slope_den_max < 1 || lattice_.step_num_max < 1 ||
        lattice_.step_den_max < 1) {
      throw Error(ErrorCode::kInvalidArgument, "lattice bounds must be at least 1");
    }
  }

  Rational draw(std::int64_t num_max, std::int64_t den_max) {
    std::uniform_int_distribution<std::int64_t> num(1, num_max);
    std::uniform_int_distribution<std::int64_t> den(1, den_max);
    std::int64_t p = num(rng_);
    return Rational(p, den(rng_));
  }

  Grid grid(const std::vector<int>& intervals) {
    if (intervals.size() < 2) throw Error(ErrorCode::kInvalidArgument, "at least two criteria are needed");
    std::vector<CriterionScale> scales;
    for (std::size_t c = 0; c < intervals.size(); ++c) {
      if (intervals[c] < 1) throw Error(ErrorCode::kInvalidArgument, "every criterion needs at least one interval");
      CriterionScale s{"c" + std::to_string(c + 1), {Rational(0)}};
      for (int l = 0; l < intervals[c]; ++l) {
        s.breakpoints.push_back(s.breakpoints.back() + draw(lattice_.step_num_max, lattice_.step_den_max));
      }
      scales.push_back(std::move(s));
    }
    return Grid(std::move(scales));
  }

  UtaModel model(const Grid& g) {
    SlopeTable t(g.size());
    for (CriterionIndex c = 0; c < g.size(); ++c) {
      for (int l = 0; l < g.intervals(c); ++l) t[c].push_back(draw(lattice_.slope_num_max, lattice_.slope_den_max));
    }
    return UtaModel(g, std::move(t));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  LatticeParams lattice_;
};

/// Random scenario; equivalent pairs are redrawn unless explicitly allowed.
inline Scenario generate_scenario(const GenerateParams& p) {
  ScenarioGenerator gen(p.seed, p.lattice);
  Grid g = gen.grid(p.intervals);
  UtaModel first = gen.model(g);
  if (p.duplicate) {
    if (!p.allow_identical) throw Error(ErrorCode::kInvalidArgument, "duplicate models need allow_identical");
    return Scenario{g, {first, first}, p.seed};
  }
  UtaModel second = gen.model(g);
  while (!p.allow_identical && models_equivalent(first, second)) second = gen.model(g);
  return Scenario{g, {first, second}, p.seed};
}

}  // namespace dualuta
