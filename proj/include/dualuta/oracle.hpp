#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dualuta/error.hpp"
#include "dualuta/model.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

/// Matching query (i: q_i, j: q_j) ~ (i: p_i, j: ?). The answer is a value
/// on criterion j.
struct Query {
  CriterionIndex i = 0;
  CriterionIndex j = 1;
  Rational q_i;
  Rational q_j;
  Rational p_i;

  void validate(const Grid& grid) const {
    grid.check_criterion(i);
    grid.check_criterion(j);
    if (i == j) throw Error(ErrorCode::kInvalidArgument, "a query needs two distinct criteria");
    auto check = [&](CriterionIndex c, const Rational& v, const char* field) {
      if (!grid.scale(c).contains(v)) {
        throw Error(ErrorCode::kOutOfScale, std::string("query field ") + field + " outside its scale",
                    {{"field", field}, {"value", v.to_string()}});
      }
    };
    check(i, q_i, "q_i");
    check(j, q_j, "q_j");
    check(i, p_i, "p_i");
  }

  friend bool operator==(const Query&, const Query&) = default;
};

/// The two anonymous answers to one query, sorted ascending with None last.
struct AnswerPair {
  OptionalValue low;
  OptionalValue high;

  static AnswerPair sorted(OptionalValue a, OptionalValue b) {
    if (none_last_less(b, a)) std::swap(a, b);
    return AnswerPair{std::move(a), std::move(b)};
  }

  bool unanimous() const { return low == high; }

  friend bool operator==(const AnswerPair&, const AnswerPair&) = default;
};

/// Anything that can answer matching queries for two anonymous decision-makers.
class AnswerSource {
 public:
  virtual ~AnswerSource() = default;
  virtual AnswerPair answer(const Query& q) = 0;
};

/// a_j such that (q_i, q_j) ~ (p_i, a_j) for this model, or None when the
/// value difference cannot be compensated on criterion j.
inline OptionalValue answer_indifference(const UtaModel& model, const Query& q) {
  q.validate(model.grid());
  Rational target = eval_marginal(model, q.i, q.q_i) + eval_marginal(model, q.j, q.q_j) -
                    eval_marginal(model, q.i, q.p_i);
  return invert_marginal(model, q.j, target);
}

inline AnswerPair simulated_answer(const UtaModel& a, const UtaModel& b, const Query& q) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::kGridMismatch, "models are defined on different grids");
  return AnswerPair::sorted(answer_indifference(a, q), answer_indifference(b, q));
}

/// Two hidden ground-truth models answering every query exactly.
class SimulatedPair final : public AnswerSource {
 public:
  SimulatedPair(UtaModel first, UtaModel second) : first_(std::move(first)), second_(std::move(second)) {
    if (!(first_.grid() == second_.grid())) {
      throw Error(ErrorCode::kGridMismatch, "models are defined on different grids");
    }
  }

  AnswerPair answer(const Query& q) override { return simulated_answer(first_, second_, q); }

  const Grid& grid() const { return first_.grid(); }
  const UtaModel& first() const { return first_; }
  const UtaModel& second() const { return second_; }

 private:
  UtaModel first_;
  UtaModel second_;
};

struct TranscriptRecord {
  Query query;
  AnswerPair answers;
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

using Transcript = std::vector<TranscriptRecord>;

/// Forwards to another source and appends every exchange to a transcript.
class RecordingSource final : public AnswerSource {
 public:
  RecordingSource(AnswerSource& inner, Transcript& transcript) : inner_(inner), transcript_(transcript) {}

  AnswerPair answer(const Query& q) override {
    AnswerPair a = inner_.answer(q);
    transcript_.push_back({q, a});
    return a;
  }

 private:
  AnswerSource& inner_;
  Transcript& transcript_;
};

/// Replays a recorded transcript in order. A query that differs from the
/// recorded one raises ReplayDivergence; running past the end raises
/// ReplayExhausted carrying the unanswered query, which is how live sessions
/// find the next question to ask.
class ReplayTranscript final : public AnswerSource {
 public:
  class Exhausted : public Error {
   public:
    explicit Exhausted(Query pending)
        : Error(ErrorCode::kReplayExhausted, "transcript has no answer for this query"),
          pending_(std::move(pending)) {}
    const Query& pending() const { return pending_; }

   private:
    Query pending_;
  };

  explicit ReplayTranscript(Transcript records) : records_(std::move(records)) {}

  AnswerPair answer(const Query& q) override {
    if (next_ >= records_.size()) throw Exhausted(q);
    const TranscriptRecord& r = records_[next_];
    if (!(r.query == q)) {
      throw Error(ErrorCode::kReplayDivergence, "query does not match the recorded transcript",
                  {{"position", std::to_string(next_)}});
    }
    ++next_;
    return r.answers;
  }

  std::size_t consumed() const { return next_; }
  std::size_t size() const { return records_.size(); }

 private:
  Transcript records_;
  std::size_t next_ = 0;
};

}  // namespace dualuta
