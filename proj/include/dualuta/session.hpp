#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dualuta/elicitation.hpp"
#include "dualuta/io.hpp"
#include "dualuta/plot.hpp"
#include "dualuta/report.hpp"

namespace dualuta {

enum class SessionStatus { kAwaitingAnswers, kComputing, kDone, kFailed };

inline std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::kAwaitingAnswers: return "awaiting-answers";
    case SessionStatus::kComputing: return "computing";
    case SessionStatus::kDone: return "done";
    case SessionStatus::kFailed: return "failed";
  }
  return "unknown";
}

/// Question text for a matching query.
inline std::string phrase_query(const Grid& grid, const Query& q) {
  const std::string& ni = grid.scale(q.i).name;
  const std::string& nj = grid.scale(q.j).name;
  std::ostringstream s;
  s << "Consider an option with " << ni << " = " << q.q_i.to_string() << " and " << nj << " = "
    << q.q_j.to_string() << ". If " << ni << " is changed to " << q.p_i.to_string() << ", which value of " << nj
    << " makes the new option exactly as good as the first one? Answer none if no value of " << nj << " between "
    << grid.scale(q.j).lowest().to_string() << " and " << grid.scale(q.j).highest().to_string()
    << " is enough.";
  return s.str();
}

struct SubmitStatus {
  SessionStatus status;
  int answers_received;  ///< answers collected for the query now pending
};

/// One live elicitation with two anonymous participants.
///
/// The session keeps only its transcript. After every completed answer pair
/// the elicitation is replayed from the start against that transcript and
/// stops at the first query it has no answer for; that query becomes the
/// pending one. Replays are deterministic, so the state reached equals the
/// state a direct run would have reached.
class Session {
 public:
  Session(std::string id, Grid grid, Rational epsilon)
      : id_(std::move(id)), grid_(std::move(grid)), epsilon_(std::move(epsilon)) {
    if (epsilon_.sign() < 0) throw Error(ErrorCode::kInvalidArgument, "epsilon must be non-negative");
    advance();
  }

  const std::string& id() const { return id_; }
  const Grid& grid() const { return grid_; }

  SessionStatus status() const {
    std::lock_guard lock(mutex_);
    return status_;
  }

  Query pending_query() const {
    std::lock_guard lock(mutex_);
    if (!pending_) throw Error(ErrorCode::kNoPending, "session has no pending query", {{"session", id_}});
    return *pending_;
  }

  int answers_received() const {
    std::lock_guard lock(mutex_);
    return static_cast<int>(collected_.size());
  }

  std::size_t queries_answered() const {
    std::lock_guard lock(mutex_);
    return transcript_.size();
  }

  Transcript transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
  }

  /// Stores one anonymous answer. The second answer completes the pair (the
  /// order of the two is discarded) and moves the elicitation forward.
  SubmitStatus submit(OptionalValue value) {
    std::lock_guard lock(mutex_);
    if (status_ == SessionStatus::kDone || status_ == SessionStatus::kFailed || !pending_) {
      throw Error(ErrorCode::kSessionClosed, "session no longer accepts answers", {{"session", id_}});
    }
    if (value && !grid_.scale(pending_->j).contains(*value)) {
      throw Error(ErrorCode::kOutOfScale, "answer outside the scale of the asked criterion",
                  {{"session", id_}, {"value", value->to_string()}});
    }
    collected_.push_back(std::move(value));
    if (collected_.size() == 2) {
      transcript_.push_back({*pending_, AnswerPair::sorted(collected_[0], collected_[1])});
      collected_.clear();
      advance();
    }
    return {status_, static_cast<int>(collected_.size())};
  }

  /// Outcome summary: report, slope tables and indifference curves of every
  /// plane, or a failure payload.
  Json result(int levels = 5) const {
    std::lock_guard lock(mutex_);
    if (!result_) throw Error(ErrorCode::kNotDone, "session is not finished", {{"session", id_}});
    Json report = make_report(*result_);
    Json out = {{"outcome", report["outcome"]}};
    if (const auto* o = std::get_if<ElicitationOutcome>(&*result_)) {
      out["tables"] = {{"anchor_normalized", report["models"]}, {"normalized_01", report["normalized_01"]}};
      std::vector<NamedModel> named;
      auto labels = model_labels(*o);
      for (std::size_t k = 0; k < o->models.size(); ++k) named.push_back({labels[k], &o->models[k]});
      Json curves = Json::array();
      for (CriterionIndex i = 0; i < grid_.size(); ++i) {
        for (CriterionIndex j = i + 1; j < grid_.size(); ++j) {
          curves.push_back(curves_to_json(i, j, indifference_curves(named, i, j, levels)));
        }
      }
      out["curves"] = curves;
    } else {
      out["error"] = report["error"];
    }
    out["report"] = std::move(report);
    return out;
  }

 private:
  void advance() {
    status_ = SessionStatus::kComputing;
    pending_.reset();
    ReplayTranscript replay(transcript_);
    try {
      ElicitationOptions opts;
      opts.tolerance = epsilon_;
      result_ = run_elicitation(replay, grid_, opts);
      status_ = std::holds_alternative<ElicitationOutcome>(*result_) ? SessionStatus::kDone : SessionStatus::kFailed;
    } catch (const ReplayTranscript::Exhausted& e) {
      pending_ = e.pending();
      status_ = SessionStatus::kAwaitingAnswers;
    }
  }

  std::string id_;
  Grid grid_;
  Rational epsilon_;
  mutable std::mutex mutex_;
  SessionStatus status_ = SessionStatus::kComputing;
  std::optional<Query> pending_;
  std::vector<OptionalValue> collected_;
  Transcript transcript_;
  std::optional<RunResult> result_;
};

class SessionManager {
 public:
  SessionManager() : prefix_(std::random_device{}()) {}

  std::string create(Grid grid, Rational epsilon) {
    std::ostringstream id;
    id << std::hex << prefix_ << '-' << next_.fetch_add(1);
    auto s = std::make_shared<Session>(id.str(), std::move(grid), std::move(epsilon));
    std::lock_guard lock(mutex_);
    sessions_.emplace(s->id(), s);
    return s->id();
  }

  std::shared_ptr<Session> get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no such session", {{"session", id}});
    return it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  std::uint32_t prefix_;
  std::atomic<std::uint64_t> next_{1};
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace dualuta
