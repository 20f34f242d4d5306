#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualuta/error.hpp"
#include "dualuta/model.hpp"
#include "dualuta/oracle.hpp"
#include "dualuta/rational.hpp"

namespace dualuta {

// Key order is part of the output contract (reports are compared byte for
// byte), so everything is written with insertion-ordered objects.
using Json = nlohmann::ordered_json;

namespace io {

inline Error malformed(const std::string& what) { return Error(ErrorCode::kMalformedValue, what); }

inline Json to_json(const Rational& r) { return r.to_string(); }

/// Rationals travel as strings; plain JSON integers are accepted on input.
inline Rational rational_from(const Json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw malformed("expected a rational string, got " + j.dump());
}

inline Json to_json(const OptionalValue& v) { return v ? Json(v->to_string()) : Json(nullptr); }

inline OptionalValue optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return rational_from(j);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::size_t index_from(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw malformed(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline Json to_json(const Grid& g) {
  Json criteria = Json::array();
  for (const auto& s : g.scales()) {
    Json bps = Json::array();
    for (const auto& x : s.breakpoints) bps.push_back(to_json(x));
    criteria.push_back({{"name", s.name}, {"breakpoints", bps}});
  }
  return {{"criteria", criteria}};
}

inline Grid grid_from(const Json& j) {
  const Json& criteria = field(j, "criteria");
  if (!criteria.is_array()) throw malformed("'criteria' must be an array");
  std::vector<CriterionScale> scales;
  for (const Json& c : criteria) {
    CriterionScale s;
    const Json& name = field(c, "name");
    if (!name.is_string()) throw malformed("criterion name must be a string");
    s.name = name.get<std::string>();
    const Json& bps = field(c, "breakpoints");
    if (!bps.is_array()) throw malformed("'breakpoints' must be an array");
    for (const Json& x : bps) s.breakpoints.push_back(rational_from(x));
    scales.push_back(std::move(s));
  }
  return Grid(std::move(scales));
}

inline Json slopes_json(const SlopeTable& t) {
  Json out = Json::array();
  for (const auto& row : t) {
    Json r = Json::array();
    for (const auto& g : row) r.push_back(to_json(g));
    out.push_back(r);
  }
  return out;
}

inline SlopeTable slopes_from(const Json& j) {
  if (!j.is_array()) throw malformed("'slopes' must be an array of arrays");
  SlopeTable t;
  for (const Json& row : j) {
    if (!row.is_array()) throw malformed("'slopes' must be an array of arrays");
    std::vector<Rational> r;
    for (const Json& g : row) r.push_back(rational_from(g));
    t.push_back(std::move(r));
  }
  return t;
}

inline Json to_json(const Query& q) {
  return {{"i", q.i}, {"j", q.j}, {"q_i", to_json(q.q_i)}, {"q_j", to_json(q.q_j)}, {"p_i", to_json(q.p_i)}};
}

inline Query query_from(const Json& j) {
  return Query{index_from(j, "i"), index_from(j, "j"), rational_from(field(j, "q_i")), rational_from(field(j, "q_j")),
               rational_from(field(j, "p_i"))};
}

inline Json to_json(const AnswerPair& a) { return Json::array({to_json(a.low), to_json(a.high)}); }

inline AnswerPair answers_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw malformed("'answers' must hold exactly two values");
  return AnswerPair::sorted(optional_from(j[0]), optional_from(j[1]));
}

inline Json to_json(const TranscriptRecord& r) { return {{"query", to_json(r.query)}, {"answers", to_json(r.answers)}}; }

}  // namespace io

/// Grid plus the two hidden ground-truth models.
struct Scenario {
  Grid grid;
  std::vector<UtaModel> models;
  std::optional<std::uint64_t> seed;
};

inline Json scenario_to_json(const Scenario& s) {
  Json out = io::to_json(s.grid);
  Json models = Json::array();
  for (const auto& m : s.models) models.push_back({{"slopes", io::slopes_json(m.slopes())}});
  out["models"] = models;
  if (s.seed) out["seed"] = *s.seed;
  return out;
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario s{io::grid_from(j), {}, std::nullopt};
  const Json& models = io::field(j, "models");
  if (!models.is_array() || models.size() != 2) throw io::malformed("a scenario holds exactly two models");
  for (const Json& m : models) s.models.emplace_back(s.grid, io::slopes_from(io::field(m, "slopes")));
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw io::malformed(std::string("invalid JSON: ") + e.what());
  }
}

inline Json read_json(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

/// One record per line.
inline void write_transcript(std::ostream& out, const Transcript& t) {
  for (const auto& r : t) out << io::to_json(r).dump() << '\n';
}

inline Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = parse_json(line);
    t.push_back({io::query_from(io::field(j, "query")), io::answers_from(io::field(j, "answers"))});
  }
  return t;
}

inline Json error_to_json(const Error& e) {
  Json ctx = Json::object();
  for (const auto& [k, v] : e.context()) ctx[k] = v;
  return {{"code", std::string(to_string(e.code()))}, {"message", e.message()}, {"context", ctx}};
}

}  // namespace dualuta
