#pragma once

#include <string>

#include <httplib.h>

#include "dualuta/io.hpp"
#include "dualuta/session.hpp"

namespace dualuta {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kNoPending:
    case ErrorCode::kNotDone:
    case ErrorCode::kSessionClosed:
    case ErrorCode::kStateError: return 409;
    default: return 400;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
auto guarded(Handler h) {
  return [h](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.code()), error_to_json(e));
    } catch (const Json::exception& e) {
      send_json(res, 400, error_to_json(Error(ErrorCode::kMalformedValue, e.what())));
    }
  };
}

}  // namespace detail

/// Session endpoints:
///   POST /sessions                {grid, epsilon}  -> {id, status}
///   GET  /sessions/{id}                            -> {id, status, queries_answered, answers_received}
///   GET  /sessions/{id}/query                      -> {query, phrasing, answers_received}
///   POST /sessions/{id}/answers   {value}          -> {status, answers_received}
///   GET  /sessions/{id}/result                     -> {outcome, tables, curves, report}
///   GET  /sessions/{id}/transcript                 -> transcript, one record per line
/// Rationals are strings; a null value means no compensating value exists.
inline void install_routes(httplib::Server& server, SessionManager& sessions) {
  using detail::guarded;
  using detail::send_json;

  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                Json body = parse_json(req.body);
                Grid grid = io::grid_from(io::field(body, "grid"));
                Rational eps = body.contains("epsilon") ? io::rational_from(body["epsilon"]) : Rational(0);
                std::string id = sessions.create(std::move(grid), std::move(eps));
                auto s = sessions.get(id);
                send_json(res, 201, {{"id", id}, {"status", std::string(to_string(s->status()))}});
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto s = sessions.get(req.matches[1]);
               send_json(res, 200,
                         {{"id", s->id()},
                          {"status", std::string(to_string(s->status()))},
                          {"queries_answered", s->queries_answered()},
                          {"answers_received", s->answers_received()}});
             }));

  server.Get(R"(/sessions/([^/]+)/query)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto s = sessions.get(req.matches[1]);
               Query q = s->pending_query();
               send_json(res, 200,
                         {{"query", io::to_json(q)},
                          {"phrasing", phrase_query(s->grid(), q)},
                          {"answers_received", s->answers_received()}});
             }));

  server.Post(R"(/sessions/([^/]+)/answers)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                auto s = sessions.get(req.matches[1]);
                Json body = parse_json(req.body);
                SubmitStatus st = s->submit(io::optional_from(io::field(body, "value")));
                send_json(res, 200,
                          {{"status", std::string(to_string(st.status))}, {"answers_received", st.answers_received}});
              }));

  server.Get(R"(/sessions/([^/]+)/result)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, sessions.get(req.matches[1])->result());
             }));

  server.Get(R"(/sessions/([^/]+)/transcript)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               std::ostringstream out;
               write_transcript(out, sessions.get(req.matches[1])->transcript());
               res.set_content(out.str(), "application/x-ndjson");
             }));
}

}  // namespace dualuta
