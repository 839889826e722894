#ifndef RATIONALIZER_SERVICE_HPP
#define RATIONALIZER_SERVICE_HPP

// HTTP API: survey definitions, response submission, on-demand analysis and
// the analysis-run lifecycle. Handlers are plain member functions returning
// {status, body} so they can be exercised without a socket; mount() binds
// them to a cpp-httplib server.

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "rationalizer/analysis.hpp"
#include "rationalizer/ingest.hpp"
#include "rationalizer/report.hpp"
#include "rationalizer/store.hpp"

namespace rationalizer {

// ---------------------------------------------------------------------------
// Shared analysis entry point (CLI and HTTP both go through here)

/// Loads the survey's response log (optionally only its first `prefix`
/// records) and analyzes it. Throws unknown_survey.
inline analysis_report analyze_survey(const response_store& store, std::string_view survey_id,
                                      const analysis_options& options,
                                      std::optional<std::size_t> prefix = std::nullopt) {
  const auto survey = store.get_survey(survey_id);
  auto records = store.load_response_set(survey_id);
  if (prefix && *prefix < records.size()) records.resize(*prefix);
  const auto answers = answers_of(records);
  const auto declared = survey.system_ids();
  return analyze(answers, options, declared);
}

inline std::string analysis_json_body(const response_store& store, std::string_view survey_id,
                                      const analysis_options& options) {
  return report::to_json_text(analyze_survey(store, survey_id, options), survey_id);
}

// ---------------------------------------------------------------------------
// Analysis runs

/// Lifecycle stage names are this tool's own.
enum class run_stage : std::uint8_t {
  collecting,
  scored,
  classified,
  under_investigation,
  decided,
};

constexpr std::string_view to_string(run_stage s) {
  switch (s) {
    case run_stage::collecting: return "Collecting";
    case run_stage::scored: return "Scored";
    case run_stage::classified: return "Classified";
    case run_stage::under_investigation: return "UnderInvestigation";
    case run_stage::decided: return "Decided";
  }
  return "?";
}

inline std::optional<run_stage> parse_stage(std::string_view s) {
  for (auto st : {run_stage::collecting, run_stage::scored, run_stage::classified,
                  run_stage::under_investigation, run_stage::decided})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

/// One step forward, or reopening a decided run for further investigation.
constexpr bool transition_allowed(run_stage from, run_stage to) {
  return static_cast<int>(to) == static_cast<int>(from) + 1 ||
         (from == run_stage::decided && to == run_stage::under_investigation);
}

enum class final_decision : std::uint8_t { keep, decommission, defer };

constexpr std::string_view to_string(final_decision d) {
  switch (d) {
    case final_decision::keep: return "Keep";
    case final_decision::decommission: return "Decommission";
    case final_decision::defer: return "Defer";
  }
  return "?";
}

inline std::optional<final_decision> parse_decision(std::string_view s) {
  if (s == "Keep") return final_decision::keep;
  if (s == "Decommission") return final_decision::decommission;
  if (s == "Defer") return final_decision::defer;
  return std::nullopt;
}

struct decision_note {
  std::string note;
  std::optional<final_decision> decision;
};

struct analysis_run {
  std::string run_id;
  std::string survey_id;
  thresholds limits;
  satisfaction_statistic statistic = satisfaction_statistic::average;
  std::string created_at;
  run_stage stage = run_stage::classified;
  /// Number of log records the run is frozen to; unset while the run is
  /// still collecting (its analysis then follows the live log).
  std::optional<std::size_t> response_count;
  std::map<std::string, decision_note> decisions;
};

class illegal_transition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class unknown_run : public std::invalid_argument {
 public:
  explicit unknown_run(const std::string& id)
      : std::invalid_argument("unknown run '" + id + "'") {}
};

namespace detail {

inline constexpr std::string_view runs_log = "runs";

inline thresholds thresholds_from_json(const nlohmann::json& j, thresholds base = {}) {
  if (!j.is_object()) throw invalid_thresholds("thresholds must be an object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer()) text = std::to_string(value.get<long long>());
    else if (value.is_number()) {
      // Re-read through the shortest decimal form so 19.2 stays 19.2.
      text = nlohmann::json(value.get<double>()).dump();
    } else {
      throw invalid_thresholds("threshold '" + key + "' has the wrong type");
    }
    apply_threshold_setting(base, key, text);
  }
  validate(base);
  return base;
}

inline nlohmann::json run_to_json(const analysis_run& run) {
  nlohmann::json decisions = nlohmann::json::object();
  for (const auto& [system, d] : run.decisions)
    decisions[system] = {{"note", d.note},
                         {"decision", d.decision ? nlohmann::json(to_string(*d.decision))
                                                 : nlohmann::json()}};
  return nlohmann::json{
      {"run_id", run.run_id},
      {"survey_id", run.survey_id},
      {"thresholds", report::to_json(run.limits)},
      {"statistic", to_string(run.statistic)},
      {"created_at", run.created_at},
      {"stage", to_string(run.stage)},
      {"response_count", run.response_count ? nlohmann::json(*run.response_count)
                                            : nlohmann::json()},
      {"decisions", std::move(decisions)},
  };
}

inline analysis_run run_from_json(const nlohmann::json& j) {
  analysis_run run;
  run.run_id = j.at("run_id").get<std::string>();
  run.survey_id = j.at("survey_id").get<std::string>();
  run.limits = thresholds_from_json(j.at("thresholds"));
  run.statistic = parse_statistic(j.at("statistic").get<std::string>()).value();
  run.created_at = j.at("created_at").get<std::string>();
  run.stage = parse_stage(j.at("stage").get<std::string>()).value();
  if (!j.at("response_count").is_null())
    run.response_count = j.at("response_count").get<std::size_t>();
  for (const auto& [system, d] : j.at("decisions").items()) {
    decision_note note{d.value("note", ""), std::nullopt};
    if (d.contains("decision") && d["decision"].is_string())
      note.decision = parse_decision(d["decision"].get<std::string>());
    run.decisions[system] = std::move(note);
  }
  return run;
}

// Event log replay: "created" carries a full run, "updated" a full
// replacement. Each event is self-contained so a single line is auditable.
inline std::map<std::string, analysis_run> replay_runs(const std::vector<nlohmann::json>& events) {
  std::map<std::string, analysis_run> runs;
  for (const auto& e : events) {
    auto run = run_from_json(e.at("run"));
    runs[run.run_id] = std::move(run);
  }
  return runs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// HTTP handlers

struct api_response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using query_params = std::multimap<std::string, std::string>;

class api {
 public:
  explicit api(response_store& store, std::optional<std::string> bearer_token = std::nullopt,
               std::function<std::string()> clock = utc_now)
      : store_(store), token_(std::move(bearer_token)), clock_(std::move(clock)) {}

  /// POST /surveys
  api_response create_survey(std::string_view body) {
    return guarded([&] {
      auto j = parse_body(body);
      if (j.is_object() && !j.contains("survey_id")) j["survey_id"] = next_survey_id();
      auto survey = survey_from_json(j);
      store_.create_survey(survey);
      return json_response(201, {{"survey_id", survey.survey_id}});
    });
  }

  /// GET /surveys/{id}: the definition plus rendered question wording per
  /// system.
  api_response get_survey(std::string_view id) {
    return guarded([&] {
      auto survey = store_.get_survey(id);
      auto j = to_json(survey);
      nlohmann::json questions = nlohmann::json::object();
      for (const auto& sys : survey.systems) {
        nlohmann::json qs = nlohmann::json::array();
        for (const auto& q : survey_questions(survey.wording, sys.display_name)) {
          nlohmann::json options = nlohmann::json::array();
          for (const auto& o : q.options) options.push_back({{"code", o.code}, {"text", o.text}});
          qs.push_back({{"key", q.key}, {"text", q.text}, {"options", std::move(options)}});
        }
        questions[sys.system_id] = std::move(qs);
      }
      j["questions"] = std::move(questions);
      j["open"] = is_open(survey, clock_());
      return json_response(200, j);
    });
  }

  /// POST /surveys/{id}/responses. Body:
  ///   {"respondent_id": "...", "role": "self"|"proxy", "weight": 1,
  ///    "answers": [{"system_id", "functional", "dysfunctional", "usage"}]}
  /// All answers are stored or none are.
  api_response submit_responses(std::string_view survey_id, std::string_view body) {
    return guarded([&] {
      const auto survey = store_.get_survey(survey_id);
      const std::string now = clock_();
      if (!is_open(survey, now)) return error(409, "SurveyClosed", "survey is not open for responses");
      auto j = parse_body(body);
      if (!j.is_object()) return error(422, "MalformedRecord", "body must be a JSON object");
      auto answers = j.find("answers");
      if (answers == j.end() || !answers->is_array() || answers->empty())
        return error(422, "MalformedRecord", "answers must be a non-empty array");

      auto text_of = [](const nlohmann::json& obj, const char* key) -> std::optional<std::string> {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::string();
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
        return std::nullopt;
      };
      auto respondent = text_of(j, "respondent_id");
      auto role = text_of(j, "role");
      auto weight = text_of(j, "weight");
      if (!respondent || !role || !weight)
        return error(422, "MalformedRecord", "respondent_id, role and weight must be strings or integers");

      std::vector<response_record> batch;
      std::size_t index = 0;
      for (const auto& a : *answers) {
        ++index;
        if (!a.is_object()) return error(422, "MalformedRecord", "answer " + std::to_string(index) + " is not an object");
        rationalizer::detail::raw_fields f;
        f.respondent_id = *respondent;
        f.role = *role;
        f.weight = *weight;
        for (auto [key, dst] : {std::pair{"system_id", &f.system_id},
                                std::pair{"functional", &f.functional},
                                std::pair{"dysfunctional", &f.dysfunctional},
                                std::pair{"usage", &f.usage}}) {
          auto v = text_of(a, key);
          if (!v) return error(422, "MalformedRecord", std::string(key) + " must be a string");
          *dst = *v;
        }
        response r;
        if (auto rej = rationalizer::detail::interpret(f, index, r))
          return error(422, std::string(to_string(rej->reason)),
                       "answer " + std::to_string(index) + ": " + rej->detail);
        if (!survey.systems.empty() && !survey.declares(r.system_id))
          return error(422, "UnknownSystem", "answer " + std::to_string(index) + ": system '" +
                                                 r.system_id + "' is not part of this survey");
        batch.push_back({std::string(survey_id), std::move(r), now});
      }
      store_.store_batch(batch);
      return json_response(201, {{"stored", batch.size()}});
    });
  }

  /// GET /surveys/{id}/analysis?thresholds=k:v,...&statistic=average|median
  api_response get_analysis(std::string_view survey_id, const query_params& query) {
    return guarded([&] {
      const auto options = options_from_query(query);
      return api_response{200, analysis_json_body(store_, survey_id, options)};
    });
  }

  /// GET /surveys/{id}/analysis/sensitivity?step=0.1
  api_response get_sensitivity(std::string_view survey_id, const query_params& query) {
    return guarded([&] {
      const auto options = options_from_query(query);
      decimal step = decimal::from_units(1000);
      if (auto s = single(query, "step")) {
        auto parsed = decimal::parse(*s);
        if (!parsed || *parsed <= decimal{}) return error(422, "InvalidStep", "step must be a positive decimal");
        step = *parsed;
      }
      const auto analysis = analyze_survey(store_, survey_id, options);
      std::vector<system_summary> summaries;
      for (const auto& c : analysis.result.ranked) summaries.push_back(c.summary);
      for (const auto& u : analysis.result.unrated) summaries.push_back(u.summary);
      sensitivity_report sweep{step, {}, {}};
      if (!summaries.empty()) sweep = sensitivity_sweep(summaries, analysis.limits, step);
      return json_response(200, report::to_json(sweep, survey_id));
    });
  }

  /// POST /runs. Body: {"survey_id", "thresholds"?: {...}, "statistic"?,
  /// "stage"?}. The run starts Classified (frozen to the current log) unless
  /// an earlier stage is requested.
  api_response create_run(std::string_view body) {
    return guarded([&] {
      auto j = parse_body(body);
      if (!j.is_object() || !j.contains("survey_id") || !j["survey_id"].is_string())
        return error(422, "MalformedRecord", "survey_id is required");
      analysis_run run;
      run.survey_id = j["survey_id"].get<std::string>();
      store_.get_survey(run.survey_id);
      if (j.contains("thresholds")) run.limits = detail::thresholds_from_json(j["thresholds"]);
      if (j.contains("statistic")) {
        auto s = j["statistic"].is_string() ? parse_statistic(j["statistic"].get<std::string>())
                                            : std::nullopt;
        if (!s) return error(422, "InvalidStatistic", "statistic must be average or median");
        run.statistic = *s;
      }
      if (j.contains("stage")) {
        auto s = j["stage"].is_string() ? parse_stage(j["stage"].get<std::string>()) : std::nullopt;
        if (!s || *s > run_stage::classified)
          return error(422, "InvalidStage", "initial stage must be Collecting, Scored or Classified");
        run.stage = *s;
      }
      validate(run.limits);
      run.created_at = clock_();
      if (run.stage == run_stage::classified)
        run.response_count = store_.load_response_set(run.survey_id).size();
      store_.append_event_after(detail::runs_log, [&](const auto& events) {
        char id[32];
        std::snprintf(id, sizeof id, "run-%04zu", detail::replay_runs(events).size() + 1);
        run.run_id = id;
        return std::optional<nlohmann::json>(
            nlohmann::json{{"type", "created"}, {"at", run.created_at}, {"run", detail::run_to_json(run)}});
      });
      return json_response(201, run_body(run));
    });
  }

  /// GET /runs/{id}: the run plus its analysis under the frozen thresholds.
  api_response get_run(std::string_view run_id) {
    return guarded([&] {
      const auto runs = detail::replay_runs(store_.read_events(detail::runs_log));
      auto it = runs.find(std::string(run_id));
      if (it == runs.end()) throw unknown_run(std::string(run_id));
      return json_response(200, run_body(it->second));
    });
  }

  /// PATCH /runs/{id}. Body: {"stage"?: "...", "decisions"?: {system_id:
  /// {"note": "...", "decision": "Keep"|"Decommission"|"Defer"|null}}}.
  api_response patch_run(std::string_view run_id, std::string_view body) {
    return guarded([&] {
      auto j = parse_body(body);
      if (!j.is_object()) return error(422, "MalformedRecord", "body must be a JSON object");
      for (const auto& [key, _] : j.items())
        if (key != "stage" && key != "decisions") {
          if (key == "thresholds" || key == "statistic")
            return error(409, "FrozenRun", "thresholds are frozen per run; create a new run instead");
          return error(422, "MalformedRecord", "unknown field '" + key + "'");
        }
      const std::string now = clock_();
      analysis_run updated;
      store_.append_event_after(detail::runs_log, [&](const auto& events) {
        auto runs = detail::replay_runs(events);
        auto it = runs.find(std::string(run_id));
        if (it == runs.end()) throw unknown_run(std::string(run_id));
        analysis_run run = it->second;
        if (j.contains("stage")) {
          auto to = j["stage"].is_string() ? parse_stage(j["stage"].get<std::string>()) : std::nullopt;
          if (!to) throw std::invalid_argument("unknown stage");
          if (!transition_allowed(run.stage, *to))
            throw illegal_transition("cannot move a run from " + std::string(to_string(run.stage)) +
                                     " to " + std::string(to_string(*to)));
          run.stage = *to;
          if (!run.response_count && run.stage >= run_stage::classified)
            run.response_count = store_.load_response_set(run.survey_id).size();
        }
        if (j.contains("decisions")) {
          if (!j["decisions"].is_object()) throw std::invalid_argument("decisions must be an object");
          for (const auto& [system, d] : j["decisions"].items()) {
            if (!d.is_object()) throw std::invalid_argument("decision for '" + system + "' must be an object");
            decision_note note = run.decisions[system];
            if (d.contains("note")) {
              if (!d["note"].is_string()) throw std::invalid_argument("note must be a string");
              note.note = d["note"].template get<std::string>();
            }
            if (d.contains("decision")) {
              if (d["decision"].is_null()) note.decision.reset();
              else {
                auto dec = d["decision"].is_string() ? parse_decision(d["decision"].template get<std::string>())
                                                     : std::nullopt;
                if (!dec) throw std::invalid_argument("decision must be Keep, Decommission or Defer");
                note.decision = dec;
              }
            }
            run.decisions[system] = std::move(note);
          }
        }
        updated = run;
        return std::optional<nlohmann::json>(
            nlohmann::json{{"type", "updated"}, {"at", now}, {"run", detail::run_to_json(run)}});
      });
      return json_response(200, run_body(updated));
    });
  }

  api_response openapi() const { return {200, openapi_document().dump(2) + "\n"}; }

  /// True when no token is configured or the header carries it.
  bool authorized(std::string_view authorization_header) const {
    return !token_ || authorization_header == "Bearer " + *token_;
  }

  void mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const api_response& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    auto query = [](const httplib::Request& req) {
      query_params q;
      for (const auto& [k, v] : req.params) q.emplace(k, v);
      return q;
    };
    server.set_pre_routing_handler([this, send](const httplib::Request& req, httplib::Response& res) {
      if (authorized(req.get_header_value("Authorization"))) return httplib::Server::HandlerResponse::Unhandled;
      send(res, error(401, "Unauthorized", "missing or wrong bearer token"));
      return httplib::Server::HandlerResponse::Handled;
    });
    server.Post("/surveys", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, create_survey(req.body));
    });
    server.Get(R"(/surveys/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get_survey(req.matches[1].str()));
    });
    server.Post(R"(/surveys/([^/]+)/responses)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, submit_responses(req.matches[1].str(), req.body));
    });
    server.Get(R"(/surveys/([^/]+)/analysis)", [this, send, query](const httplib::Request& req, httplib::Response& res) {
      send(res, get_analysis(req.matches[1].str(), query(req)));
    });
    server.Get(R"(/surveys/([^/]+)/analysis/sensitivity)",
               [this, send, query](const httplib::Request& req, httplib::Response& res) {
                 send(res, get_sensitivity(req.matches[1].str(), query(req)));
               });
    server.Post("/runs", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, create_run(req.body));
    });
    server.Get(R"(/runs/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get_run(req.matches[1].str()));
    });
    server.Patch(R"(/runs/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, patch_run(req.matches[1].str(), req.body));
    });
    server.Get("/openapi", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, openapi());
    });
  }

  static nlohmann::json openapi_document();

 private:
  static api_response json_response(int status, const nlohmann::json& j) {
    return {status, j.dump(2) + "\n"};
  }

  static api_response error(int status, std::string code, std::string message) {
    return json_response(status, {{"error", std::move(code)}, {"message", std::move(message)}});
  }

  static nlohmann::json parse_body(std::string_view body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("request body is not valid JSON");
    return j;
  }

  static std::optional<std::string> single(const query_params& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end()) return std::nullopt;
    return it->second;
  }

  static analysis_options options_from_query(const query_params& q) {
    analysis_options options;
    if (auto t = single(q, "thresholds")) options.limits = parse_thresholds_query(*t);
    for (const auto& [key, value] : q)
      if (key != "thresholds" && key != "statistic" && key != "step")
        apply_threshold_setting(options.limits, key, value);
    validate(options.limits);
    if (auto s = single(q, "statistic")) {
      auto parsed = parse_statistic(*s);
      if (!parsed) throw std::invalid_argument("statistic must be average or median");
      options.statistic = *parsed;
    }
    return options;
  }

  nlohmann::json run_body(const analysis_run& run) const {
    auto j = detail::run_to_json(run);
    const auto analysis =
        analyze_survey(store_, run.survey_id, {run.limits, run.statistic}, run.response_count);
    j["analysis"] = report::to_json(analysis, run.survey_id);
    return j;
  }

  std::string next_survey_id() const {
    const auto ids = store_.survey_ids();
    for (std::size_t n = ids.size() + 1;; ++n) {
      char id[32];
      std::snprintf(id, sizeof id, "survey-%04zu", n);
      if (!store_.has_survey(id)) return id;
    }
  }

  template <class F>
  api_response guarded(F&& handler) {
    try {
      return handler();
    } catch (const unknown_survey& e) {
      return error(404, "UnknownSurvey", e.what());
    } catch (const unknown_run& e) {
      return error(404, "UnknownRun", e.what());
    } catch (const survey_exists& e) {
      return error(409, "SurveyExists", e.what());
    } catch (const duplicate_response& e) {
      return error(409, "DuplicateResponse", e.what());
    } catch (const illegal_transition& e) {
      return error(409, "IllegalTransition", e.what());
    } catch (const storage_unavailable& e) {
      return error(503, "StorageUnavailable", e.what());
    } catch (const invalid_thresholds& e) {
      return error(422, "InvalidThresholds", e.what());
    } catch (const invalid_survey& e) {
      return error(422, "InvalidSurvey", e.what());
    } catch (const std::invalid_argument& e) {
      return error(422, "InvalidRequest", e.what());
    } catch (const std::exception& e) {
      return error(400, "BadRequest", e.what());
    }
  }

  response_store& store_;
  std::optional<std::string> token_;
  std::function<std::string()> clock_;
};

inline nlohmann::json api::openapi_document() {
  using nlohmann::json;
  auto op = [](const char* summary, json responses) {
    return json{{"summary", summary}, {"responses", std::move(responses)}};
  };
  auto path_param = [](const char* name) {
    return json::array({{{"name", name}, {"in", "path"}, {"required", true},
                         {"schema", {{"type", "string"}}}}});
  };
  json analysis = op("Ranked 4R classification computed on demand from the response log",
                     {{"200", {{"description", "analysis body"}}},
                      {"404", {{"description", "unknown survey"}}},
                      {"422", {{"description", "invalid thresholds or statistic"}}}});
  analysis["parameters"] = path_param("id");
  analysis["parameters"].push_back({{"name", "thresholds"}, {"in", "query"},
                                    {"description", "comma-separated key:value pairs"},
                                    {"schema", {{"type", "string"}}}});
  analysis["parameters"].push_back({{"name", "statistic"}, {"in", "query"},
                                    {"schema", {{"type", "string"}, {"enum", {"average", "median"}}}}});
  json sensitivity = op("Threshold sensitivity sweep (+/-20%)",
                        {{"200", {{"description", "sweep body"}}},
                         {"404", {{"description", "unknown survey"}}}});
  sensitivity["parameters"] = path_param("id");
  sensitivity["parameters"].push_back({{"name", "step"}, {"in", "query"},
                                       {"schema", {{"type", "number"}, {"default", 0.1}}}});
  json get_survey = op("Survey definition with rendered question wording",
                       {{"200", {{"description", "definition"}}}, {"404", {{"description", "unknown survey"}}}});
  get_survey["parameters"] = path_param("id");
  json submit = op("Submit one respondent's answers for one or more systems",
                   {{"201", {{"description", "stored"}}},
                    {"404", {{"description", "unknown survey"}}},
                    {"409", {{"description", "duplicate response or survey closed"}}},
                    {"422", {{"description", "invalid answer code or weight"}}},
                    {"503", {{"description", "storage unavailable"}}}});
  submit["parameters"] = path_param("id");
  json get_run = op("Analysis run with its frozen analysis",
                    {{"200", {{"description", "run"}}}, {"404", {{"description", "unknown run"}}}});
  get_run["parameters"] = path_param("id");
  json patch_run = op("Advance the run stage or record decisions",
                      {{"200", {{"description", "updated run"}}},
                       {"409", {{"description", "illegal stage transition or frozen field"}}}});
  patch_run["parameters"] = path_param("id");
  return json{
      {"openapi", "3.0.3"},
      {"info", {{"title", "rationalizer"}, {"version", "1.0.0"}}},
      {"components",
       {{"securitySchemes", {{"bearer", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
      {"paths",
       {{"/surveys", {{"post", op("Create a survey definition",
                                  {{"201", {{"description", "created"}}},
                                   {"409", {{"description", "survey exists"}}},
                                   {"422", {{"description", "invalid definition"}}}})}}},
        {"/surveys/{id}", {{"get", get_survey}}},
        {"/surveys/{id}/responses", {{"post", submit}}},
        {"/surveys/{id}/analysis", {{"get", analysis}}},
        {"/surveys/{id}/analysis/sensitivity", {{"get", sensitivity}}},
        {"/runs", {{"post", op("Freeze an analysis run",
                               {{"201", {{"description", "created"}}},
                                {"404", {{"description", "unknown survey"}}}})}}},
        {"/runs/{id}", {{"get", get_run}, {"patch", patch_run}}},
        {"/openapi", {{"get", op("This document", {{"200", {{"description", "OpenAPI JSON"}}}})}}}}},
  };
}

}  // namespace rationalizer

#endif  // RATIONALIZER_SERVICE_HPP
