#ifndef RATIONALIZER_INGEST_HPP
#define RATIONALIZER_INGEST_HPP

// Survey definitions, answer codes, and the CSV / JSON response formats.
//
// CSV header (mandatory, exact):
//   respondent_id,system_id,functional,dysfunctional,usage,weight,role
// Answer codes:
//   functional    LIKE | EXPECT | NEUTRAL | DISLIKE
//   dysfunctional PREFER_NOT | CANNOT_WORK | CAN_MANAGE | DONT_NEED
//   usage         L | S | O | N, or empty for "no usage answer"
//   weight        positive integer, empty means 1
//   role          self | proxy, empty means self

#include <algorithm>
#include <cstdint>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "rationalizer/kano.hpp"

namespace rationalizer {

// ---------------------------------------------------------------------------
// Answer codes

constexpr std::string_view code(functional_answer a) {
  switch (a) {
    case functional_answer::like_it: return "LIKE";
    case functional_answer::expect_it: return "EXPECT";
    case functional_answer::neither_like_nor_dislike: return "NEUTRAL";
    case functional_answer::dislike_it: return "DISLIKE";
  }
  return "";
}

constexpr std::string_view code(dysfunctional_answer a) {
  switch (a) {
    case dysfunctional_answer::prefer_not_to_be_without: return "PREFER_NOT";
    case dysfunctional_answer::could_not_work_effectively: return "CANNOT_WORK";
    case dysfunctional_answer::can_manage_without: return "CAN_MANAGE";
    case dysfunctional_answer::do_not_need_it: return "DONT_NEED";
  }
  return "";
}

constexpr std::string_view code(usage_category u) {
  switch (u) {
    case usage_category::lot: return "L";
    case usage_category::somewhat: return "S";
    case usage_category::occasionally: return "O";
    case usage_category::not_much: return "N";
  }
  return "";
}

constexpr std::string_view code(respondent_role r) {
  return r == respondent_role::manager_proxy ? "proxy" : "self";
}

inline std::optional<functional_answer> parse_functional(std::string_view s) {
  for (auto a : all_functional_answers)
    if (code(a) == s) return a;
  return std::nullopt;
}

inline std::optional<dysfunctional_answer> parse_dysfunctional(std::string_view s) {
  for (auto a : all_dysfunctional_answers)
    if (code(a) == s) return a;
  return std::nullopt;
}

inline std::optional<usage_category> parse_usage(std::string_view s) {
  for (auto u : all_usage_categories)
    if (code(u) == s) return u;
  return std::nullopt;
}

inline std::optional<respondent_role> parse_role(std::string_view s) {
  if (s == "self" || s.empty()) return respondent_role::self_report;
  if (s == "proxy") return respondent_role::manager_proxy;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Survey definitions and question wording

enum class question_wording : std::uint8_t { self_report, manager_proxy };

constexpr std::string_view to_string(question_wording w) {
  return w == question_wording::manager_proxy ? "ManagerProxy" : "SelfReport";
}

inline std::optional<question_wording> parse_wording(std::string_view s) {
  if (s == "SelfReport") return question_wording::self_report;
  if (s == "ManagerProxy") return question_wording::manager_proxy;
  return std::nullopt;
}

struct answer_option {
  std::string code;
  std::string text;
};

struct question {
  std::string key;  // functional | dysfunctional | usage
  std::string text;
  std::vector<answer_option> options;
};

/// The three questions asked per system, with `system` substituted for the
/// tool name. Option order matches the answer enums.
inline std::vector<question> survey_questions(question_wording wording,
                                              std::string_view system) {
  const std::string x = "'" + std::string(system) + "'";
  const bool proxy = wording == question_wording::manager_proxy;
  auto fn = [](auto a) { return std::string(code(a)); };
  question functional{
      "functional",
      proxy ? "How do you think the staff in your department/group/team feel about "
              "System/Tool " + x + " now?"
            : "How do you feel about System/Tool " + x + " now?",
      {{fn(functional_answer::like_it), proxy ? "They like it." : "I like it."},
       {fn(functional_answer::expect_it), proxy ? "They expect it." : "I expect it."},
       {fn(functional_answer::neither_like_nor_dislike),
        proxy ? "They neither like nor dislike it." : "I neither like nor dislike it."},
       {fn(functional_answer::dislike_it), proxy ? "They dislike it." : "I dislike it."}}};
  question dysfunctional{
      "dysfunctional",
      proxy ? "How do you think they would feel if they did NOT have System/Tool " + x + "?"
            : "How would you feel if you did NOT have System/Tool " + x + "?",
      {{fn(dysfunctional_answer::prefer_not_to_be_without),
        proxy ? "They would prefer not to be without it."
              : "I would prefer not to be without it."},
       {fn(dysfunctional_answer::could_not_work_effectively),
        proxy ? "They could not work effectively without it."
              : "I could not work effectively without it."},
       {fn(dysfunctional_answer::can_manage_without),
        proxy ? "They can manage without it, but might use it if it were still available."
              : "I can manage without it, but might use it if it were still available."},
       {fn(dysfunctional_answer::do_not_need_it),
        proxy ? "They do not need it." : "I do not need it."}}};
  question usage{
      "usage",
      proxy ? "How often do you think they use System/Tool " + x + "?"
            : "How often do you use System/Tool " + x + "?",
      {{fn(usage_category::lot), "A lot (every day or several times a week)"},
       {fn(usage_category::somewhat), "Somewhat (once a week to once a month)"},
       {fn(usage_category::occasionally), "Occasionally (2-4 times a year)"},
       {fn(usage_category::not_much), "Not very much or not at all (once a year or less)"}}};
  return {functional, dysfunctional, usage};
}

struct survey_system {
  std::string system_id;
  std::string display_name;
  std::optional<std::string> business_area;

  friend bool operator==(const survey_system&, const survey_system&) = default;
};

struct survey_definition {
  std::string survey_id;
  std::string title;
  std::vector<survey_system> systems;
  question_wording wording = question_wording::self_report;
  std::optional<std::string> opens_at;   // RFC 3339 UTC, "2024-01-31T09:00:00Z"
  std::optional<std::string> closes_at;

  bool declares(std::string_view system_id) const {
    return std::any_of(systems.begin(), systems.end(),
                       [&](const auto& s) { return s.system_id == system_id; });
  }

  std::vector<std::string> system_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : systems) ids.push_back(s.system_id);
    return ids;
  }

  friend bool operator==(const survey_definition&, const survey_definition&) = default;
};

class invalid_survey : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Survey ids name files in the data directory, so they are restricted to a
/// filename-safe alphabet.
inline bool valid_survey_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
}

inline bool valid_timestamp(std::string_view ts) {
  static const std::regex pattern(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
  return std::regex_match(ts.begin(), ts.end(), pattern);
}

inline void validate(const survey_definition& s) {
  if (!valid_survey_id(s.survey_id))
    throw invalid_survey("survey_id must be 1-128 characters of [A-Za-z0-9._-]");
  std::set<std::string_view> ids;
  for (const auto& sys : s.systems) {
    if (sys.system_id.empty()) throw invalid_survey("system_id must not be empty");
    if (!ids.insert(sys.system_id).second)
      throw invalid_survey("duplicate system_id '" + sys.system_id + "'");
  }
  for (const auto* ts : {&s.opens_at, &s.closes_at})
    if (*ts && !valid_timestamp(**ts))
      throw invalid_survey("timestamps must look like 2024-01-31T09:00:00Z");
  // Fixed-width UTC timestamps order lexicographically.
  if (s.opens_at && s.closes_at && *s.closes_at < *s.opens_at)
    throw invalid_survey("closes_at is before opens_at");
}

/// Whether responses are accepted at `now` (same timestamp format).
inline bool is_open(const survey_definition& s, std::string_view now) {
  if (s.opens_at && now < *s.opens_at) return false;
  if (s.closes_at && now > *s.closes_at) return false;
  return true;
}

inline nlohmann::json to_json(const survey_definition& s) {
  nlohmann::json systems = nlohmann::json::array();
  for (const auto& sys : s.systems) {
    nlohmann::json j{{"system_id", sys.system_id}, {"display_name", sys.display_name}};
    if (sys.business_area) j["business_area"] = *sys.business_area;
    systems.push_back(std::move(j));
  }
  nlohmann::json j{{"survey_id", s.survey_id},
                   {"title", s.title},
                   {"wording", to_string(s.wording)},
                   {"systems", std::move(systems)}};
  j["opens_at"] = s.opens_at ? nlohmann::json(*s.opens_at) : nlohmann::json();
  j["closes_at"] = s.closes_at ? nlohmann::json(*s.closes_at) : nlohmann::json();
  return j;
}

/// Throws invalid_survey on missing or mistyped fields. `survey_id` may be
/// absent when `fallback_id` is given.
inline survey_definition survey_from_json(const nlohmann::json& j,
                                          std::string_view fallback_id = {}) {
  if (!j.is_object()) throw invalid_survey("survey definition must be a JSON object");
  auto string_field = [&](const char* key, bool required) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw invalid_survey(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!it->is_string()) throw invalid_survey(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
  };
  survey_definition s;
  auto id = string_field("survey_id", fallback_id.empty());
  s.survey_id = id ? *id : std::string(fallback_id);
  s.title = string_field("title", false).value_or(s.survey_id);
  if (auto w = string_field("wording", false)) {
    auto parsed = parse_wording(*w);
    if (!parsed) throw invalid_survey("wording must be SelfReport or ManagerProxy");
    s.wording = *parsed;
  }
  s.opens_at = string_field("opens_at", false);
  s.closes_at = string_field("closes_at", false);
  if (auto it = j.find("systems"); it != j.end()) {
    if (!it->is_array()) throw invalid_survey("'systems' must be an array");
    for (const auto& sj : *it) {
      if (!sj.is_object() || !sj.contains("system_id") || !sj["system_id"].is_string())
        throw invalid_survey("each system needs a string system_id");
      survey_system sys;
      sys.system_id = sj["system_id"].get<std::string>();
      sys.display_name = sj.value("display_name", sys.system_id);
      if (sj.contains("business_area") && sj["business_area"].is_string())
        sys.business_area = sj["business_area"].get<std::string>();
      s.systems.push_back(std::move(sys));
    }
  }
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Response records

struct response_record {
  std::string survey_id;
  response answers;
  std::string submitted_at;  // stamped when stored

  friend bool operator==(const response_record&, const response_record&) = default;
};

enum class reject_reason : std::uint8_t {
  wrong_field_count,
  missing_identifier,
  unknown_answer_code,
  unknown_role,
  non_positive_weight,
  invalid_weight,
  duplicate_response,
  malformed_record,
  unknown_system,
};

constexpr std::string_view to_string(reject_reason r) {
  switch (r) {
    case reject_reason::wrong_field_count: return "WrongFieldCount";
    case reject_reason::missing_identifier: return "MissingIdentifier";
    case reject_reason::unknown_answer_code: return "UnknownAnswerCode";
    case reject_reason::unknown_role: return "UnknownRole";
    case reject_reason::non_positive_weight: return "NonPositiveWeight";
    case reject_reason::invalid_weight: return "InvalidWeight";
    case reject_reason::duplicate_response: return "DuplicateResponse";
    case reject_reason::malformed_record: return "MalformedRecord";
    case reject_reason::unknown_system: return "UnknownSystem";
  }
  return "?";
}

struct rejected_row {
  std::size_t row = 0;  // 1-based data row (CSV header excluded) or array index + 1
  reject_reason reason = reject_reason::malformed_record;
  std::string detail;
};

struct parse_result {
  std::vector<response_record> accepted;
  std::vector<std::size_t> accepted_rows;  // row number of each accepted record
  std::vector<rejected_row> rejects;
};

enum class input_format : std::uint8_t { csv, json };

inline std::optional<input_format> parse_format(std::string_view s) {
  if (s == "csv") return input_format::csv;
  if (s == "json") return input_format::json;
  return std::nullopt;
}

/// The whole input is unusable (bad CSV header, JSON that does not parse or
/// is not an array). Individual bad rows never raise this.
class malformed_input : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view csv_header =
    "respondent_id,system_id,functional,dysfunctional,usage,weight,role";

namespace detail {

// RFC 4180 records. Quoted fields may contain commas, quotes ("") and line
// breaks. Returns false at end of input.
inline bool next_csv_record(std::string_view& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.empty()) return false;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  for (; i < in.size(); ++i) {
    const char c = in[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < in.size() && in[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r' && i + 1 < in.size() && in[i + 1] == '\n') {
      ++i;
      break;
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  in.remove_prefix(std::min(i + 1, in.size()));
  return true;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct raw_fields {
  std::string respondent_id, system_id, functional, dysfunctional, usage, weight, role;
};

using response_key = std::tuple<std::string, std::string>;

// Validates one row; on success fills `out`, otherwise returns the reject.
inline std::optional<rejected_row> interpret(const raw_fields& f, std::size_t row,
                                             response& out) {
  auto reject = [&](reject_reason r, std::string detail) {
    return std::optional<rejected_row>(rejected_row{row, r, std::move(detail)});
  };
  if (f.respondent_id.empty() || f.system_id.empty())
    return reject(reject_reason::missing_identifier, "respondent_id and system_id are required");
  auto fa = parse_functional(f.functional);
  if (!fa) return reject(reject_reason::unknown_answer_code,
                         "functional: unknown answer code '" + f.functional + "'");
  auto da = parse_dysfunctional(f.dysfunctional);
  if (!da) return reject(reject_reason::unknown_answer_code,
                         "dysfunctional: unknown answer code '" + f.dysfunctional + "'");
  std::optional<usage_category> usage;
  if (!f.usage.empty()) {
    usage = parse_usage(f.usage);
    if (!usage) return reject(reject_reason::unknown_answer_code,
                              "usage: unknown answer code '" + f.usage + "'");
  }
  auto role = parse_role(f.role);
  if (!role) return reject(reject_reason::unknown_role, "role must be self or proxy, got '" +
                                                            f.role + "'");
  long long weight = 1;
  if (!f.weight.empty()) {
    std::size_t used = 0;
    try {
      weight = std::stoll(f.weight, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != f.weight.size() || used == 0)
      return reject(reject_reason::invalid_weight, "weight is not an integer: '" + f.weight + "'");
    if (weight < 1)
      return reject(reject_reason::non_positive_weight, "weight must be at least 1, got " + f.weight);
    if (weight > 1000000)
      return reject(reject_reason::invalid_weight, "weight exceeds 1000000");
  }
  if (*role == respondent_role::self_report && weight != 1)
    return reject(reject_reason::invalid_weight, "self-report rows must have weight 1");
  out = response{f.respondent_id, f.system_id, *fa, *da, usage, static_cast<int>(weight), *role};
  return std::nullopt;
}

inline void accept_or_reject(parse_result& result, std::set<response_key>& seen,
                             const raw_fields& f, std::size_t row,
                             std::string_view survey_id) {
  response r;
  if (auto rej = interpret(f, row, r)) {
    result.rejects.push_back(std::move(*rej));
    return;
  }
  if (!seen.emplace(r.respondent_id, r.system_id).second) {
    result.rejects.push_back({row, reject_reason::duplicate_response,
                              "second response from '" + r.respondent_id + "' for '" +
                                  r.system_id + "'"});
    return;
  }
  result.accepted.push_back({std::string(survey_id), std::move(r), {}});
  result.accepted_rows.push_back(row);
}

inline parse_result parse_csv(std::string_view text, std::string_view survey_id) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::string> fields;
  if (!next_csv_record(text, fields)) throw malformed_input("empty input: missing CSV header");
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) header += ',';
    header += fields[i];
  }
  if (header != csv_header)
    throw malformed_input("malformed header: expected '" + std::string(csv_header) +
                          "', got '" + header + "'");
  parse_result result;
  std::set<response_key> seen;
  std::size_t row = 0;
  while (next_csv_record(text, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++row;
    if (fields.size() != 7) {
      result.rejects.push_back({row, reject_reason::wrong_field_count,
                                "expected 7 fields, got " + std::to_string(fields.size())});
      continue;
    }
    raw_fields f{fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], fields[6]};
    accept_or_reject(result, seen, f, row, survey_id);
  }
  return result;
}

inline parse_result parse_json(std::string_view text, std::string_view survey_id) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw malformed_input(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw malformed_input("JSON responses must be an array of records");
  parse_result result;
  std::set<response_key> seen;
  std::size_t row = 0;
  for (const auto& item : doc) {
    ++row;
    if (!item.is_object()) {
      result.rejects.push_back({row, reject_reason::malformed_record, "record is not an object"});
      continue;
    }
    raw_fields f;
    std::string bad_key;
    auto str = [&](const char* key, std::string& dst) {
      auto it = item.find(key);
      if (it == item.end() || it->is_null()) return;
      if (it->is_string()) dst = it->get<std::string>();
      else if (it->is_number_integer() && std::string_view(key) == "weight")
        dst = std::to_string(it->get<long long>());
      else bad_key = key;
    };
    str("respondent_id", f.respondent_id);
    str("system_id", f.system_id);
    str("functional", f.functional);
    str("dysfunctional", f.dysfunctional);
    str("usage", f.usage);
    str("weight", f.weight);
    str("role", f.role);
    if (!bad_key.empty()) {
      result.rejects.push_back({row, reject_reason::malformed_record,
                                "field '" + bad_key + "' has the wrong type"});
      continue;
    }
    accept_or_reject(result, seen, f, row, survey_id);
  }
  return result;
}

}  // namespace detail

/// Every data row becomes either an accepted record or a reject carrying its
/// row number. Throws malformed_input only when the input as a whole cannot
/// be read (wrong CSV header, unparsable JSON). Duplicate (respondent,
/// system) pairs keep the first occurrence.
inline parse_result parse_responses(std::string_view text, input_format format,
                                    std::string_view survey_id = {}) {
  return format == input_format::csv ? detail::parse_csv(text, survey_id)
                                     : detail::parse_json(text, survey_id);
}

inline nlohmann::json to_json(const response& r) {
  return nlohmann::json{
      {"respondent_id", r.respondent_id},
      {"system_id", r.system_id},
      {"functional", code(r.functional)},
      {"dysfunctional", code(r.dysfunctional)},
      {"usage", r.usage ? nlohmann::json(code(*r.usage)) : nlohmann::json()},
      {"weight", r.proxy_weight},
      {"role", code(r.role)},
  };
}

inline std::string serialize_responses(std::span<const response_record> records,
                                       input_format format) {
  if (format == input_format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) arr.push_back(to_json(rec.answers));
    return arr.dump(2) + "\n";
  }
  std::string out(csv_header);
  out += '\n';
  for (const auto& rec : records) {
    const auto& r = rec.answers;
    out += detail::csv_escape(r.respondent_id) + ',' + detail::csv_escape(r.system_id) + ',';
    out += std::string(code(r.functional)) + ',' + std::string(code(r.dysfunctional)) + ',';
    out += r.usage ? std::string(code(*r.usage)) : std::string();
    out += ',' + std::to_string(r.proxy_weight) + ',' + std::string(code(r.role)) + '\n';
  }
  return out;
}

inline std::vector<response> answers_of(std::span<const response_record> records) {
  std::vector<response> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.answers);
  return out;
}

}  // namespace rationalizer

#endif  // RATIONALIZER_INGEST_HPP
