// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Expected values for the six-app worked example are fixed tables;
// everything else is checked against the test oracles.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rationalizer/rationalizer.hpp"
#include "support/fixture.hpp"
#include "support/oracle.hpp"
#include "support/process.hpp"
#include "support/properties.hpp"
#include "support/temp_dir.hpp"

using namespace rationalizer;

namespace {

constexpr int property_cases = 1000;

struct check_context {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void expect_no(const std::optional<std::string>& counterexample, const std::string& what) {
    if (counterexample) failures.push_back(what + ": " + *counterexample);
  }
};

int failed_criteria = 0;

void criterion(const std::string& name, double time_limit_seconds,
               const std::function<void(check_context&)>& body) {
  check_context ctx;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(ctx);
  } catch (const std::exception& e) {
    ctx.failures.push_back(std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_seconds > 0 && seconds >= time_limit_seconds)
    ctx.failures.push_back("took " + std::to_string(seconds) + "s, limit " +
                           std::to_string(time_limit_seconds) + "s");
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.3fs", seconds);
  std::cout << (ctx.failures.empty() ? "PASS" : "FAIL") << "  " << name << "  (" << timing << ")\n";
  for (const auto& n : ctx.notes) std::cout << "      " << n << "\n";
  for (const auto& f : ctx.failures) std::cout << "      - " << f << "\n";
  if (!ctx.failures.empty()) ++failed_criteria;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

decimal d(const char* text) { return decimal::parse_or_throw(text); }

std::vector<response> fixture_responses() {
  const auto parsed = parse_responses(slurp(fixture::data_path("phone_apps_responses.csv")), input_format::csv);
  if (!parsed.rejects.empty()) throw std::runtime_error("fixture CSV has rejected rows");
  return answers_of(parsed.accepted);
}

template <class T>
std::map<std::string, T> index_by_id(const std::vector<T>& items) {
  std::map<std::string, T> out;
  for (const auto& item : items) out.emplace(item.summary.system_id, item);
  return out;
}

// Worked example: six phone apps, five respondents.
struct satisfaction_row {
  const char* id;
  int total;
  const char* average;
  const char* median;
  int priority;
  four_r conclusion;
};
const satisfaction_row expected_satisfaction[] = {
    {"camera", 42, "8.4", "9", 2, four_r::retain},      {"social_media", 3, "1.0", "1", 6, four_r::remove},
    {"map", 30, "6.0", "6", 3, four_r::review},         {"taxi", 9, "3.0", "3", 5, four_r::remove},
    {"teleconference", 16, "4.0", "3", 4, four_r::review}, {"browser", 45, "9.0", "9", 1, four_r::retain},
};

struct usage_row {
  const char* id;
  int total_usage;
  const char* usage_factor;
};
const usage_row expected_usage[] = {
    {"camera", 18, "3.6"}, {"social_media", 4, "1.3"}, {"map", 16, "3.2"},
    {"taxi", 6, "2.0"},    {"teleconference", 7, "1.8"}, {"browser", 20, "4.0"},
};

struct cku_row {
  const char* id;
  const char* cku;
  int priority;
  four_r conclusion;
};
const cku_row expected_cku[] = {
    {"camera", "30.2", 2, four_r::retain}, {"social_media", "1.3", 6, four_r::remove},
    {"map", "19.2", 3, four_r::review},    {"taxi", "6.0", 5, four_r::remove},
    {"teleconference", "7.2", 4, four_r::remove}, {"browser", "36.0", 1, four_r::retain},
};

void satisfaction_table(check_context& c) {
  const auto summaries = summarize_all(fixture_responses());
  const auto report = index_by_id(satisfaction_only_report(summaries, {}));
  c.expect(report.size() == 6, "expected 6 apps, got " + std::to_string(report.size()));
  for (const auto& row : expected_satisfaction) {
    auto it = report.find(row.id);
    if (it == report.end()) {
      c.expect(false, std::string(row.id) + " missing");
      continue;
    }
    const auto& e = it->second;
    const std::string id = row.id;
    c.expect(e.summary.total_satisfaction == row.total, id + " total " + std::to_string(e.summary.total_satisfaction));
    c.expect(e.summary.average_satisfaction == d(row.average), id + " average " + e.summary.average_satisfaction.to_string(1));
    c.expect(e.summary.median_satisfaction == d(row.median), id + " median " + e.summary.median_satisfaction.to_string(1));
    c.expect(e.priority == row.priority, id + " priority " + std::to_string(e.priority));
    c.expect(e.conclusion == row.conclusion, id + " conclusion " + std::string(to_string(e.conclusion)));
  }
}

void usage_table(check_context& c) {
  const auto summaries = summarize_all(fixture_responses());
  std::map<std::string, system_summary> by;
  for (const auto& s : summaries) by[s.system_id] = s;
  for (const auto& row : expected_usage) {
    const std::string id = row.id;
    if (!by.contains(id)) {
      c.expect(false, id + " missing");
      continue;
    }
    const auto& s = by[id];
    c.expect(s.total_usage == row.total_usage, id + " total usage " + std::to_string(s.total_usage));
    c.expect(s.usage_factor == d(row.usage_factor),
             id + " usage factor " + (s.usage_factor ? s.usage_factor->to_string(1) : "none"));
  }
}

void cku_table(check_context& c) {
  const auto result = rank(summarize_all(fixture_responses()), {});
  const auto by = index_by_id(result.ranked);
  c.expect(result.unrated.empty(), "unexpected unrated systems");
  for (const auto& row : expected_cku) {
    const std::string id = row.id;
    auto it = by.find(id);
    if (it == by.end()) {
      c.expect(false, id + " missing");
      continue;
    }
    const auto& e = it->second;
    c.expect(e.summary.cku == d(row.cku), id + " cku " + (e.summary.cku ? e.summary.cku->to_string(1) : "none"));
    c.expect(e.priority == row.priority, id + " priority " + std::to_string(e.priority));
    c.expect(e.category == row.conclusion, id + " conclusion " + std::string(to_string(e.category)));
  }
  // the teleconference score pins rounding before multiplying: 4.0 x 1.8
  // rather than 4.0 x 1.75 = 7.0
  if (auto it = by.find("teleconference"); it != by.end())
    c.expect(it->second.summary.cku == d("7.2"), "teleconference cku is not 7.2");
}

void grid_exhaustiveness(check_context& c) {
  int cells = 0;
  for (auto f : all_functional_answers)
    for (auto dy : all_dysfunctional_answers) {
      ++cells;
      const int expected = oracle::letter_points(oracle::grid_letter(f, dy));
      const int got = satisfaction_points(categorize(f, dy));
      c.expect(got == expected, "cell (" + std::to_string(static_cast<int>(f)) + "," +
                                    std::to_string(static_cast<int>(dy)) + ") scored " +
                                    std::to_string(got) + ", expected " + std::to_string(expected));
    }
  c.expect(cells == 16, "expected 16 cells");
  // Dislike row: any dysfunctional answer, any usage, any role
  properties::generator g(41);
  for (int i = 0; i < property_cases; ++i) {
    auto r = g.one("sys", i, true);
    r.functional = functional_answer::dislike_it;
    if (r.category() != category_of_satisfaction::indifferent) {
      c.expect(false, "Dislike row not Indifferent for " + properties::describe({r}));
      break;
    }
  }
  c.notes.push_back("16 cells against the reference grid; Dislike row over " +
                    std::to_string(property_cases) + " random responses");
}

void property_suites(check_context& c) {
  c.expect_no(properties::permutation_invariance(property_cases), "permutation invariance");
  c.expect_no(properties::cohort_duplication(property_cases), "cohort duplication (default thresholds)");
  thresholds any_cohort;
  any_cohort.min_cohort_for_research = 1;
  c.expect_no(properties::cohort_duplication(property_cases, 112, any_cohort),
              "cohort duplication (research gate at 1 respondent)");
  c.expect_no(properties::proxy_weight_equivalence(property_cases), "proxy weight equivalence");
  c.expect_no(properties::range_bounds(property_cases), "range bounds");
  c.expect_no(properties::oracle_equivalence(property_cases), "oracle equivalence");
  c.notes.push_back(std::to_string(property_cases) +
                    " cases each: permutation, duplication x2, proxy weight, ranges, oracle");
  c.notes.push_back(
      "duplication compares classification for cohorts at or above min_cohort_for_research "
      "under defaults, and for every cohort with the gate at 1");
}

void layering(check_context& c) {
  fixture::temp_dir dir;
  const std::string data = dir.str() + "/data";
  auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {"--data-dir", data});
    return fixture::run_cli(args);
  };
  // a separate process writes the log
  c.expect(cli({"create-survey", fixture::data_path("phone_apps_survey.json")}).exit_code == 0,
           "create-survey failed");
  const auto imported = cli({"import", fixture::data_path("phone_apps_responses.csv"), "--survey", "phone-apps"});
  c.expect(imported.exit_code == 0, "import failed: " + imported.err);

  // in-process, from the persisted log
  std::string in_process_json, in_process_text;
  {
    response_store store(data);
    const auto report = analyze_survey(store, "phone-apps", {});
    in_process_json = report::to_json_text(report, "phone-apps");
    in_process_text = report::to_text(report, "phone-apps");
  }
  // after restart: a fresh store instance and a fresh CLI process
  response_store reopened(data);
  c.expect(analysis_json_body(reopened, "phone-apps", {}) == in_process_json,
           "reopened store JSON differs");
  const auto cli_json = cli({"analyze", "--survey", "phone-apps", "--out", "json"});
  const auto cli_text = cli({"analyze", "--survey", "phone-apps"});
  c.expect(cli_json.exit_code == 0 && cli_json.out == in_process_json, "CLI JSON differs from in-process JSON");
  c.expect(cli_text.exit_code == 0 && cli_text.out == in_process_text, "CLI text differs from in-process text");

  // HTTP over a socket
  api service(reopened);
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/surveys/phone-apps/analysis");
  server.stop();
  thread.join();
  c.expect(res && res->status == 200, "HTTP analysis request failed");
  c.expect(res && res->body == cli_json.out, "HTTP JSON differs from CLI JSON");
  c.notes.push_back("log written by a CLI process; JSON identical across in-process, restarted store, CLI and HTTP");
}

void ingestion(check_context& c) {
  const std::string csv = slurp(fixture::data_path("phone_apps_responses.csv"));
  const auto first = parse_responses(csv, input_format::csv, "phone-apps");
  c.expect(first.rejects.empty(), "fixture rows rejected");
  c.expect(first.accepted.size() == 25, "fixture has " + std::to_string(first.accepted.size()) + " rows");
  for (auto format : {input_format::csv, input_format::json}) {
    const auto text = serialize_responses(first.accepted, format);
    const auto second = parse_responses(text, format, "phone-apps");
    c.expect(second.rejects.empty() && second.accepted == first.accepted,
             std::string(format == input_format::csv ? "CSV" : "JSON") + " round trip lost data");
    c.expect(serialize_responses(second.accepted, format) == text, "re-serialization not stable");
  }

  // malformed rows interleaved with the fixture: each rejected with its row,
  // every good row still accepted
  std::istringstream lines(csv);
  std::string line, header;
  std::getline(lines, header);
  std::vector<std::string> good;
  while (std::getline(lines, line))
    if (!line.empty()) good.push_back(line);
  const std::vector<std::pair<std::string, reject_reason>> bad{
      {"x1,camera,MAYBE,CANNOT_WORK,L,1,self", reject_reason::unknown_answer_code},
      {"x2,camera,LIKE", reject_reason::wrong_field_count},
      {"x3,camera,LIKE,CANNOT_WORK,L,0,proxy", reject_reason::non_positive_weight},
      {",camera,LIKE,CANNOT_WORK,L,1,self", reject_reason::missing_identifier},
      {"x4,camera,LIKE,CANNOT_WORK,L,1,manager", reject_reason::unknown_role},
  };
  std::string mixed = header + "\n";
  std::map<std::size_t, reject_reason> expected;
  std::size_t row = 0, next_bad = 0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    mixed += good[i] + "\n";
    ++row;
    if (i % 5 == 2 && next_bad < bad.size()) {
      mixed += bad[next_bad].first + "\n";
      expected[++row] = bad[next_bad++].second;
    }
  }
  const auto result = parse_responses(mixed, input_format::csv, "phone-apps");
  c.expect(result.accepted == first.accepted, "good rows not all accepted around malformed ones");
  std::map<std::size_t, reject_reason> got;
  for (const auto& r : result.rejects) got[r.row] = r.reason;
  c.expect(got == expected, "rejects do not match the injected rows");

  // randomized round trip
  properties::generator g(51);
  for (int i = 0; i < property_cases; ++i) {
    std::vector<response_record> records;
    for (auto& r : g.cohort(6, true, i % 3 ? "sys" : "a \"quoted\", system")) records.push_back({"", r, ""});
    const auto back = parse_responses(serialize_responses(records, input_format::csv), input_format::csv);
    if (back.accepted != records || !back.rejects.empty()) {
      c.expect(false, "random round trip failed for " + properties::describe(answers_of(records)));
      break;
    }
  }
  c.notes.push_back("fixture round trip in CSV and JSON; " + std::to_string(expected.size()) +
                    " injected malformed rows rejected by row number; " + std::to_string(property_cases) +
                    " random round trips");
}

}  // namespace

int main() {
  std::cout << "rationalizer acceptance\n";
  criterion("Satisfaction table: totals, averages, medians, priorities, conclusions", 1.0,
            satisfaction_table);
  criterion("Usage table: usage totals and usage factors", 1.0, usage_table);
  criterion("CKU table: scores, priorities, conclusions", 1.0, cku_table);
  criterion("Grid exhaustiveness: 16 answer pairs, Dislike row Indifferent", 0, grid_exhaustiveness);
  criterion("Property suites (>= 1000 cases each)", 0, property_suites);
  criterion("Layering: restart, CLI and HTTP produce identical reports", 0, layering);
  criterion("Ingestion: lossless round trip, malformed rows rejected individually", 0, ingestion);
  std::cout << (failed_criteria == 0 ? "all criteria passed\n"
                                     : std::to_string(failed_criteria) + " criteria failed\n");
  return failed_criteria == 0 ? 0 : 1;
}
