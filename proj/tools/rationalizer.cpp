// rationalizer: batch front end over the response log.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rationalizer/rationalizer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rationalizer;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;

class io_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_failure("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw io_failure("cannot write " + path.string());
}

struct global_options {
  std::string data_dir;
  std::string config;
};

struct analysis_flags {
  std::string survey;
  std::string thresholds_file;
  std::string statistic = "average";
  bool auto_calibrate = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--survey", survey, "Survey id")->required();
    cmd->add_option("--thresholds", thresholds_file, "Key/value thresholds file");
    cmd->add_option("--statistic", statistic, "Satisfaction statistic for CKU")
        ->check(CLI::IsMember({"average", "median"}));
    cmd->add_flag("--auto-calibrate", auto_calibrate,
                  "Set CKU bands at the cohort's 33rd/67th percentiles");
  }

  analysis_options options() const {
    analysis_options o;
    if (!thresholds_file.empty()) o.limits = parse_thresholds_document(read_file(thresholds_file));
    if (auto_calibrate) o.limits.auto_calibrate = true;
    o.statistic = *parse_statistic(statistic);
    return o;
  }
};

std::unique_ptr<response_store> open_store(const global_options& g) {
  std::optional<fs::path> config;
  if (!g.config.empty()) config = g.config;
  else if (fs::exists("rationalizer.conf")) config = "rationalizer.conf";
  return std::make_unique<response_store>(
      resolve_data_dir(g.data_dir.empty() ? std::nullopt : std::optional(g.data_dir), config));
}

int cmd_create_survey(const global_options& g, const std::string& file) {
  auto store = open_store(g);
  auto survey = survey_from_json(nlohmann::json::parse(read_file(file)));
  store->create_survey(survey);
  std::cout << "created survey " << survey.survey_id << " with " << survey.systems.size()
            << " systems\n";
  return exit_ok;
}

int cmd_import(const global_options& g, const std::string& file, const std::string& survey_id,
               std::string format_name) {
  if (format_name.empty())
    format_name = fs::path(file).extension() == ".json" ? "json" : "csv";
  const auto format = parse_format(format_name);
  if (!format) throw std::invalid_argument("format must be csv or json");
  const std::string text = read_file(file);
  auto store = open_store(g);
  if (!valid_survey_id(survey_id))
    throw std::invalid_argument("survey id must be 1-128 characters of [A-Za-z0-9._-]");
  if (!store->has_survey(survey_id)) {
    survey_definition s;
    s.survey_id = survey_id;
    s.title = survey_id;
    try {
      store->create_survey(s);
    } catch (const survey_exists&) {
    }
  }
  const auto survey = store->get_survey(survey_id);

  parse_result parsed = parse_responses(text, *format, survey_id);
  std::vector<response_record> batch;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < parsed.accepted.size(); ++i) {
    const auto& rec = parsed.accepted[i];
    if (!survey.systems.empty() && !survey.declares(rec.answers.system_id)) {
      parsed.rejects.push_back({parsed.accepted_rows[i], reject_reason::unknown_system,
                                "system '" + rec.answers.system_id + "' is not part of survey"});
      continue;
    }
    batch.push_back(rec);
    rows.push_back(parsed.accepted_rows[i]);
  }
  // Collisions with the stored log are rejected row by row; the rest is
  // appended as one batch.
  std::size_t stored = 0;
  while (!batch.empty()) {
    try {
      store->store_batch(batch);
      stored += batch.size();
      break;
    } catch (const duplicate_response& e) {
      std::vector<response_record> keep;
      std::vector<std::size_t> keep_rows;
      const auto& dups = e.indexes();
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (std::find(dups.begin(), dups.end(), i) != dups.end()) {
          parsed.rejects.push_back({rows[i], reject_reason::duplicate_response,
                                    "'" + batch[i].answers.respondent_id + "' already answered for '" +
                                        batch[i].answers.system_id + "'"});
        } else {
          keep.push_back(std::move(batch[i]));
          keep_rows.push_back(rows[i]);
        }
      }
      batch = std::move(keep);
      rows = std::move(keep_rows);
    }
  }
  std::sort(parsed.rejects.begin(), parsed.rejects.end(),
            [](const auto& a, const auto& b) { return a.row < b.row; });
  std::cout << "imported " << stored << " responses into survey " << survey_id << "; "
            << parsed.rejects.size() << " rejected\n";
  for (const auto& r : parsed.rejects)
    std::cerr << file << ": row " << r.row << ": " << to_string(r.reason) << ": " << r.detail << "\n";
  return parsed.rejects.empty() ? exit_ok : exit_validation;
}

int cmd_export(const global_options& g, const std::string& survey_id, const std::string& format_name) {
  const auto format = parse_format(format_name);
  if (!format) throw std::invalid_argument("format must be csv or json");
  auto store = open_store(g);
  std::cout << serialize_responses(store->load_response_set(survey_id), *format);
  return exit_ok;
}

int cmd_analyze(const global_options& g, const analysis_flags& flags, const std::string& out) {
  auto store = open_store(g);
  const auto report = analyze_survey(*store, flags.survey, flags.options());
  if (out == "json") {
    std::cout << report::to_json_text(report, flags.survey);
  } else if (out == "csv") {
    std::cout << report::to_csv(report);
  } else {
    std::cout << report::to_text(report, flags.survey);
  }
  if (report.empty()) std::cerr << "no responses recorded for survey " << flags.survey << "\n";
  return exit_ok;
}

int cmd_quadrant(const global_options& g, const analysis_flags& flags, const std::string& out) {
  auto store = open_store(g);
  const auto report = analyze_survey(*store, flags.survey, flags.options());
  write_file(out, report::quadrant_svg(report, flags.survey));
  std::cout << "wrote " << out << " (" << report.result.ranked.size() << " systems plotted, "
            << report.result.unrated.size() << " unrated)\n";
  return exit_ok;
}

int cmd_sweep(const global_options& g, const analysis_flags& flags, const std::string& step_text,
              const std::string& out) {
  auto step = decimal::parse(step_text);
  if (!step || *step <= decimal{}) throw std::invalid_argument("--step must be a positive decimal");
  auto store = open_store(g);
  const auto report = analyze_survey(*store, flags.survey, flags.options());
  std::vector<system_summary> summaries;
  for (const auto& c : report.result.ranked) summaries.push_back(c.summary);
  for (const auto& u : report.result.unrated) summaries.push_back(u.summary);
  if (summaries.empty()) {
    std::cout << "no responses recorded for survey " << flags.survey << "\n";
    return exit_ok;
  }
  const auto sweep = sensitivity_sweep(summaries, report.limits, *step);
  if (out == "json") std::cout << report::to_json(sweep, flags.survey).dump(2) << "\n";
  else std::cout << report::to_text(sweep, flags.survey);
  return exit_ok;
}

httplib::Server* running_server = nullptr;

int cmd_serve(const global_options& g, int port, const std::string& host, std::string token) {
  auto store = open_store(g);
  if (token.empty())
    if (const char* env = std::getenv("RATIONALIZER_TOKEN"); env && *env) token = env;
  api handlers(*store, token.empty() ? std::nullopt : std::optional(token));
  httplib::Server server;
  handlers.mount(server);
  running_server = &server;
  std::signal(SIGINT, [](int) { if (running_server) running_server->stop(); });
  std::signal(SIGTERM, [](int) { if (running_server) running_server->stop(); });
  std::cout << "serving " << store->root().string() << " on http://" << host << ":" << port << "\n"
            << std::flush;
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return exit_io;
  }
  return exit_ok;
}

int default_port() {
  if (const char* env = std::getenv("RATIONALIZER_PORT"); env && *env) return std::atoi(env);
  return 8080;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survey-driven software estate rationalization (satisfaction x usage, 4R verdicts)"};
  app.require_subcommand(1);
  global_options g;
  app.add_option("--data-dir", g.data_dir, "Data directory (default: $RATIONALIZER_DATA_DIR)");
  app.add_option("--config", g.config, "Config file with a data_dir key");

  std::string survey_file;
  auto* create = app.add_subcommand("create-survey", "Create a survey from a JSON definition");
  create->add_option("file", survey_file)->required();

  std::string import_file, import_survey, import_format;
  auto* import = app.add_subcommand("import", "Import a CSV or JSON response file");
  import->add_option("file", import_file)->required();
  import->add_option("--survey", import_survey, "Survey id (created if missing)")->required();
  import->add_option("--format", import_format)->check(CLI::IsMember({"csv", "json"}));

  std::string export_survey, export_format = "csv";
  auto* exp = app.add_subcommand("export", "Write a survey's stored responses to stdout");
  exp->add_option("--survey", export_survey)->required();
  exp->add_option("--format", export_format)->check(CLI::IsMember({"csv", "json"}));

  analysis_flags analyze_flags;
  std::string analyze_out = "text";
  auto* analyze_cmd = app.add_subcommand("analyze", "Satisfaction-only and CKU reports");
  analyze_flags.add_to(analyze_cmd);
  analyze_cmd->add_option("--out", analyze_out)->check(CLI::IsMember({"text", "csv", "json"}));

  analysis_flags quadrant_flags;
  std::string quadrant_out;
  auto* quadrant = app.add_subcommand("quadrant", "Write the 4R quadrant chart as SVG");
  quadrant_flags.add_to(quadrant);
  quadrant->add_option("--out", quadrant_out, "Output .svg file")->required();

  analysis_flags sweep_flags;
  std::string sweep_step = "0.1", sweep_out = "text";
  auto* sweep = app.add_subcommand("sweep", "Threshold sensitivity sweep (+/-20%)");
  sweep_flags.add_to(sweep);
  sweep->add_option("--step", sweep_step, "Increment for each threshold");
  sweep->add_option("--out", sweep_out)->check(CLI::IsMember({"text", "json"}));

  int port = default_port();
  std::string host = "0.0.0.0", token;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port (default: $RATIONALIZER_PORT or 8080)");
  serve->add_option("--host", host);
  serve->add_option("--token", token, "Require this bearer token (or $RATIONALIZER_TOKEN)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_validation;
  }

  try {
    if (*create) return cmd_create_survey(g, survey_file);
    if (*import) return cmd_import(g, import_file, import_survey, import_format);
    if (*exp) return cmd_export(g, export_survey, export_format);
    if (*analyze_cmd) return cmd_analyze(g, analyze_flags, analyze_out);
    if (*quadrant) return cmd_quadrant(g, quadrant_flags, quadrant_out);
    if (*sweep) return cmd_sweep(g, sweep_flags, sweep_step, sweep_out);
    if (*serve) return cmd_serve(g, port, host, token);
  } catch (const storage_unavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const io_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const malformed_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  return exit_validation;
}
