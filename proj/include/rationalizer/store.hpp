#ifndef RATIONALIZER_STORE_HPP
#define RATIONALIZER_STORE_HPP

// Append-only persistence under a data directory:
//
//   <data_dir>/surveys/<survey_id>.json      survey definition, written once
//   <data_dir>/responses/<survey_id>.ndjson  one accepted response per line
//   <data_dir>/<log>.ndjson                  generic event logs (analysis runs)
//
// Appends are serialized per file by an in-process mutex plus flock(2), so
// several processes may share one directory. Readers ignore a trailing line
// that has no newline yet and therefore always see a consistent prefix.

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rationalizer/ingest.hpp"

namespace rationalizer {

class storage_unavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class unknown_survey : public std::invalid_argument {
 public:
  explicit unknown_survey(const std::string& id)
      : std::invalid_argument("unknown survey '" + id + "'") {}
};

class survey_exists : public std::invalid_argument {
 public:
  explicit survey_exists(const std::string& id)
      : std::invalid_argument("survey '" + id + "' already exists") {}
};

class duplicate_response : public std::invalid_argument {
 public:
  explicit duplicate_response(std::vector<std::size_t> indexes, const std::string& what)
      : std::invalid_argument(what), indexes_(std::move(indexes)) {}
  /// Positions (0-based) in the submitted batch that collided.
  const std::vector<std::size_t>& indexes() const { return indexes_; }

 private:
  std::vector<std::size_t> indexes_;
};

/// "2024-01-31T09:00:00Z"
inline std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Data directory precedence: explicit flag, RATIONALIZER_DATA_DIR, the
/// `data_dir` key of a config file, then "./rationalizer-data".
inline std::filesystem::path resolve_data_dir(std::optional<std::string> flag,
                                              const std::optional<std::filesystem::path>& config_file) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("RATIONALIZER_DATA_DIR"); env && *env) return env;
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw storage_unavailable("cannot read config file " + config_file->string());
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto sep = line.find_first_of("=:");
      if (sep == std::string::npos) continue;
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      const auto key = trim(line.substr(0, sep));
      const auto value = trim(line.substr(sep + 1));
      if (key == "data_dir" && !value.empty()) return value;
    }
  }
  return "rationalizer-data";
}

inline nlohmann::json to_json(const response_record& rec) {
  auto j = to_json(rec.answers);
  j["survey_id"] = rec.survey_id;
  j["submitted_at"] = rec.submitted_at;
  return j;
}

inline response_record record_from_json(const nlohmann::json& j) {
  response_record rec;
  rec.survey_id = j.at("survey_id").get<std::string>();
  rec.submitted_at = j.at("submitted_at").get<std::string>();
  auto& r = rec.answers;
  r.respondent_id = j.at("respondent_id").get<std::string>();
  r.system_id = j.at("system_id").get<std::string>();
  auto fa = parse_functional(j.at("functional").get<std::string>());
  auto da = parse_dysfunctional(j.at("dysfunctional").get<std::string>());
  auto role = parse_role(j.at("role").get<std::string>());
  if (!fa || !da || !role) throw std::invalid_argument("bad answer code in stored record");
  r.functional = *fa;
  r.dysfunctional = *da;
  r.role = *role;
  r.proxy_weight = j.at("weight").get<int>();
  if (const auto& u = j.at("usage"); !u.is_null()) {
    auto usage = parse_usage(u.get<std::string>());
    if (!usage) throw std::invalid_argument("bad usage code in stored record");
    r.usage = *usage;
  }
  return rec;
}

namespace detail {

class file_lock {
 public:
  explicit file_lock(int fd) : fd_(fd) {
    while (::flock(fd_, LOCK_EX) != 0)
      if (errno != EINTR) throw storage_unavailable(std::string("flock: ") + std::strerror(errno));
  }
  ~file_lock() { ::flock(fd_, LOCK_UN); }
  file_lock(const file_lock&) = delete;
  file_lock& operator=(const file_lock&) = delete;

 private:
  int fd_;
};

class unique_fd {
 public:
  explicit unique_fd(int fd) : fd_(fd) {}
  ~unique_fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  unique_fd(const unique_fd&) = delete;
  unique_fd& operator=(const unique_fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

inline unique_fd open_append(const std::filesystem::path& path) {
  int fd = ::open(path.c_str(), O_RDWR | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0)
    throw storage_unavailable("cannot open " + path.string() + ": " + std::strerror(errno));
  return unique_fd(fd);
}

inline void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw storage_unavailable(std::string("write: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Complete lines from byte `offset` on; returns the offset after the last
// complete line.
inline std::size_t read_lines_from(int fd, std::size_t offset,
                                   std::vector<std::string>& lines) {
  std::string buf;
  char chunk[8192];
  off_t pos = static_cast<off_t>(offset);
  for (;;) {
    const ssize_t n = ::pread(fd, chunk, sizeof chunk, pos);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw storage_unavailable(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    pos += n;
  }
  std::size_t start = 0;
  for (std::size_t nl; (nl = buf.find('\n', start)) != std::string::npos; start = nl + 1)
    lines.emplace_back(buf, start, nl - start);
  return offset + start;
}

// A writer that died mid-append leaves an unterminated last line. Readers
// already skip it; writers cut it off (under the lock) before appending.
inline void drop_partial_tail(int fd, std::size_t complete_end) {
  struct stat st {};
  if (::fstat(fd, &st) != 0)
    throw storage_unavailable(std::string("fstat: ") + std::strerror(errno));
  if (static_cast<std::size_t>(st.st_size) > complete_end &&
      ::ftruncate(fd, static_cast<off_t>(complete_end)) != 0)
    throw storage_unavailable(std::string("ftruncate: ") + std::strerror(errno));
}

}  // namespace detail

/// The system of record for surveys, responses and run events.
class response_store {
 public:
  explicit response_store(std::filesystem::path data_dir) : root_(std::move(data_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(root_ / "surveys", ec);
    if (!ec) std::filesystem::create_directories(root_ / "responses", ec);
    if (ec)
      throw storage_unavailable("data directory " + root_.string() + " is unusable: " +
                                ec.message());
  }

  response_store(const response_store&) = delete;
  response_store& operator=(const response_store&) = delete;

  const std::filesystem::path& root() const { return root_; }

  /// Fails with survey_exists if the id is taken.
  void create_survey(const survey_definition& s) {
    validate(s);
    const auto path = survey_path(s.survey_id);
    const std::string body = to_json(s).dump(2) + "\n";
    int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) {
      if (errno == EEXIST) throw survey_exists(s.survey_id);
      throw storage_unavailable("cannot create " + path.string() + ": " + std::strerror(errno));
    }
    detail::unique_fd guard(fd);
    detail::write_all(fd, body);
    ::fsync(fd);
  }

  bool has_survey(std::string_view id) const {
    return valid_survey_id(id) && std::filesystem::exists(survey_path(id));
  }

  std::optional<survey_definition> find_survey(std::string_view id) const {
    if (!has_survey(id)) return std::nullopt;
    std::ifstream in(survey_path(id));
    std::stringstream ss;
    ss << in.rdbuf();
    if (!in) throw storage_unavailable("cannot read survey " + std::string(id));
    try {
      return survey_from_json(nlohmann::json::parse(ss.str()));
    } catch (const std::exception& e) {
      throw storage_unavailable("survey file for '" + std::string(id) + "' is corrupt: " +
                                e.what());
    }
  }

  survey_definition get_survey(std::string_view id) const {
    if (auto s = find_survey(id)) return *s;
    throw unknown_survey(std::string(id));
  }

  std::vector<std::string> survey_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : std::filesystem::directory_iterator(root_ / "surveys"))
      if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  /// Appends one record; DuplicateResponse if its (respondent, system) pair
  /// is already stored for the survey.
  void store(response_record rec) { store_batch(std::span<response_record>(&rec, 1)); }

  /// All-or-nothing append: if any record collides (with the log or with an
  /// earlier record of the batch) nothing is written and duplicate_response
  /// lists the colliding positions. Records without a timestamp are stamped.
  void store_batch(std::span<response_record> batch) {
    if (batch.empty()) return;
    const std::string& survey_id = batch.front().survey_id;
    for (const auto& rec : batch)
      if (rec.survey_id != survey_id)
        throw std::invalid_argument("batch spans several surveys");
    if (!has_survey(survey_id)) throw unknown_survey(survey_id);
    for (const auto& rec : batch)
      if (auto why = response_invariant_violation(rec.answers); !why.empty())
        throw std::invalid_argument(why);

    auto& state = log_state(survey_id);
    std::lock_guard lock(state.mutex);
    auto fd = detail::open_append(response_path(survey_id));
    detail::file_lock flock(fd.get());
    refresh_keys(state, fd.get());
    detail::drop_partial_tail(fd.get(), state.offset);

    std::vector<std::size_t> dups;
    std::set<key> pending;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      key k{batch[i].answers.respondent_id, batch[i].answers.system_id};
      if (state.keys.contains(k) || !pending.insert(k).second) dups.push_back(i);
    }
    if (!dups.empty()) {
      const auto& first = batch[dups.front()].answers;
      throw duplicate_response(dups, "duplicate response from '" + first.respondent_id +
                                         "' for system '" + first.system_id + "'");
    }
    std::string payload;
    const std::string now = utc_now();
    for (auto& rec : batch) {
      if (rec.submitted_at.empty()) rec.submitted_at = now;
      payload += to_json(rec).dump() + '\n';
    }
    detail::write_all(fd.get(), payload);
    ::fdatasync(fd.get());
    for (const auto& k : pending) state.keys.insert(k);
  }

  /// Every accepted record in submission order. Throws unknown_survey.
  std::vector<response_record> load_response_set(std::string_view survey_id) const {
    if (!has_survey(survey_id)) throw unknown_survey(std::string(survey_id));
    const auto path = response_path(survey_id);
    std::vector<response_record> out;
    if (!std::filesystem::exists(path)) return out;
    int raw = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (raw < 0) throw storage_unavailable("cannot open " + path.string());
    detail::unique_fd fd(raw);
    std::vector<std::string> lines;
    detail::read_lines_from(fd.get(), 0, lines);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        out.push_back(record_from_json(nlohmann::json::parse(lines[i])));
      } catch (const std::exception& e) {
        throw storage_unavailable(path.string() + " line " + std::to_string(i + 1) +
                                  " is corrupt: " + e.what());
      }
    }
    return out;
  }

  /// Appends one JSON event to `<data_dir>/<log>.ndjson`.
  void append_event(std::string_view log, const nlohmann::json& event) {
    auto& state = log_state(std::string("@") + std::string(log));
    std::lock_guard lock(state.mutex);
    auto fd = detail::open_append(event_path(log));
    detail::file_lock flock(fd.get());
    std::vector<std::string> lines;
    detail::drop_partial_tail(fd.get(), detail::read_lines_from(fd.get(), 0, lines));
    detail::write_all(fd.get(), event.dump() + '\n');
    ::fdatasync(fd.get());
  }

  /// Appends the event produced by `make(existing_events)` while holding the
  /// log's lock, so the event can depend on everything written before it.
  /// `make` returns nullopt to write nothing.
  template <class F>
  std::optional<nlohmann::json> append_event_after(std::string_view log, F&& make) {
    auto& state = log_state(std::string("@") + std::string(log));
    std::lock_guard lock(state.mutex);
    auto fd = detail::open_append(event_path(log));
    detail::file_lock flock(fd.get());
    std::vector<std::string> lines;
    detail::drop_partial_tail(fd.get(), detail::read_lines_from(fd.get(), 0, lines));
    std::vector<nlohmann::json> events;
    for (const auto& l : lines) events.push_back(nlohmann::json::parse(l));
    std::optional<nlohmann::json> event = make(std::as_const(events));
    if (event) {
      detail::write_all(fd.get(), event->dump() + '\n');
      ::fdatasync(fd.get());
    }
    return event;
  }

  std::vector<nlohmann::json> read_events(std::string_view log) const {
    const auto path = event_path(log);
    std::vector<nlohmann::json> out;
    if (!std::filesystem::exists(path)) return out;
    int raw = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (raw < 0) throw storage_unavailable("cannot open " + path.string());
    detail::unique_fd fd(raw);
    std::vector<std::string> lines;
    detail::read_lines_from(fd.get(), 0, lines);
    for (const auto& l : lines) {
      try {
        out.push_back(nlohmann::json::parse(l));
      } catch (const std::exception& e) {
        throw storage_unavailable(path.string() + " is corrupt: " + e.what());
      }
    }
    return out;
  }

 private:
  using key = std::tuple<std::string, std::string>;

  struct log_cache {
    std::mutex mutex;
    std::size_t offset = 0;
    std::set<key> keys;
  };

  std::filesystem::path survey_path(std::string_view id) const {
    return root_ / "surveys" / (std::string(id) + ".json");
  }
  std::filesystem::path response_path(std::string_view id) const {
    return root_ / "responses" / (std::string(id) + ".ndjson");
  }
  std::filesystem::path event_path(std::string_view log) const {
    return root_ / (std::string(log) + ".ndjson");
  }

  log_cache& log_state(const std::string& name) {
    std::lock_guard lock(states_mutex_);
    auto& slot = states_[name];
    if (!slot) slot = std::make_unique<log_cache>();
    return *slot;
  }

  // Picks up lines appended since the last look, including by other processes.
  static void refresh_keys(log_cache& state, int fd) {
    std::vector<std::string> lines;
    state.offset = detail::read_lines_from(fd, state.offset, lines);
    for (const auto& l : lines) {
      auto j = nlohmann::json::parse(l, nullptr, false);
      if (j.is_discarded() || !j.is_object()) continue;
      state.keys.emplace(j.value("respondent_id", ""), j.value("system_id", ""));
    }
  }

  std::filesystem::path root_;
  std::mutex states_mutex_;
  std::map<std::string, std::unique_ptr<log_cache>> states_;
};

}  // namespace rationalizer

#endif  // RATIONALIZER_STORE_HPP
