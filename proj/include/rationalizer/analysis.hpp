#ifndef RATIONALIZER_ANALYSIS_HPP
#define RATIONALIZER_ANALYSIS_HPP

// 4R classification, priority ranking, the satisfaction-only provisional
// report and threshold sensitivity sweeps. Scoring lives in kano.hpp; nothing
// here ever changes a system_summary.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rationalizer/decimal.hpp"
#include "rationalizer/kano.hpp"

namespace rationalizer {

enum class four_r : std::uint8_t { retain, review, remove, research };

constexpr std::string_view to_string(four_r r) {
  switch (r) {
    case four_r::retain: return "Retain";
    case four_r::review: return "Review";
    case four_r::remove: return "Remove";
    case four_r::research: return "Research";
  }
  return "?";
}

inline std::optional<four_r> parse_four_r(std::string_view s) {
  if (s == "Retain") return four_r::retain;
  if (s == "Review") return four_r::review;
  if (s == "Remove") return four_r::remove;
  if (s == "Research") return four_r::research;
  return std::nullopt;
}

/// Boundaries partitioning (satisfaction, usage factor, CKU) space into the
/// 4Rs, plus the average-only bands of the provisional report. Retain and
/// Remove bands include their boundary values.
struct thresholds {
  decimal research_satisfaction_min = decimal::from_units(75000);
  decimal research_usage_max = decimal::from_units(15000);
  decimal cku_retain_min = decimal(24);
  decimal cku_remove_max = decimal(9);
  decimal satisfaction_retain_min = decimal::from_units(75000);
  decimal satisfaction_remove_max = decimal(3);
  int min_cohort_for_research = 2;
  /// Replace the CKU bands with the 33rd/67th percentiles of the cohort.
  bool auto_calibrate = false;

  friend bool operator==(const thresholds&, const thresholds&) = default;
};

/// Names of the decimal-valued fields, in declaration order.
inline constexpr std::array<std::string_view, 6> decimal_threshold_names{
    "research_satisfaction_min", "research_usage_max",      "cku_retain_min",
    "cku_remove_max",            "satisfaction_retain_min", "satisfaction_remove_max"};

inline decimal* threshold_field(thresholds& t, std::string_view name) {
  if (name == "research_satisfaction_min") return &t.research_satisfaction_min;
  if (name == "research_usage_max") return &t.research_usage_max;
  if (name == "cku_retain_min") return &t.cku_retain_min;
  if (name == "cku_remove_max") return &t.cku_remove_max;
  if (name == "satisfaction_retain_min") return &t.satisfaction_retain_min;
  if (name == "satisfaction_remove_max") return &t.satisfaction_remove_max;
  return nullptr;
}

inline decimal threshold_value(const thresholds& t, std::string_view name) {
  auto copy = t;
  if (auto* f = threshold_field(copy, name)) return *f;
  throw std::invalid_argument("unknown threshold '" + std::string(name) + "'");
}

class invalid_thresholds : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// First violated constraint, or empty when the thresholds are usable.
inline std::string thresholds_violation(const thresholds& t) {
  auto open = [](decimal v, int lo, int hi) { return v > decimal(lo) && v < decimal(hi); };
  if (!open(t.research_satisfaction_min, 1, 9))
    return "research_satisfaction_min must lie in (1.0, 9.0)";
  if (!open(t.research_usage_max, 1, 4)) return "research_usage_max must lie in (1.0, 4.0)";
  if (!open(t.cku_retain_min, 1, 36)) return "cku_retain_min must lie in (1.0, 36.0)";
  if (!open(t.cku_remove_max, 1, 36)) return "cku_remove_max must lie in (1.0, 36.0)";
  if (!open(t.satisfaction_retain_min, 1, 9))
    return "satisfaction_retain_min must lie in (1.0, 9.0)";
  if (!open(t.satisfaction_remove_max, 1, 9))
    return "satisfaction_remove_max must lie in (1.0, 9.0)";
  if (!(t.cku_remove_max < t.cku_retain_min))
    return "cku_remove_max must be below cku_retain_min";
  if (!(t.satisfaction_remove_max < t.satisfaction_retain_min))
    return "satisfaction_remove_max must be below satisfaction_retain_min";
  if (t.min_cohort_for_research < 1) return "min_cohort_for_research must be positive";
  return {};
}

inline void validate(const thresholds& t) {
  if (auto why = thresholds_violation(t); !why.empty()) throw invalid_thresholds(why);
}

/// Applies one `key = value` setting. Throws invalid_thresholds on an unknown
/// key or an unparsable value; range checks are left to validate().
inline void apply_threshold_setting(thresholds& t, std::string_view key,
                                    std::string_view value) {
  if (auto* field = threshold_field(t, key)) {
    auto d = decimal::parse(value);
    if (!d) throw invalid_thresholds("bad value for " + std::string(key) + ": '" +
                                     std::string(value) + "'");
    *field = *d;
  } else if (key == "min_cohort_for_research") {
    auto d = decimal::parse(value);
    if (!d || d->units() % decimal::scale != 0)
      throw invalid_thresholds("min_cohort_for_research must be an integer");
    t.min_cohort_for_research = static_cast<int>(d->units() / decimal::scale);
  } else if (key == "auto_calibrate") {
    if (value == "true" || value == "1") t.auto_calibrate = true;
    else if (value == "false" || value == "0") t.auto_calibrate = false;
    else throw invalid_thresholds("auto_calibrate must be true or false");
  } else {
    throw invalid_thresholds("unknown threshold '" + std::string(key) + "'");
  }
}

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}
}  // namespace detail

/// Flat key/value document: one `key = value` (or `key: value`) per line,
/// `#` starts a comment. Unset keys keep `base` values. The result is
/// validated.
inline thresholds parse_thresholds_document(std::string_view text,
                                            thresholds base = {}) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto sep = line.find_first_of("=:");
    if (sep == std::string_view::npos)
      throw invalid_thresholds("line " + std::to_string(line_no) +
                               ": expected key = value");
    apply_threshold_setting(base, detail::trim(line.substr(0, sep)),
                            detail::trim(line.substr(sep + 1)));
  }
  validate(base);
  return base;
}

/// Query-string form: `cku_retain_min:19.0,cku_remove_max:8`.
inline thresholds parse_thresholds_query(std::string_view text, thresholds base = {}) {
  std::string doc(text);
  std::replace(doc.begin(), doc.end(), ',', '\n');
  return parse_thresholds_document(doc, base);
}

inline std::string to_document(const thresholds& t) {
  std::ostringstream os;
  for (auto name : decimal_threshold_names)
    os << name << " = " << threshold_value(t, name).to_short_string() << '\n';
  os << "min_cohort_for_research = " << t.min_cohort_for_research << '\n';
  os << "auto_calibrate = " << (t.auto_calibrate ? "true" : "false") << '\n';
  return os.str();
}

class missing_usage : public std::invalid_argument {
 public:
  explicit missing_usage(const std::string& system_id)
      : std::invalid_argument("system '" + system_id +
                              "' has no usage answers and cannot be classified") {}
};

class empty_input : public std::invalid_argument {
 public:
  empty_input() : std::invalid_argument("no systems to rank") {}
};

/// Research gate first, then the CKU bands. Throws missing_usage for a
/// summary without usage data.
inline four_r classify(const system_summary& s, const thresholds& t) {
  if (!s.has_usage()) throw missing_usage(s.system_id);
  if (s.satisfaction_score() >= t.research_satisfaction_min &&
      *s.usage_factor <= t.research_usage_max &&
      s.respondent_count >= t.min_cohort_for_research)
    return four_r::research;
  if (*s.cku >= t.cku_retain_min) return four_r::retain;
  if (*s.cku <= t.cku_remove_max) return four_r::remove;
  return four_r::review;
}

/// Average-only conclusion used before usage is factored in. Never Research.
inline four_r provisional_conclusion(const system_summary& s, const thresholds& t) {
  const decimal score = s.average_satisfaction;
  if (score >= t.satisfaction_retain_min) return four_r::retain;
  if (score <= t.satisfaction_remove_max) return four_r::remove;
  return four_r::review;
}

struct classified_system {
  system_summary summary;
  four_r category = four_r::review;
  /// 1 = strongest retain candidate.
  int priority = 0;
};

inline constexpr std::string_view unrated_note =
    "no usage answers recorded; survey this system's users before classifying it";

struct unrated_system {
  system_summary summary;
  std::string note{unrated_note};
};

struct ranking {
  std::vector<classified_system> ranked;
  std::vector<unrated_system> unrated;
};

/// Strict weak order on rated summaries: CKU desc, usage factor desc,
/// satisfaction desc, system_id asc.
inline bool ranks_before(const system_summary& a, const system_summary& b) {
  if (*a.cku != *b.cku) return *a.cku > *b.cku;
  if (*a.usage_factor != *b.usage_factor) return *a.usage_factor > *b.usage_factor;
  if (a.satisfaction_score() != b.satisfaction_score())
    return a.satisfaction_score() > b.satisfaction_score();
  if (a.average_satisfaction != b.average_satisfaction)
    return a.average_satisfaction > b.average_satisfaction;
  return a.system_id < b.system_id;
}

namespace detail {
inline void require_unique_ids(std::span<const system_summary> summaries) {
  std::set<std::string_view> seen;
  for (const auto& s : summaries)
    if (!seen.insert(s.system_id).second)
      throw std::invalid_argument("duplicate system_id '" + s.system_id + "'");
}
}  // namespace detail

/// Ranks rated systems and classifies each; systems without usage data are
/// appended unranked to `unrated`, ordered by system_id.
inline ranking rank(std::span<const system_summary> summaries, const thresholds& t) {
  if (summaries.empty()) throw empty_input();
  detail::require_unique_ids(summaries);
  ranking out;
  std::vector<system_summary> rated;
  for (const auto& s : summaries) {
    if (s.has_usage()) rated.push_back(s);
    else out.unrated.push_back({s});
  }
  std::sort(rated.begin(), rated.end(), ranks_before);
  std::sort(out.unrated.begin(), out.unrated.end(), [](const auto& a, const auto& b) {
    return a.summary.system_id < b.summary.system_id;
  });
  int priority = 0;
  for (auto& s : rated) {
    four_r category = classify(s, t);
    out.ranked.push_back({std::move(s), category, ++priority});
  }
  return out;
}

struct provisional_entry {
  system_summary summary;
  four_r conclusion = four_r::review;
  int priority = 0;
};

/// Ranking and Retain/Review/Remove conclusions from average satisfaction
/// alone, whatever statistic the CKU uses. Usage data is not needed.
inline std::vector<provisional_entry> satisfaction_only_report(
    std::span<const system_summary> summaries, const thresholds& t) {
  if (summaries.empty()) throw empty_input();
  detail::require_unique_ids(summaries);
  std::vector<system_summary> sorted(summaries.begin(), summaries.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.average_satisfaction != b.average_satisfaction)
      return a.average_satisfaction > b.average_satisfaction;
    return a.system_id < b.system_id;
  });
  std::vector<provisional_entry> out;
  int priority = 0;
  for (auto& s : sorted) {
    four_r c = provisional_conclusion(s, t);
    out.push_back({std::move(s), c, ++priority});
  }
  return out;
}

/// Thresholds with the CKU bands moved to the 33rd/67th percentiles
/// (linear interpolation between order statistics, rounded to one digit) of
/// the rated systems' CKU scores. Returns `t` unchanged when auto_calibrate is
/// off, fewer than two systems are rated, or the percentiles coincide.
inline thresholds calibrated(const thresholds& t, std::span<const system_summary> summaries) {
  if (!t.auto_calibrate) return t;
  std::vector<decimal> ckus;
  for (const auto& s : summaries)
    if (s.cku) ckus.push_back(*s.cku);
  if (ckus.size() < 2) return t;
  std::sort(ckus.begin(), ckus.end());
  auto percentile = [&](int pct) {
    const std::int64_t h = static_cast<std::int64_t>(ckus.size() - 1) * pct;
    const auto lo = static_cast<std::size_t>(h / 100);
    const std::int64_t frac = h % 100;
    if (frac == 0) return ckus[lo].rounded(1);
    const std::int64_t span = ckus[lo + 1].units() - ckus[lo].units();
    // value = lo + frac/100 * span, in units, rounded to one digit
    const std::int64_t numerator = ckus[lo].units() * 100 + frac * span;
    return decimal::from_ratio(numerator, 100 * decimal::scale, 1);
  };
  thresholds out = t;
  out.cku_remove_max = percentile(33);
  out.cku_retain_min = percentile(67);
  if (!(out.cku_remove_max < out.cku_retain_min)) return t;
  return out;
}

/// A contiguous run of swept values of one threshold that yields a category
/// different from the baseline.
struct threshold_flip {
  std::string threshold;
  decimal from;
  decimal to;
  four_r category = four_r::review;
};

struct system_sensitivity {
  std::string system_id;
  four_r baseline = four_r::review;
  std::vector<four_r> outcomes;  // distinct, in enum order
  bool threshold_sensitive = false;
  std::vector<threshold_flip> flips;
};

struct sensitivity_report {
  decimal step;
  std::vector<system_sensitivity> systems;  // rank order
  std::vector<std::string> unrated;
};

/// Swept thresholds: the four that drive the 4R verdict.
inline constexpr std::array<std::string_view, 4> swept_threshold_names{
    "research_satisfaction_min", "research_usage_max", "cku_retain_min",
    "cku_remove_max"};

/// Values visited for one threshold: base*0.8, then every `step` up to but
/// excluding base*1.2, then base*1.2 itself.
inline std::vector<decimal> sweep_values(decimal base, decimal step) {
  if (step <= decimal{}) throw std::invalid_argument("sweep step must be positive");
  const decimal lo = base.scaled(8, 10);
  const decimal hi = base.scaled(12, 10);
  std::vector<decimal> values;
  for (decimal v = lo; v < hi; v += step) values.push_back(v);
  values.push_back(hi);
  return values;
}

/// Re-classifies every rated system while each swept threshold varies by
/// +/-20% in increments of `step`, one threshold at a time. Variations that
/// break the remove < retain ordering are skipped.
inline sensitivity_report sensitivity_sweep(std::span<const system_summary> summaries,
                                            const thresholds& t, decimal step) {
  if (step <= decimal{}) throw std::invalid_argument("sweep step must be positive");
  const ranking base = rank(summaries, t);
  sensitivity_report report;
  report.step = step;
  for (const auto& u : base.unrated) report.unrated.push_back(u.summary.system_id);

  for (const auto& entry : base.ranked) {
    system_sensitivity sys;
    sys.system_id = entry.summary.system_id;
    sys.baseline = entry.category;
    std::set<four_r> outcomes{entry.category};
    for (auto name : swept_threshold_names) {
      std::optional<threshold_flip> open;
      for (decimal v : sweep_values(threshold_value(t, name), step)) {
        thresholds varied = t;
        *threshold_field(varied, name) = v;
        if (!(varied.cku_remove_max < varied.cku_retain_min)) continue;
        const four_r c = classify(entry.summary, varied);
        outcomes.insert(c);
        if (open && open->category == c) {
          open->to = v;
          continue;
        }
        if (open) sys.flips.push_back(*open);
        open.reset();
        if (c != entry.category) open = threshold_flip{std::string(name), v, v, c};
      }
      if (open) sys.flips.push_back(*open);
    }
    sys.outcomes.assign(outcomes.begin(), outcomes.end());
    sys.threshold_sensitive = sys.outcomes.size() > 1;
    report.systems.push_back(std::move(sys));
  }
  return report;
}

struct analysis_options {
  thresholds limits;
  satisfaction_statistic statistic = satisfaction_statistic::average;
};

/// Everything a report renders: effective thresholds, the CKU ranking with
/// 4R verdicts, the satisfaction-only provisional report, and declared systems
/// that received no responses at all.
struct analysis_report {
  satisfaction_statistic statistic = satisfaction_statistic::average;
  thresholds limits;
  std::size_t response_count = 0;
  ranking result;
  std::vector<provisional_entry> provisional;
  std::vector<std::string> no_responses;

  bool empty() const { return result.ranked.empty() && result.unrated.empty(); }
};

/// Scores and classifies a whole response set. An empty response set yields
/// an empty report rather than an error.
inline analysis_report analyze(std::span<const response> responses,
                               const analysis_options& options,
                               std::span<const std::string> declared_systems = {}) {
  validate(options.limits);
  analysis_report report;
  report.statistic = options.statistic;
  report.response_count = responses.size();
  const auto summaries = summarize_all(responses, options.statistic);
  report.limits = calibrated(options.limits, summaries);
  if (!summaries.empty()) {
    report.result = rank(summaries, report.limits);
    report.provisional = satisfaction_only_report(summaries, report.limits);
  }
  std::set<std::string_view> seen;
  for (const auto& s : summaries) seen.insert(s.system_id);
  std::set<std::string> missing;
  for (const auto& id : declared_systems)
    if (!seen.contains(id)) missing.insert(id);
  report.no_responses.assign(missing.begin(), missing.end());
  return report;
}

}  // namespace rationalizer

#endif  // RATIONALIZER_ANALYSIS_HPP
