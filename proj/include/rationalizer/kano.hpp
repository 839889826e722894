#ifndef RATIONALIZER_KANO_HPP
#define RATIONALIZER_KANO_HPP

// Answer-pair categorization, point scoring and per-system aggregation.
// Everything in this header is a pure function over values.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rationalizer/decimal.hpp"

namespace rationalizer {

/// "How do you feel about System/Tool 'X' now?"
enum class functional_answer : std::uint8_t {
  like_it,
  expect_it,
  neither_like_nor_dislike,
  dislike_it,
};

/// "How would you feel if you did NOT have System/Tool 'X'?"
enum class dysfunctional_answer : std::uint8_t {
  prefer_not_to_be_without,
  could_not_work_effectively,
  can_manage_without,
  do_not_need_it,
};

enum class category_of_satisfaction : std::uint8_t {
  must_be,
  performance,
  attractive,
  indifferent,
};

/// "How often do you use System/Tool 'X'?"
enum class usage_category : std::uint8_t {
  lot,           // every day or several times a week
  somewhat,      // once a week to once a month
  occasionally,  // 2-4 times a year
  not_much,      // once a year or less
};

enum class respondent_role : std::uint8_t { self_report, manager_proxy };

/// Which satisfaction statistic feeds the CKU score and the 4R gates.
enum class satisfaction_statistic : std::uint8_t { average, median };

inline constexpr std::array all_functional_answers{
    functional_answer::like_it, functional_answer::expect_it,
    functional_answer::neither_like_nor_dislike, functional_answer::dislike_it};

inline constexpr std::array all_dysfunctional_answers{
    dysfunctional_answer::prefer_not_to_be_without,
    dysfunctional_answer::could_not_work_effectively,
    dysfunctional_answer::can_manage_without,
    dysfunctional_answer::do_not_need_it};

inline constexpr std::array all_usage_categories{
    usage_category::lot, usage_category::somewhat, usage_category::occasionally,
    usage_category::not_much};

/// Kano grid: rows are functional answers, columns dysfunctional answers.
/// The whole "dislike it" row is Indifferent; there is no Questionable or
/// Reverse category.
constexpr category_of_satisfaction categorize(functional_answer functional,
                                              dysfunctional_answer dysfunctional) {
  using enum category_of_satisfaction;
  constexpr category_of_satisfaction grid[4][4] = {
      {performance, must_be, attractive, indifferent},  // like it
      {must_be, must_be, performance, indifferent},     // expect it
      {performance, must_be, attractive, indifferent},  // neither
      {indifferent, indifferent, indifferent, indifferent},  // dislike it
  };
  return grid[static_cast<int>(functional)][static_cast<int>(dysfunctional)];
}

constexpr int satisfaction_points(category_of_satisfaction cos) {
  switch (cos) {
    case category_of_satisfaction::must_be: return 9;
    case category_of_satisfaction::performance: return 6;
    case category_of_satisfaction::attractive: return 3;
    case category_of_satisfaction::indifferent: return 1;
  }
  return 0;
}

constexpr int usage_points(usage_category cou) {
  switch (cou) {
    case usage_category::lot: return 4;
    case usage_category::somewhat: return 3;
    case usage_category::occasionally: return 2;
    case usage_category::not_much: return 1;
  }
  return 0;
}

constexpr std::string_view to_string(category_of_satisfaction cos) {
  switch (cos) {
    case category_of_satisfaction::must_be: return "MustBe";
    case category_of_satisfaction::performance: return "Performance";
    case category_of_satisfaction::attractive: return "Attractive";
    case category_of_satisfaction::indifferent: return "Indifferent";
  }
  return "?";
}

constexpr std::string_view to_string(satisfaction_statistic s) {
  return s == satisfaction_statistic::median ? "median" : "average";
}

inline std::optional<satisfaction_statistic> parse_statistic(std::string_view s) {
  if (s == "average") return satisfaction_statistic::average;
  if (s == "median") return satisfaction_statistic::median;
  return std::nullopt;
}

/// One respondent's answers about one system.
struct response {
  std::string respondent_id;
  std::string system_id;
  functional_answer functional = functional_answer::neither_like_nor_dislike;
  dysfunctional_answer dysfunctional = dysfunctional_answer::do_not_need_it;
  std::optional<usage_category> usage;
  /// Headcount a manager answers for; always 1 for self-reports.
  int proxy_weight = 1;
  respondent_role role = respondent_role::self_report;

  category_of_satisfaction category() const {
    return categorize(functional, dysfunctional);
  }

  friend bool operator==(const response&, const response&) = default;
};

/// Why a response violates the type invariants, or empty when it is valid.
inline std::string response_invariant_violation(const response& r) {
  if (r.respondent_id.empty()) return "respondent_id is empty";
  if (r.system_id.empty()) return "system_id is empty";
  if (r.proxy_weight < 1) return "proxy_weight must be at least 1";
  if (r.role == respondent_role::self_report && r.proxy_weight != 1)
    return "self-report responses carry weight 1";
  return {};
}

struct system_summary {
  std::string system_id;
  /// Weighted count of satisfaction answers.
  std::int64_t respondent_count = 0;
  /// Weighted count of usage answers; may be lower than respondent_count.
  std::int64_t usage_respondent_count = 0;
  std::int64_t total_satisfaction = 0;
  decimal average_satisfaction;
  decimal median_satisfaction;
  std::int64_t total_usage = 0;
  std::optional<decimal> usage_factor;
  std::optional<decimal> cku;
  satisfaction_statistic statistic = satisfaction_statistic::average;

  bool has_usage() const { return usage_factor.has_value(); }

  /// The statistic selected for CKU and classification.
  decimal satisfaction_score() const {
    return statistic == satisfaction_statistic::median ? median_satisfaction
                                                       : average_satisfaction;
  }

  friend bool operator==(const system_summary&, const system_summary&) = default;
};

class empty_response_set : public std::invalid_argument {
 public:
  explicit empty_response_set(const std::string& system_id)
      : std::invalid_argument("no satisfaction responses for system '" +
                              system_id + "'") {}
};

namespace detail {

struct weighted_points {
  int points;
  std::int64_t weight;
};

// Median of the multiset in which each value appears `weight` times; the mean
// of the two middle values for even cardinality.
inline decimal weighted_median(std::vector<weighted_points> values) {
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.points < b.points; });
  std::int64_t total = 0;
  for (const auto& v : values) total += v.weight;
  const std::int64_t lo_pos = (total - 1) / 2;
  const std::int64_t hi_pos = total / 2;
  std::optional<int> lo, hi;
  std::int64_t seen = 0;
  for (const auto& v : values) {
    const std::int64_t end = seen + v.weight;
    if (!lo && lo_pos < end) lo = v.points;
    if (!hi && hi_pos < end) {
      hi = v.points;
      break;
    }
    seen = end;
  }
  return decimal::from_ratio(*lo + *hi, 2, 1);
}

}  // namespace detail

/// Aggregates the responses for `system_id`; responses for other systems are
/// ignored. Throws empty_response_set when there are none. When no response
/// carries a usage answer the summary has no usage factor and no CKU.
inline system_summary summarize_system(
    std::string_view system_id, std::span<const response> responses,
    satisfaction_statistic statistic = satisfaction_statistic::average) {
  system_summary s;
  s.system_id = std::string(system_id);
  s.statistic = statistic;

  std::vector<detail::weighted_points> points;
  for (const auto& r : responses) {
    if (r.system_id != system_id) continue;
    const int p = satisfaction_points(r.category());
    s.respondent_count += r.proxy_weight;
    s.total_satisfaction += std::int64_t{p} * r.proxy_weight;
    points.push_back({p, r.proxy_weight});
    if (r.usage) {
      s.usage_respondent_count += r.proxy_weight;
      s.total_usage += std::int64_t{usage_points(*r.usage)} * r.proxy_weight;
    }
  }
  if (s.respondent_count == 0) throw empty_response_set(s.system_id);

  s.average_satisfaction =
      decimal::from_ratio(s.total_satisfaction, s.respondent_count, 1);
  s.median_satisfaction = detail::weighted_median(std::move(points));
  if (s.usage_respondent_count > 0) {
    s.usage_factor = decimal::from_ratio(s.total_usage, s.usage_respondent_count, 1);
    // Both operands are already rounded; the product is rounded again.
    s.cku = decimal::multiply(s.satisfaction_score(), *s.usage_factor, 1);
  }
  return s;
}

/// Summaries for every distinct system in `responses`, ordered by system_id.
inline std::vector<system_summary> summarize_all(
    std::span<const response> responses,
    satisfaction_statistic statistic = satisfaction_statistic::average) {
  std::vector<std::string> ids;
  for (const auto& r : responses) ids.push_back(r.system_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<system_summary> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(summarize_system(id, responses, statistic));
  return out;
}

}  // namespace rationalizer

#endif  // RATIONALIZER_KANO_HPP
