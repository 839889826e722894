// Randomized property checks over summarize_system / classify. Each check
// runs `cases` generated cohorts from a fixed seed and returns a description
// of the first counterexample, or nullopt.
#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "rationalizer/analysis.hpp"
#include "rationalizer/kano.hpp"

namespace properties {

using namespace rationalizer;

struct generator {
  std::mt19937_64 rng;
  explicit generator(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  response one(const std::string& system, int index, bool allow_proxy) {
    response r;
    r.respondent_id = "resp-" + std::to_string(index);
    r.system_id = system;
    r.functional = all_functional_answers[uniform(0, 3)];
    r.dysfunctional = all_dysfunctional_answers[uniform(0, 3)];
    if (uniform(0, 4) > 0) r.usage = all_usage_categories[uniform(0, 3)];
    if (allow_proxy && uniform(0, 3) == 0) {
      r.role = respondent_role::manager_proxy;
      r.proxy_weight = uniform(1, 5);
    }
    return r;
  }

  /// 1..max_size responses for one system.
  std::vector<response> cohort(int max_size, bool allow_proxy = true,
                               const std::string& system = "sys") {
    std::vector<response> out;
    const int n = uniform(1, max_size);
    for (int i = 0; i < n; ++i) out.push_back(one(system, i, allow_proxy));
    return out;
  }
};

inline std::string describe(const std::vector<response>& rs) {
  std::ostringstream os;
  for (const auto& r : rs)
    os << '(' << static_cast<int>(r.functional) << ',' << static_cast<int>(r.dysfunctional) << ','
       << (r.usage ? std::to_string(static_cast<int>(*r.usage)) : "-") << ",w" << r.proxy_weight
       << ')';
  return os.str();
}

inline satisfaction_statistic pick_statistic(generator& g) {
  return g.uniform(0, 1) ? satisfaction_statistic::median : satisfaction_statistic::average;
}

inline std::optional<std::string> permutation_invariance(int cases, std::uint64_t seed = 11) {
  generator g(seed);
  for (int c = 0; c < cases; ++c) {
    auto rs = g.cohort(12);
    const auto stat = pick_statistic(g);
    const auto base = summarize_system("sys", rs, stat);
    std::shuffle(rs.begin(), rs.end(), g.rng);
    if (summarize_system("sys", rs, stat) != base)
      return "permutation changed summary for " + describe(rs);
  }
  return std::nullopt;
}

/// Classification is compared for cohorts of at least
/// `limits.min_cohort_for_research` respondents; pass a gate of 1 to compare
/// every cohort.
inline std::optional<std::string> cohort_duplication(int cases, std::uint64_t seed = 12,
                                                     const thresholds& limits = {}) {
  generator g(seed);
  for (int c = 0; c < cases; ++c) {
    const auto rs = g.cohort(8);
    const int k = g.uniform(2, 5);
    const auto stat = pick_statistic(g);
    std::vector<response> copies;
    for (int copy = 0; copy < k; ++copy)
      for (auto r : rs) {
        r.respondent_id += "-copy" + std::to_string(copy);
        copies.push_back(r);
      }
    const auto a = summarize_system("sys", rs, stat);
    const auto b = summarize_system("sys", copies, stat);
    const bool ok = b.total_satisfaction == k * a.total_satisfaction &&
                    b.total_usage == k * a.total_usage &&
                    b.average_satisfaction == a.average_satisfaction &&
                    b.median_satisfaction == a.median_satisfaction &&
                    b.usage_factor == a.usage_factor && b.cku == a.cku;
    if (!ok) return "duplication x" + std::to_string(k) + " broke aggregates for " + describe(rs);
    // Below min_cohort_for_research the original cannot be Research while its
    // copies can; that gate is meant to depend on cohort size.
    if (a.has_usage() && a.respondent_count >= limits.min_cohort_for_research &&
        classify(a, limits) != classify(b, limits))
      return "duplication x" + std::to_string(k) + " changed classification for " + describe(rs);
  }
  return std::nullopt;
}

inline std::optional<std::string> proxy_weight_equivalence(int cases, std::uint64_t seed = 13) {
  generator g(seed);
  for (int c = 0; c < cases; ++c) {
    auto rs = g.cohort(6, false);
    const auto stat = pick_statistic(g);
    const auto idx = static_cast<std::size_t>(g.uniform(0, static_cast<int>(rs.size()) - 1));
    const int k = g.uniform(1, 7);
    auto proxied = rs;
    proxied[idx].role = respondent_role::manager_proxy;
    proxied[idx].proxy_weight = k;
    auto expanded = rs;
    for (int copy = 1; copy < k; ++copy) {
      auto r = rs[idx];
      r.respondent_id += "-staff" + std::to_string(copy);
      expanded.push_back(r);
    }
    if (summarize_system("sys", proxied, stat) != summarize_system("sys", expanded, stat))
      return "proxy weight " + std::to_string(k) + " differs from " + std::to_string(k) +
             " self-reports for " + describe(rs);
  }
  return std::nullopt;
}

inline std::optional<std::string> range_bounds(int cases, std::uint64_t seed = 14) {
  generator g(seed);
  for (int c = 0; c < cases; ++c) {
    const auto rs = g.cohort(16);
    const auto s = summarize_system("sys", rs, pick_statistic(g));
    auto within = [](decimal v, int lo, int hi) { return v >= decimal(lo) && v <= decimal(hi); };
    if (!within(s.average_satisfaction, 1, 9) || !within(s.median_satisfaction, 1, 9))
      return "satisfaction out of [1,9] for " + describe(rs);
    if (s.usage_factor && !within(*s.usage_factor, 1, 4))
      return "usage factor out of [1,4] for " + describe(rs);
    if (s.cku && !within(*s.cku, 1, 36)) return "cku out of [1,36] for " + describe(rs);
  }
  return std::nullopt;
}

inline std::optional<std::string> oracle_equivalence(int cases, std::uint64_t seed = 15) {
  generator g(seed);
  for (int c = 0; c < cases; ++c) {
    const auto rs = g.cohort(8);
    const bool median = g.uniform(0, 1) == 1;
    const auto s = summarize_system(
        "sys", rs, median ? satisfaction_statistic::median : satisfaction_statistic::average);
    const auto e = oracle::recompute(rs, "sys", median);
    auto tenths = [](decimal d) { return d.units() / 1000; };
    const bool ok =
        s.respondent_count == e.respondents && s.usage_respondent_count == e.usage_respondents &&
        s.total_satisfaction == e.total && s.total_usage == e.total_usage &&
        s.average_satisfaction.units() % 1000 == 0 && tenths(s.average_satisfaction) == e.average_tenths &&
        tenths(s.median_satisfaction) == e.median_tenths &&
        s.usage_factor.has_value() == e.usage_factor_tenths.has_value() &&
        (!s.usage_factor || tenths(*s.usage_factor) == *e.usage_factor_tenths) &&
        (!s.cku || tenths(*s.cku) == *e.cku_tenths);
    if (!ok) return "oracle disagrees for " + describe(rs);
  }
  return std::nullopt;
}

}  // namespace properties
