// Brute-force recomputation of system summaries from first principles.
//
// Shares nothing with the implementation except the answer enums: the grid is
// a table of letters, points come from a letter lookup, the multiset is
// expanded copy by copy, and rounding is found by enumerating candidates.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rationalizer/kano.hpp"

namespace oracle {

inline char grid_letter(rationalizer::functional_answer f, rationalizer::dysfunctional_answer d) {
  // rows: like, expect, neither, dislike; columns: prefer-not, cannot-work,
  // can-manage, dont-need
  static const char* rows[4] = {"PMAI", "MMPI", "PMAI", "IIII"};
  return rows[static_cast<int>(f)][static_cast<int>(d)];
}

inline int letter_points(char c) {
  switch (c) {
    case 'M': return 9;
    case 'P': return 6;
    case 'A': return 3;
    default: return 1;
  }
}

inline int usage_value(rationalizer::usage_category u) {
  static const int table[4] = {4, 3, 2, 1};  // lot, somewhat, occasionally, not much
  return table[static_cast<int>(u)];
}

/// Integer nearest to num/den (num, den > 0), ties going up, found by walking
/// q upward.
inline std::int64_t nearest(std::int64_t num, std::int64_t den) {
  std::int64_t q = 0;
  while ((q + 1) * den <= num) ++q;
  // q = floor(num/den); distance comparison in doubled units avoids halves
  const std::int64_t below = 2 * (num - q * den);
  const std::int64_t above = 2 * ((q + 1) * den - num);
  return above <= below ? q + 1 : q;
}

struct expected_summary {
  std::int64_t respondents = 0;
  std::int64_t usage_respondents = 0;
  std::int64_t total = 0;
  std::int64_t total_usage = 0;
  std::int64_t average_tenths = 0;
  std::int64_t median_tenths = 0;
  std::optional<std::int64_t> usage_factor_tenths;
  std::optional<std::int64_t> cku_tenths;
};

inline expected_summary recompute(const std::vector<rationalizer::response>& responses,
                                  const std::string& system_id, bool use_median = false) {
  expected_summary e;
  std::vector<int> expanded;
  std::vector<int> usage_expanded;
  for (const auto& r : responses) {
    if (r.system_id != system_id) continue;
    for (int copy = 0; copy < r.proxy_weight; ++copy) {
      expanded.push_back(letter_points(grid_letter(r.functional, r.dysfunctional)));
      if (r.usage) usage_expanded.push_back(usage_value(*r.usage));
    }
  }
  e.respondents = static_cast<std::int64_t>(expanded.size());
  e.usage_respondents = static_cast<std::int64_t>(usage_expanded.size());
  for (int p : expanded) e.total += p;
  for (int p : usage_expanded) e.total_usage += p;
  if (expanded.empty()) return e;
  e.average_tenths = nearest(10 * e.total, e.respondents);
  std::sort(expanded.begin(), expanded.end());
  const std::size_t n = expanded.size();
  e.median_tenths = n % 2 ? 10 * expanded[n / 2] : 5 * (expanded[n / 2 - 1] + expanded[n / 2]);
  if (!usage_expanded.empty()) {
    e.usage_factor_tenths = nearest(10 * e.total_usage, e.usage_respondents);
    const std::int64_t sat = use_median ? e.median_tenths : e.average_tenths;
    // tenths x tenths = hundredths; back to tenths
    e.cku_tenths = nearest(sat * *e.usage_factor_tenths, 10);
  }
  return e;
}

}  // namespace oracle
