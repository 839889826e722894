// The six-app worked example: answer multisets per app, built into responses
// with one representative answer pair per category.
#pragma once

#include <string>
#include <vector>

#include "rationalizer/kano.hpp"

#ifndef RATIONALIZER_DATA_DIR
#error "RATIONALIZER_DATA_DIR must point at the repository data/ directory"
#endif

namespace fixture {

using namespace rationalizer;

inline std::string data_path(const std::string& name) {
  return std::string(RATIONALIZER_DATA_DIR) + "/" + name;
}

inline std::pair<functional_answer, dysfunctional_answer> pair_for(char cos) {
  switch (cos) {
    case 'M': return {functional_answer::like_it, dysfunctional_answer::could_not_work_effectively};
    case 'P': return {functional_answer::like_it, dysfunctional_answer::prefer_not_to_be_without};
    case 'A': return {functional_answer::like_it, dysfunctional_answer::can_manage_without};
    default: return {functional_answer::neither_like_nor_dislike, dysfunctional_answer::do_not_need_it};
  }
}

inline usage_category usage_for(char u) {
  switch (u) {
    case 'L': return usage_category::lot;
    case 'S': return usage_category::somewhat;
    case 'O': return usage_category::occasionally;
    default: return usage_category::not_much;
  }
}

/// `categories` and `usages` are letter strings of equal length, e.g.
/// "MMMMP" / "LLLSS".
inline std::vector<response> app(const std::string& system_id, const std::string& categories,
                                 const std::string& usages) {
  std::vector<response> out;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto [f, d] = pair_for(categories[i]);
    response r;
    r.respondent_id = "r" + std::to_string(i + 1);
    r.system_id = system_id;
    r.functional = f;
    r.dysfunctional = d;
    if (i < usages.size() && usages[i] != '-') r.usage = usage_for(usages[i]);
    out.push_back(r);
  }
  return out;
}

inline std::vector<response> worked_example() {
  std::vector<response> all;
  for (auto part : {app("camera", "MMMMP", "LLLSS"), app("social_media", "III", "ONN"),
                    app("map", "MMPAA", "LSSSS"), app("taxi", "AAA", "OOO"),
                    app("teleconference", "MAAI", "SONN"), app("browser", "MMMMM", "LLLLL")})
    all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace fixture
