#ifndef RATIONALIZER_REPORT_HPP
#define RATIONALIZER_REPORT_HPP

// Rendering of analysis results: the JSON body shared by the CLI and the
// HTTP service, plain-text tables, CSV, and the quadrant SVG.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rationalizer/analysis.hpp"
#include "rationalizer/ingest.hpp"

namespace rationalizer::report {

using nlohmann::json;

inline json number(decimal d) { return d.to_double(); }

inline json optional_number(const std::optional<decimal>& d) {
  return d ? number(*d) : json();
}

inline json to_json(const thresholds& t) {
  json j = json::object();
  for (auto name : decimal_threshold_names) j[std::string(name)] = number(threshold_value(t, name));
  j["min_cohort_for_research"] = t.min_cohort_for_research;
  j["auto_calibrate"] = t.auto_calibrate;
  return j;
}

inline json summary_fields(const system_summary& s) {
  return json{
      {"system_id", s.system_id},
      {"respondent_count", s.respondent_count},
      {"usage_respondent_count", s.usage_respondent_count},
      {"total_satisfaction", s.total_satisfaction},
      {"average_satisfaction", number(s.average_satisfaction)},
      {"median_satisfaction", number(s.median_satisfaction)},
      {"total_usage", s.total_usage},
      {"usage_factor", optional_number(s.usage_factor)},
      {"cku", optional_number(s.cku)},
  };
}

/// The analysis body. Key order is fixed by nlohmann's sorted objects, so
/// identical reports always serialize to identical bytes.
inline json to_json(const analysis_report& r, std::string_view survey_id) {
  json ranked = json::array();
  for (const auto& c : r.result.ranked) {
    json j = summary_fields(c.summary);
    j["priority"] = c.priority;
    j["category"] = to_string(c.category);
    ranked.push_back(std::move(j));
  }
  json unrated = json::array();
  for (const auto& u : r.result.unrated) {
    json j = summary_fields(u.summary);
    j["category"] = "Unrated";
    j["note"] = u.note;
    unrated.push_back(std::move(j));
  }
  json provisional = json::array();
  for (const auto& p : r.provisional) {
    provisional.push_back(json{
        {"priority", p.priority},
        {"system_id", p.summary.system_id},
        {"conclusion", to_string(p.conclusion)},
        {"respondent_count", p.summary.respondent_count},
        {"total_satisfaction", p.summary.total_satisfaction},
        {"average_satisfaction", number(p.summary.average_satisfaction)},
        {"median_satisfaction", number(p.summary.median_satisfaction)},
    });
  }
  return json{
      {"survey_id", survey_id},
      {"statistic", to_string(r.statistic)},
      {"thresholds", to_json(r.limits)},
      {"response_count", r.response_count},
      {"ranking", std::move(ranked)},
      {"unrated", std::move(unrated)},
      {"satisfaction_only", std::move(provisional)},
      {"no_responses", r.no_responses},
  };
}

inline std::string to_json_text(const analysis_report& r, std::string_view survey_id) {
  return to_json(r, survey_id).dump(2) + "\n";
}

inline json to_json(const sensitivity_report& r, std::string_view survey_id) {
  json systems = json::array();
  for (const auto& s : r.systems) {
    json outcomes = json::array();
    for (auto o : s.outcomes) outcomes.push_back(to_string(o));
    json flips = json::array();
    for (const auto& f : s.flips)
      flips.push_back(json{{"threshold", f.threshold},
                           {"from", number(f.from)},
                           {"to", number(f.to)},
                           {"category", to_string(f.category)}});
    systems.push_back(json{{"system_id", s.system_id},
                           {"baseline", to_string(s.baseline)},
                           {"outcomes", std::move(outcomes)},
                           {"threshold_sensitive", s.threshold_sensitive},
                           {"flips", std::move(flips)}});
  }
  return json{{"survey_id", survey_id},
              {"step", number(r.step)},
              {"range_percent", 20},
              {"systems", std::move(systems)},
              {"unrated", r.unrated}};
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

namespace detail {

// Left-aligned first `left` columns, right-aligned rest.
class table {
 public:
  table(std::vector<std::string> header, std::size_t left)
      : left_(left) {
    rows_.push_back(std::move(header));
  }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& row : rows_)
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::string out;
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) line += "  ";
        const std::string pad(width[i] - row[i].size(), ' ');
        line += i < left_ ? row[i] + pad : pad + row[i];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + '\n';
    }
    return out;
  }

 private:
  std::size_t left_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace detail

/// Satisfaction-only table followed by the CKU table.
inline std::string to_text(const analysis_report& r, std::string_view survey_id) {
  std::ostringstream os;
  os << "Survey " << survey_id << " - " << r.response_count << " responses, statistic "
     << to_string(r.statistic) << "\n";
  if (r.empty()) {
    os << "\nno responses recorded for this survey\n";
    return os.str();
  }

  os << "\nSatisfaction only (provisional)\n";
  detail::table t1({"System", "Respondents", "Total", "Average", "Median", "Priority",
                    "Conclusion"},
                   1);
  for (const auto& p : r.provisional)
    t1.add({p.summary.system_id, std::to_string(p.summary.respondent_count),
            std::to_string(p.summary.total_satisfaction),
            p.summary.average_satisfaction.to_string(1),
            p.summary.median_satisfaction.to_string(1), std::to_string(p.priority),
            upper(to_string(p.conclusion))});
  os << t1.render();

  os << "\nSatisfaction x usage (CKU)\n";
  detail::table t3({"System", "Satisfaction", "Total CoU", "Usage n", "Usage factor", "CKU",
                    "Priority", "Conclusion"},
                   1);
  for (const auto& c : r.result.ranked)
    t3.add({c.summary.system_id, c.summary.satisfaction_score().to_string(1),
            std::to_string(c.summary.total_usage),
            std::to_string(c.summary.usage_respondent_count),
            c.summary.usage_factor->to_string(1), c.summary.cku->to_string(1),
            std::to_string(c.priority), upper(to_string(c.category))});
  for (const auto& u : r.result.unrated)
    t3.add({u.summary.system_id, u.summary.satisfaction_score().to_string(1), "-", "0", "-",
            "-", "-", "UNRATED"});
  os << t3.render();

  for (const auto& u : r.result.unrated)
    os << "\nUNRATED " << u.summary.system_id << ": " << u.note << "\n";
  if (!r.no_responses.empty()) {
    os << "\nDeclared systems with no responses:";
    for (const auto& id : r.no_responses) os << ' ' << id;
    os << '\n';
  }
  os << "\nThresholds:\n" << to_document(r.limits);
  return os.str();
}

namespace detail {
inline std::string csv_cell(const std::optional<decimal>& d) {
  return d ? d->to_string(1) : std::string();
}
}  // namespace detail

inline std::string to_csv(const analysis_report& r) {
  std::string out =
      "priority,system_id,category,respondent_count,usage_respondent_count,"
      "total_satisfaction,average_satisfaction,median_satisfaction,total_usage,"
      "usage_factor,cku,provisional_priority,provisional_conclusion\n";
  auto provisional_of = [&](const std::string& id) -> const provisional_entry* {
    for (const auto& p : r.provisional)
      if (p.summary.system_id == id) return &p;
    return nullptr;
  };
  auto row = [&](std::string priority, const system_summary& s, std::string_view category) {
    const auto* p = provisional_of(s.system_id);
    out += priority + ',' + rationalizer::detail::csv_escape(s.system_id) + ',' +
           std::string(category) + ',' + std::to_string(s.respondent_count) + ',' +
           std::to_string(s.usage_respondent_count) + ',' +
           std::to_string(s.total_satisfaction) + ',' + s.average_satisfaction.to_string(1) +
           ',' + s.median_satisfaction.to_string(1) + ',' + std::to_string(s.total_usage) +
           ',' + detail::csv_cell(s.usage_factor) + ',' + detail::csv_cell(s.cku) + ',' +
           (p ? std::to_string(p->priority) : "") + ',' +
           (p ? std::string(to_string(p->conclusion)) : "") + '\n';
  };
  for (const auto& c : r.result.ranked)
    row(std::to_string(c.priority), c.summary, to_string(c.category));
  for (const auto& u : r.result.unrated) row("", u.summary, "Unrated");
  return out;
}

inline std::string to_text(const sensitivity_report& r, std::string_view survey_id) {
  std::ostringstream os;
  os << "Sensitivity sweep for survey " << survey_id << ": each 4R threshold varied +/-20% in steps of "
     << r.step << "\n\n";
  detail::table t({"System", "Baseline", "Outcomes", "Sensitive"}, 4);
  for (const auto& s : r.systems) {
    std::string outcomes;
    for (auto o : s.outcomes) {
      if (!outcomes.empty()) outcomes += '/';
      outcomes += to_string(o);
    }
    t.add({s.system_id, std::string(to_string(s.baseline)), outcomes,
           s.threshold_sensitive ? "threshold-sensitive" : "stable"});
  }
  os << t.render();
  for (const auto& s : r.systems)
    for (const auto& f : s.flips)
      os << "  " << s.system_id << ": " << f.threshold << " in [" << f.from << ", " << f.to
         << "] -> " << to_string(f.category) << "\n";
  for (const auto& id : r.unrated) os << "UNRATED " << id << " (no usage answers)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Quadrant SVG

struct quadrant_style {
  int width = 720;
  int height = 540;
  int margin = 60;
  /// Point radius per (weighted) respondent.
  double radius_per_respondent = 2.5;
};

constexpr std::string_view color_of(four_r r) {
  switch (r) {
    case four_r::retain: return "#2e7d32";
    case four_r::review: return "#f9a825";
    case four_r::remove: return "#c62828";
    case four_r::research: return "#1565c0";
  }
  return "#000000";
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Scatter of usage factor (x, 1..4) against satisfaction (y, 1..9). Point
/// radius is proportional to respondent count and colour follows the 4R
/// verdict. The research gate is drawn as straight lines and the CKU bands
/// as iso-CKU curves (satisfaction = cku / usage factor). Unrated systems are
/// not plotted.
inline std::string quadrant_svg(const analysis_report& r, std::string_view survey_id,
                                const quadrant_style& style = {}) {
  const double plot_w = style.width - 2.0 * style.margin;
  const double plot_h = style.height - 2.0 * style.margin;
  auto px = [&](double uf) { return style.margin + (uf - 1.0) / 3.0 * plot_w; };
  auto py = [&](double sat) { return style.margin + (9.0 - sat) / 8.0 * plot_h; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  const auto& t = r.limits;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
     << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<title>4R quadrant - " << xml_escape(survey_id) << "</title>\n"
     << "<rect class=\"plot-area\" x=\"" << style.margin << "\" y=\"" << style.margin
     << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
     << "\" fill=\"#fafafa\" stroke=\"#333333\"/>\n";

  // axes ticks
  os << "<g class=\"axes\">\n";
  for (int uf = 1; uf <= 4; ++uf)
    os << "<text x=\"" << fmt(px(uf)) << "\" y=\"" << fmt(py(1) + 18)
       << "\" text-anchor=\"middle\">" << uf << "</text>\n";
  for (int sat = 1; sat <= 9; ++sat)
    os << "<text x=\"" << fmt(px(1) - 8) << "\" y=\"" << fmt(py(sat) + 4)
       << "\" text-anchor=\"end\">" << sat << "</text>\n";
  os << "<text x=\"" << fmt(style.margin + plot_w / 2) << "\" y=\"" << style.height - 15
     << "\" text-anchor=\"middle\">Usage factor</text>\n"
     << "<text x=\"15\" y=\"" << fmt(style.margin + plot_h / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << fmt(style.margin + plot_h / 2)
     << ")\">" << (r.statistic == satisfaction_statistic::median ? "Median" : "Average")
     << " satisfaction</text>\n</g>\n";

  // threshold lines
  const double rs = t.research_satisfaction_min.to_double();
  const double ru = t.research_usage_max.to_double();
  os << "<g class=\"thresholds\" stroke=\"#555555\" stroke-dasharray=\"6 4\" fill=\"none\">\n"
     << "<line class=\"threshold\" data-threshold=\"research_usage_max\" x1=\"" << fmt(px(ru))
     << "\" y1=\"" << fmt(py(9)) << "\" x2=\"" << fmt(px(ru)) << "\" y2=\"" << fmt(py(1))
     << "\"/>\n"
     << "<line class=\"threshold\" data-threshold=\"research_satisfaction_min\" x1=\""
     << fmt(px(1)) << "\" y1=\"" << fmt(py(rs)) << "\" x2=\"" << fmt(px(4)) << "\" y2=\""
     << fmt(py(rs)) << "\"/>\n";
  for (auto [name, value] : {std::pair{"cku_retain_min", t.cku_retain_min.to_double()},
                             std::pair{"cku_remove_max", t.cku_remove_max.to_double()}}) {
    os << "<polyline class=\"threshold\" data-threshold=\"" << name << "\" points=\"";
    bool first = true;
    for (int i = 0; i <= 60; ++i) {
      const double uf = 1.0 + 3.0 * i / 60.0;
      const double sat = value / uf;
      if (sat < 1.0 || sat > 9.0) continue;
      os << (first ? "" : " ") << fmt(px(uf)) << ',' << fmt(py(sat));
      first = false;
    }
    os << "\"/>\n";
  }
  os << "</g>\n";

  // region labels: one per R
  const double mid_cku = (t.cku_retain_min.to_double() + t.cku_remove_max.to_double()) / 2;
  const double review_uf = 3.0;
  struct label {
    four_r r;
    double uf, sat;
  };
  const label labels[] = {
      {four_r::retain, 3.6, 8.6},
      {four_r::review, review_uf, std::clamp(mid_cku / review_uf, 1.5, 8.5)},
      {four_r::remove, 1.9, 1.4},
      {four_r::research, 1.0 + (ru - 1.0) / 2, std::min(8.6, (rs + 9.0) / 2)},
  };
  os << "<g class=\"regions\" font-weight=\"bold\" font-size=\"16\" fill-opacity=\"0.55\">\n";
  for (const auto& l : labels)
    os << "<text class=\"region-label\" data-region=\"" << to_string(l.r) << "\" x=\""
       << fmt(px(l.uf)) << "\" y=\"" << fmt(py(l.sat)) << "\" text-anchor=\"middle\" fill=\""
       << color_of(l.r) << "\">" << upper(to_string(l.r)) << "</text>\n";
  os << "</g>\n";

  os << "<g class=\"points\">\n";
  for (const auto& c : r.result.ranked) {
    const double x = px(c.summary.usage_factor->to_double());
    const double y = py(c.summary.satisfaction_score().to_double());
    const double radius = style.radius_per_respondent * static_cast<double>(c.summary.respondent_count);
    os << "<circle class=\"point\" data-system=\"" << xml_escape(c.summary.system_id)
       << "\" data-category=\"" << to_string(c.category) << "\" cx=\"" << fmt(x) << "\" cy=\""
       << fmt(y) << "\" r=\"" << fmt(radius) << "\" fill=\"" << color_of(c.category)
       << "\" fill-opacity=\"0.7\" stroke=\"#222222\"><title>" << xml_escape(c.summary.system_id)
       << ": CKU " << c.summary.cku->to_string(1) << "</title></circle>\n"
       << "<text class=\"point-label\" x=\"" << fmt(x + radius + 3) << "\" y=\"" << fmt(y + 4)
       << "\">" << xml_escape(c.summary.system_id) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace rationalizer::report

#endif  // RATIONALIZER_REPORT_HPP
