#include <algorithm>
#include <cmath>
#include <sstream>

#include "emodec/io_util.hpp"
#include "emodec/regression.hpp"

namespace emodec {

namespace {

std::vector<ImportanceEntry> ranked(const EmotionModel& model, const OlsFit& fit) {
  std::vector<ImportanceEntry> out;
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) out.push_back({model.feature_names[j], fit.t_values[j]});
  std::stable_sort(out.begin(), out.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) { return std::abs(a.t_value) > std::abs(b.t_value); });
  return out;
}

void bar_panel(std::ostringstream& svg, const std::vector<ImportanceEntry>& entries, const std::string& title,
               double y0, double scale) {
  constexpr double kLabelWidth = 170.0;
  constexpr double kHalfWidth = 220.0;
  constexpr double kRow = 22.0;
  const double axis_x = kLabelWidth + kHalfWidth;
  svg << "  <text x=\"" << axis_x << "\" y=\"" << y0 << "\" text-anchor=\"middle\" font-weight=\"bold\">" << title
      << "</text>\n";
  const double top = y0 + 12.0;
  svg << "  <line x1=\"" << axis_x << "\" y1=\"" << top << "\" x2=\"" << axis_x << "\" y2=\""
      << top + kRow * static_cast<double>(entries.size()) << "\" stroke=\"#333\"/>\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const double y = top + kRow * static_cast<double>(i);
    const double len = scale > 0.0 ? std::abs(e.t_value) / scale * kHalfWidth : 0.0;
    const double x = e.t_value >= 0.0 ? axis_x : axis_x - len;
    const char* fill = e.t_value >= 0.0 ? "#3b6ea8" : "#c0504d";
    svg << "  <text x=\"" << kLabelWidth - 8.0 << "\" y=\"" << y + 15.0 << "\" text-anchor=\"end\">" << e.feature
        << "</text>\n";
    svg << "  <rect x=\"" << x << "\" y=\"" << y + 3.0 << "\" width=\"" << len << "\" height=\"" << kRow - 6.0
        << "\" fill=\"" << fill << "\"/>\n";
    const double tx = e.t_value >= 0.0 ? axis_x + len + 4.0 : axis_x - len - 4.0;
    svg << "  <text x=\"" << tx << "\" y=\"" << y + 15.0 << "\" text-anchor=\"" << (e.t_value >= 0.0 ? "start" : "end")
        << "\" font-size=\"11\">" << format_double(std::round(e.t_value * 100.0) / 100.0) << "</text>\n";
  }
}

}  // namespace

ImportanceReport importance_report(const EmotionModel& model) {
  return {ranked(model, model.arousal), ranked(model, model.valence)};
}

std::string importance_csv(const ImportanceReport& report) {
  std::string out = "target,feature,t_value\n";
  for (const auto& e : report.arousal) out += "arousal," + e.feature + ',' + format_double(e.t_value) + '\n';
  for (const auto& e : report.valence) out += "valence," + e.feature + ',' + format_double(e.t_value) + '\n';
  return out;
}

std::string importance_svg(const ImportanceReport& report) {
  double scale = 0.0;
  for (const auto* list : {&report.arousal, &report.valence}) {
    for (const auto& e : *list) scale = std::max(scale, std::abs(e.t_value));
  }
  const double panel = 40.0 + 22.0 * static_cast<double>(std::max(report.arousal.size(), report.valence.size()));
  const double height = 2.0 * panel + 20.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  bar_panel(svg, report.arousal, "T-values for Arousal", 24.0, scale);
  bar_panel(svg, report.valence, "T-values for Valence", 24.0 + panel, scale);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace emodec
