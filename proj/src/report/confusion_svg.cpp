#include <algorithm>
#include <cmath>
#include <cstdio>

#include "report/report.hpp"

namespace artpipe::report {

namespace {

// Light to dark blue for row shares in (0, 1]; a zero share is white.
std::string cell_colour(double share) {
  if (share <= 0.0) return "#ffffff";
  const int lo[3] = {0xde, 0xeb, 0xf7}, hi[3] = {0x08, 0x30, 0x6b};
  char buf[8];
  int c[3];
  for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(std::lround(lo[i] + share * (hi[i] - lo[i])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

}  // namespace

std::string confusion_svg(const tuning::EvaluationReport& report) {
  const auto k = report.class_names.size();
  std::size_t longest = 1;
  for (const auto& name : report.class_names) longest = std::max(longest, name.size());
  const double cell = 28.0;
  const double margin = 20.0 + 7.0 * static_cast<double>(longest);
  const double top = margin + 30.0;
  const double width = margin + cell * static_cast<double>(k) + 20.0;
  const double height = top + cell * static_cast<double>(k) + 40.0;

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) + "\" height=\"" + coord(height) +
         "\" viewBox=\"0 0 " + coord(width) + " " + coord(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + coord(width) + "\" height=\"" + coord(height) + "\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + coord(margin + cell * static_cast<double>(k) / 2) +
         "\" y=\"14\" font-size=\"12\" text-anchor=\"middle\">predicted</text>\n";
  svg += "<text x=\"12\" y=\"" + coord(top + cell * static_cast<double>(k) / 2) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
         coord(top + cell * static_cast<double>(k) / 2) + ")\">true</text>\n";

  for (std::size_t j = 0; j < k; ++j) {
    const double x = margin + cell * (static_cast<double>(j) + 0.5);
    const double y = top - 6.0;
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" font-size=\"10\" transform=\"rotate(-60 " +
           coord(x) + " " + coord(y) + ")\">" + xml_escape(report.class_names[j]) + "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t row_total = 0;
    for (auto c : report.confusion[i]) row_total += c;
    const double y = top + cell * static_cast<double>(i);
    svg += "<text x=\"" + coord(margin - 4.0) + "\" y=\"" + coord(y + cell * 0.65) +
           "\" font-size=\"10\" text-anchor=\"end\">" + xml_escape(report.class_names[i]) + "</text>\n";
    for (std::size_t j = 0; j < k; ++j) {
      const auto count = report.confusion[i][j];
      const double share = row_total ? static_cast<double>(count) / static_cast<double>(row_total) : 0.0;
      const double x = margin + cell * static_cast<double>(j);
      svg += "<rect class=\"cell\" data-row=\"" + std::to_string(i) + "\" data-col=\"" + std::to_string(j) +
             "\" x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" width=\"" + coord(cell) + "\" height=\"" +
             coord(cell) + "\" fill=\"" + cell_colour(share) + "\" stroke=\"#cccccc\"/>\n";
      svg += "<text x=\"" + coord(x + cell / 2) + "\" y=\"" + coord(y + cell * 0.62) +
             "\" font-size=\"10\" text-anchor=\"middle\" fill=\"" + (share > 0.5 ? "#ffffff" : "#000000") + "\">" +
             std::to_string(count) + "</text>\n";
    }
  }
  char acc[64];
  std::snprintf(acc, sizeof acc, "accuracy %.4f (n = %zu)", report.accuracy, report.total);
  svg += "<text x=\"" + coord(margin) + "\" y=\"" + coord(height - 14.0) + "\" font-size=\"12\">" + acc +
         "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace artpipe::report
