#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "report/report.hpp"

namespace artpipe::report {

namespace {

bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::vector<ScatterPoint> read_scatter_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::vector<ScatterPoint> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_record(line);
    if (fields.size() != 4)
      fail(ErrorCode::Format, path + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                  " fields, expected 4 (label,n_artists,accuracy,group)");
    ScatterPoint p;
    p.label = fields[0];
    p.group = fields[3];
    const bool numbers = parse_double(fields[1], p.n_artists) && parse_double(fields[2], p.accuracy);
    if (!numbers) {
      if (line_no == 1 && points.empty()) continue;  // header
      fail(ErrorCode::Format, path + ": line " + std::to_string(line_no) + " has a non-numeric n_artists or accuracy");
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) fail(ErrorCode::Data, path + ": no data rows");
  return points;
}

std::string scatter_svg(const std::vector<ScatterPoint>& points) {
  if (points.empty()) fail(ErrorCode::Data, "scatter: no points");
  double x_lo = points[0].n_artists, x_hi = x_lo;
  double y_lo = 0.0, y_hi = 1.0;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.n_artists);
    x_hi = std::max(x_hi, p.n_artists);
    y_lo = std::min(y_lo, p.accuracy);
    y_hi = std::max(y_hi, p.accuracy);
  }
  if (x_hi == x_lo) {
    x_lo -= 1.0;
    x_hi += 1.0;
  } else {
    const double pad = 0.05 * (x_hi - x_lo);
    x_lo -= pad;
    x_hi += pad;
  }

  const double width = 640, height = 420, left = 60, right = 30, top = 30, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * plot_h; };

  std::map<std::string, std::size_t> group_index;
  std::vector<std::string> groups;
  for (const auto& p : points)
    if (group_index.emplace(p.group, groups.size()).second) groups.push_back(p.group);

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\" "
         "font-family=\"sans-serif\" data-x-min=\"" +
         coord(x_lo) + "\" data-x-max=\"" + coord(x_hi) + "\" data-y-min=\"" + coord(y_lo) + "\" data-y-max=\"" +
         coord(y_hi) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"#ffffff\"/>\n";
  // Axes with five ticks each.
  svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(top + plot_h) + "\" x2=\"" + coord(left + plot_w) +
         "\" y2=\"" + coord(top + plot_h) + "\" stroke=\"#000000\"/>\n";
  svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(top) + "\" x2=\"" + coord(left) + "\" y2=\"" +
         coord(top + plot_h) + "\" stroke=\"#000000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    svg += "<line class=\"tick\" x1=\"" + coord(left - 4) + "\" y1=\"" + coord(py(yv)) + "\" x2=\"" + coord(left) +
           "\" y2=\"" + coord(py(yv)) + "\" stroke=\"#000000\"/>\n";
    svg += "<g class=\"tick-label\"><text x=\"" + coord(left - 6) + "\" y=\"" + coord(py(yv) + 4) +
           "\" font-size=\"10\" text-anchor=\"end\">" + coord(yv) + "</text></g>\n";
    svg += "<line class=\"tick\" x1=\"" + coord(px(xv)) + "\" y1=\"" + coord(top + plot_h) + "\" x2=\"" +
           coord(px(xv)) + "\" y2=\"" + coord(top + plot_h + 4) + "\" stroke=\"#000000\"/>\n";
    svg += "<g class=\"tick-label\"><text x=\"" + coord(px(xv)) + "\" y=\"" + coord(top + plot_h + 16) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + coord(xv) + "</text></g>\n";
  }
  svg += "<g class=\"axis-title\"><text x=\"" + coord(left + plot_w / 2) + "\" y=\"" + coord(height - 10) +
         "\" font-size=\"12\" text-anchor=\"middle\">number of artists</text></g>\n";
  svg += "<g class=\"axis-title\"><text x=\"14\" y=\"" + coord(top + plot_h / 2) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + coord(top + plot_h / 2) +
         ")\">accuracy</text></g>\n";

  for (const auto& p : points) {
    const auto colour = kPalette[group_index[p.group] % std::size(kPalette)];
    svg += "<circle cx=\"" + coord(px(p.n_artists)) + "\" cy=\"" + coord(py(p.accuracy)) + "\" r=\"5\" fill=\"" +
           colour + "\" data-group=\"" + xml_escape(p.group) + "\"/>\n";
    svg += "<text class=\"point-label\" x=\"" + coord(px(p.n_artists) + 7) + "\" y=\"" + coord(py(p.accuracy) - 7) +
           "\" font-size=\"10\">" + xml_escape(p.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace artpipe::report
