#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "common/error.hpp"
#include "report/report.hpp"

using namespace artpipe;
using namespace artpipe::report;

namespace {

// Minimal well-formedness check: balanced tags, quoted attributes, escaped text.
bool well_formed(const std::string& xml, std::string* why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  if (xml.rfind("<?xml", 0) == 0) i = xml.find("?>") + 2;
  bool seen_root = false;
  while (i < xml.size()) {
    const auto lt = xml.find('<', i);
    const std::string text = xml.substr(i, lt == std::string::npos ? std::string::npos : lt - i);
    for (std::size_t k = 0; k < text.size(); ++k)
      if (text[k] == '&' && !std::regex_search(text.substr(k), std::regex("^&(amp|lt|gt|quot|apos);"))) {
        *why = "bare ampersand in text";
        return false;
      }
    if (text.find('>') != std::string::npos) {
      *why = "bare > in text";
      return false;
    }
    if (lt == std::string::npos) break;
    if (stack.empty() && seen_root && text.find_first_not_of(" \n") != std::string::npos) {
      *why = "content after root";
      return false;
    }
    const auto gt = xml.find('>', lt);
    if (gt == std::string::npos) {
      *why = "unterminated tag";
      return false;
    }
    const std::string tag = xml.substr(lt + 1, gt - lt - 1);
    static const std::regex open(R"(^([A-Za-z][\w:.-]*)(\s+[\w:.-]+="[^"<]*")*\s*(/?)$)");
    std::smatch m;
    if (!tag.empty() && tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) {
        *why = "mismatched </" + tag.substr(1) + ">";
        return false;
      }
      stack.pop_back();
    } else if (std::regex_match(tag, m, open)) {
      if (stack.empty() && seen_root) {
        *why = "second root element";
        return false;
      }
      seen_root = true;
      if (m[3].str().empty()) stack.push_back(m[1].str());
    } else {
      *why = "malformed tag <" + tag + ">";
      return false;
    }
    i = gt + 1;
  }
  if (!stack.empty()) {
    *why = "unclosed <" + stack.back() + ">";
    return false;
  }
  return seen_root;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::string cell_fill(const std::string& svg, std::size_t row, std::size_t col) {
  const std::regex re("<rect class=\"cell\" data-row=\"" + std::to_string(row) + "\" data-col=\"" +
                      std::to_string(col) + "\"[^>]*fill=\"(#[0-9a-f]{6})\"");
  std::smatch m;
  return std::regex_search(svg, m, re) ? m[1].str() : "";
}

std::string attribute(const std::string& svg, const std::string& name) {
  std::smatch m;
  return std::regex_search(svg, m, std::regex(name + "=\"([^\"]*)\"")) ? m[1].str() : "";
}

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("artpipe_report_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Svg, EscapeAndCoordinates) {
  EXPECT_EQ(xml_escape("a<b>&\"c'"), "a&lt;b&gt;&amp;&quot;c&apos;");
  EXPECT_EQ(coord(1.005), "1.00");
  EXPECT_EQ(coord(-0.001), "0.00");
  EXPECT_EQ(coord(12.345), "12.35");
}

TEST(ConfusionSvg, PerfectPredictionsFillOnlyTheDiagonal) {
  const std::vector<std::uint32_t> y{0, 1, 2, 0, 1, 2};
  const auto r = tuning::evaluate_predictions(y, y, {"Kustodiev", "Repin & Co", "<Monet>"});
  const auto svg = confusion_svg(r);
  std::string why;
  EXPECT_TRUE(well_formed(svg, &why)) << why;
  EXPECT_EQ(count_of(svg, "<rect class=\"cell\""), 9u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto fill = cell_fill(svg, i, j);
      if (i == j)
        EXPECT_NE(fill, "#ffffff");
      else
        EXPECT_EQ(fill, "#ffffff");
    }
  EXPECT_NE(svg.find("Repin &amp; Co"), std::string::npos);
  EXPECT_NE(svg.find("&lt;Monet&gt;"), std::string::npos);
}

TEST(ConfusionSvg, ZeroCellsAreWhiteAndCountsArePrinted) {
  const std::vector<std::uint32_t> y{0, 0, 0, 1, 1}, p{0, 1, 1, 1, 1};
  const auto svg = confusion_svg(tuning::evaluate_predictions(y, p, {"a", "b"}));
  EXPECT_EQ(cell_fill(svg, 1, 0), "#ffffff");
  EXPECT_NE(cell_fill(svg, 0, 1), "#ffffff");
  EXPECT_NE(svg.find(">2</text>"), std::string::npos);
  // Darker shade for the larger row share.
  EXPECT_LT(cell_fill(svg, 1, 1), cell_fill(svg, 0, 0));
}

TEST(ConfusionSvg, ByteStable) {
  const std::vector<std::uint32_t> y{0, 1, 1, 2}, p{0, 2, 1, 2};
  const auto r = tuning::evaluate_predictions(y, p, {"a", "b", "c"});
  EXPECT_EQ(confusion_svg(r), confusion_svg(r));
}

TEST(Scatter, TwoPointsTwoGroups) {
  const auto path = write_temp("two.csv",
                               "label,n_artists,accuracy,group\nours,20,0.85,this work\nprior,22,0.78,prior work\n");
  const auto points = read_scatter_csv(path);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].label, "ours");
  EXPECT_EQ(points[1].n_artists, 22.0);
  const auto svg = scatter_svg(points);
  std::string why;
  EXPECT_TRUE(well_formed(svg, &why)) << why;
  EXPECT_EQ(count_of(svg, "<circle"), 2u);
  EXPECT_EQ(count_of(svg, "class=\"point-label\""), 2u);
  EXPECT_NE(svg.find("data-group=\"this work\""), std::string::npos);
  EXPECT_NE(svg.find("data-group=\"prior work\""), std::string::npos);
  EXPECT_EQ(attribute(svg, "data-y-min"), "0.00");
  EXPECT_EQ(attribute(svg, "data-y-max"), "1.00");
  EXPECT_LE(std::stod(attribute(svg, "data-x-min")), 20.0);
  EXPECT_GE(std::stod(attribute(svg, "data-x-max")), 22.0);
  EXPECT_EQ(scatter_svg(points), svg);
}

TEST(Scatter, HeaderlessAndSingleX) {
  const auto points = read_scatter_csv(write_temp("single.csv", "a,62,0.84,x\nb,62,1.3,y\n"));
  ASSERT_EQ(points.size(), 2u);
  const auto svg = scatter_svg(points);
  EXPECT_LT(std::stod(attribute(svg, "data-x-min")), 62.0);
  EXPECT_GT(std::stod(attribute(svg, "data-x-max")), 62.0);
  EXPECT_GE(std::stod(attribute(svg, "data-y-max")), 1.3);
}

TEST(Scatter, Errors) {
  try {
    read_scatter_csv(write_temp("empty.csv", "label,n_artists,accuracy,group\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Data);
  }
  try {
    read_scatter_csv(write_temp("short.csv", "label,n_artists,accuracy,group\na,1,0.5\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Format);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(read_scatter_csv(write_temp("nan.csv", "a,1,0.5,g\nb,x,0.5,g\n")), Error);
  EXPECT_THROW(read_scatter_csv("/nonexistent/points.csv"), Error);
  EXPECT_THROW(scatter_svg({}), Error);
}
