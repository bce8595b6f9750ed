#include "hnirm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hnirm/io.hpp"

namespace hnirm::svg {
namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 560;
constexpr int kMargin = 60;

const char* kPalette[] = {"#1f1f1f", "#d62728", "#1f77b4", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
constexpr int kPaletteSize = 8;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  double map(double v, double px0, double px1) const {
    if (hi == lo) return 0.5 * (px0 + px1);
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

Range padded(double lo, double hi) {
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

void write_scatter(const std::string& path, const std::string& title,
                   const std::vector<Point>& points, const std::vector<std::string>& class_names) {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!points.empty()) {
    xlo = xhi = points[0].x;
    ylo = yhi = points[0].y;
    for (const auto& p : points) {
      xlo = std::min(xlo, p.x);
      xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
  }
  const Range xr = padded(xlo, xhi), yr = padded(ylo, yhi);

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  s << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"16\">" << title << "</text>\n";
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
    << "\" height=\"" << kHeight - 2 * kMargin
    << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";

  auto px = [&](double x) { return xr.map(x, kMargin, kWidth - kMargin); };
  auto py = [&](double y) { return yr.map(y, kHeight - kMargin, kMargin); };

  // axis ticks at the data range ends
  s << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 18
    << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(xr.lo) << "</text>\n";
  s << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 18
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(xr.hi)
    << "</text>\n";
  s << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(yr.lo)
    << "</text>\n";
  s << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(yr.hi)
    << "</text>\n";

  for (const auto& p : points) {
    const char* color = kPalette[((p.color_class % kPaletteSize) + kPaletteSize) % kPaletteSize];
    if (p.label.empty()) {
      s << "<circle cx=\"" << num(px(p.x)) << "\" cy=\"" << num(py(p.y))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else {
      s << "<text x=\"" << num(px(p.x)) << "\" y=\"" << num(py(p.y))
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" fill=\""
        << color << "\">" << p.label << "</text>\n";
    }
  }

  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const double y = kMargin + 16.0 * c + 12.0;
    s << "<circle cx=\"" << kWidth - kMargin + 14 << "\" cy=\"" << num(y) << "\" r=\"4\" fill=\""
      << kPalette[c % kPaletteSize] << "\"/>\n";
    s << "<text x=\"" << kWidth - kMargin + 22 << "\" y=\"" << num(y + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << class_names[c] << "</text>\n";
  }
  s << "</svg>\n";
  io::write_file_atomic(path, s.str());
}

void write_intervals(const std::string& path, const std::string& title,
                     const std::vector<Interval>& intervals) {
  double lo = 0, hi = 1;
  if (!intervals.empty()) {
    lo = intervals[0].lo;
    hi = intervals[0].hi;
    for (const auto& iv : intervals) {
      lo = std::min(lo, iv.lo);
      hi = std::max(hi, iv.hi);
    }
  }
  const Range yr = padded(lo, hi);
  const int n = static_cast<int>(intervals.size());

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  s << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"16\">" << title << "</text>\n";
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
    << "\" height=\"" << kHeight - 2 * kMargin
    << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  auto py = [&](double y) { return yr.map(y, kHeight - kMargin, kMargin); };
  if (yr.lo < 0.0 && yr.hi > 0.0) {
    s << "<line x1=\"" << kMargin << "\" y1=\"" << num(py(0)) << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << num(py(0)) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (int q = 0; q < n; ++q) {
    const double x = kMargin + (q + 0.5) * (kWidth - 2.0 * kMargin) / n;
    s << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(intervals[q].lo)) << "\" x2=\"" << num(x)
      << "\" y2=\"" << num(py(intervals[q].hi)) << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    s << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(intervals[q].mean))
      << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    if (n <= 100 && (q % std::max(1, n / 20) == 0)) {
      s << "<text x=\"" << num(x) << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
        << intervals[q].label << "</text>\n";
    }
  }
  s << "</svg>\n";
  io::write_file_atomic(path, s.str());
}

}  // namespace hnirm::svg
