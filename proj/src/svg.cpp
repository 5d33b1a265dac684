#include "ocpg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ocpg/errors.hpp"

namespace ocpg {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 690, kTop = 50, kBottom = 420;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

std::string tick_label(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

void SvgPlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& color, const std::string& label) {
  if (xs.size() != ys.size()) throw ContractError("svg: x/y length mismatch");
  lines_.push_back({xs, ys, color, label});
}

void SvgPlot::add_band(const std::vector<double>& xs, const std::vector<double>& lo,
                       const std::vector<double>& hi, const std::string& color) {
  if (xs.size() != lo.size() || xs.size() != hi.size()) {
    throw ContractError("svg: band length mismatch");
  }
  bands_.push_back({xs, lo, hi, color});
}

void SvgPlot::write(const std::string& path) const {
  Range xr, yr;
  for (const auto& l : lines_) {
    for (double x : l.xs) xr.include(x);
    for (double y : l.ys) yr.include(y);
  }
  for (const auto& b : bands_) {
    for (double x : b.xs) xr.include(x);
    for (double y : b.lo) yr.include(y);
    for (double y : b.hi) yr.include(y);
  }
  if (lines_.empty() && bands_.empty()) {
    xr.include(0);
    xr.include(1);
    yr.include(0);
    yr.include(1);
  }
  xr.pad();
  yr.pad();

  auto px = [&](double x) {
    return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft);
  };
  auto py = [&](double y) {
    return kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop);
  };

  std::ofstream out(path);
  if (!out) throw ConfigError("svg: cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << (kLeft + kRight) / 2 << "' y='28' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title_ << "</text>\n";

  // bands under lines
  for (const auto& b : bands_) {
    out << "<polygon fill='" << b.color << "' fill-opacity='0.25' stroke='none' points='";
    for (std::size_t i = 0; i < b.xs.size(); ++i) {
      out << px(b.xs[i]) << ',' << py(b.hi[i]) << ' ';
    }
    for (std::size_t i = b.xs.size(); i-- > 0;) {
      out << px(b.xs[i]) << ',' << py(b.lo[i]) << ' ';
    }
    out << "'/>\n";
  }

  // axes
  out << "<line x1='" << kLeft << "' y1='" << kBottom << "' x2='" << kRight << "' y2='" << kBottom
      << "' stroke='black'/>\n";
  out << "<line x1='" << kLeft << "' y1='" << kTop << "' x2='" << kLeft << "' y2='" << kBottom
      << "' stroke='black'/>\n";
  for (double t : nice_ticks(xr.lo, xr.hi)) {
    out << "<line x1='" << px(t) << "' y1='" << kBottom << "' x2='" << px(t) << "' y2='"
        << kBottom + 5 << "' stroke='black'/>\n";
    out << "<text x='" << px(t) << "' y='" << kBottom + 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>" << tick_label(t)
        << "</text>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi)) {
    out << "<line x1='" << kLeft - 5 << "' y1='" << py(t) << "' x2='" << kLeft << "' y2='" << py(t)
        << "' stroke='black'/>\n";
    out << "<text x='" << kLeft - 8 << "' y='" << py(t) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << tick_label(t)
        << "</text>\n";
  }
  out << "<text x='" << (kLeft + kRight) / 2 << "' y='" << kHeight - 14
      << "' text-anchor='middle' font-family='sans-serif' font-size='13'>" << x_label_
      << "</text>\n";
  out << "<text x='18' y='" << (kTop + kBottom) / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='13' transform='rotate(-90 18 "
      << (kTop + kBottom) / 2 << ")'>" << y_label_ << "</text>\n";

  for (const auto& l : lines_) {
    out << "<polyline fill='none' stroke='" << l.color << "' stroke-width='1.8' points='";
    for (std::size_t i = 0; i < l.xs.size(); ++i) {
      out << px(l.xs[i]) << ',' << py(l.ys[i]) << ' ';
    }
    out << "'/>\n";
  }

  // legend
  double ly = kTop + 8;
  for (const auto& l : lines_) {
    if (l.label.empty()) continue;
    out << "<line x1='" << kRight - 150 << "' y1='" << ly << "' x2='" << kRight - 120 << "' y2='"
        << ly << "' stroke='" << l.color << "' stroke-width='2.5'/>\n";
    out << "<text x='" << kRight - 112 << "' y='" << ly + 4
        << "' font-family='sans-serif' font-size='12'>" << l.label << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace ocpg
