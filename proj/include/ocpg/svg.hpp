#pragma once

#include <string>
#include <vector>

namespace ocpg {

// Minimal SVG line plot: polylines, shaded bands, axes with ticks, legend.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, const std::string& label);

  // Shaded region between lo and hi (confidence band).
  void add_band(const std::vector<double>& xs, const std::vector<double>& lo,
                const std::vector<double>& hi, const std::string& color);

  void write(const std::string& path) const;

 private:
  struct Line {
    std::vector<double> xs, ys;
    std::string color, label;
  };
  struct Band {
    std::vector<double> xs, lo, hi;
    std::string color;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Line> lines_;
  std::vector<Band> bands_;
};

}  // namespace ocpg
