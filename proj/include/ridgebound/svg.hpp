#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ridgebound/errors.hpp"

namespace ridgebound {

/// Minimal static-SVG plotter for quick looks (lines, scatter, heatmap).
/// Not a plotting library; just enough to eyeball experiment output.
class SvgPlot {
 public:
  SvgPlot(int width, int height, double x_lo, double x_hi, double y_lo, double y_hi,
          std::string title = "")
      : w_(width), h_(height), x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
    body_ << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w_ << "' height='"
          << h_ << "' viewBox='0 0 " << w_ << " " << h_ << "'>\n";
    body_ << "<rect width='100%' height='100%' fill='white'/>\n";
    if (!title.empty()) {
      body_ << "<text x='" << w_ / 2 << "' y='16' text-anchor='middle' "
            << "font-family='sans-serif' font-size='13'>" << title << "</text>\n";
    }
    body_ << "<rect x='" << pad_ << "' y='" << pad_ << "' width='" << w_ - 2 * pad_
          << "' height='" << h_ - 2 * pad_
          << "' fill='none' stroke='#888' stroke-width='1'/>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double stroke = 1.2) {
    body_ << "<polyline fill='none' stroke='" << color << "' stroke-width='" << stroke
          << "' points='";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      body_ << px(xs[i]) << ',' << py(ys[i]) << ' ';
    }
    body_ << "'/>\n";
  }

  void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::string& color, double r = 1.5) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < x_lo_ || xs[i] > x_hi_ || ys[i] < y_lo_ || ys[i] > y_hi_) continue;
      body_ << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i]) << "' r='" << r
            << "' fill='" << color << "' fill-opacity='0.6'/>\n";
    }
  }

  /// values(i, j): i indexes x, j indexes y; rendered as filled cells.
  void heatmap(const Eigen::MatrixXd& values) {
    const double vmax = std::max(values.maxCoeff(), 1e-300);
    const double cw = (w_ - 2.0 * pad_) / values.rows();
    const double ch = (h_ - 2.0 * pad_) / values.cols();
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const double t = std::clamp(values(i, j) / vmax, 0.0, 1.0);
        body_ << "<rect x='" << pad_ + i * cw << "' y='" << h_ - pad_ - (j + 1) * ch
              << "' width='" << cw + 0.5 << "' height='" << ch + 0.5 << "' fill='"
              << colormap(t) << "'/>\n";
      }
    }
  }

  void save(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << body_.str() << "</svg>\n";
  }

 private:
  double px(double x) const {
    return pad_ + (x - x_lo_) / (x_hi_ - x_lo_) * (w_ - 2.0 * pad_);
  }
  double py(double y) const {
    return h_ - pad_ - (y - y_lo_) / (y_hi_ - y_lo_) * (h_ - 2.0 * pad_);
  }

  static std::string colormap(double t) {
    // dark blue -> cyan -> yellow
    const int r = static_cast<int>(255 * std::clamp(2.0 * t - 1.0, 0.0, 1.0));
    const int g = static_cast<int>(255 * std::clamp(1.6 * t, 0.0, 1.0));
    const int b = static_cast<int>(255 * std::clamp(1.0 - 1.2 * t, 0.1, 1.0));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
  }

  int w_, h_;
  double x_lo_, x_hi_, y_lo_, y_hi_;
  static constexpr int pad_ = 28;
  std::ostringstream body_;
};

}  // namespace ridgebound
