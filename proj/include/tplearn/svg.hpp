#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tpl {

// Minimal deterministic SVG line/scatter plots with a fixed 640x400 viewBox.
// Every run with the same data produces identical bytes.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const std::string& color, double width = 1.5);
  // Shaded band between y_low and y_high, for variance envelopes.
  void add_band(const Eigen::VectorXd& x, const Eigen::VectorXd& y_low,
                const Eigen::VectorXd& y_high, const std::string& color);
  void add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const std::string& color, double radius = 2.5);
  void add_legend_entry(const std::string& label, const std::string& color);

  void write(const std::string& path) const;

 private:
  struct Series {
    enum class Kind { kLine, kBand, kScatter } kind;
    Eigen::VectorXd x, y, y2;
    std::string color;
    double width = 1.5;
  };

  void bounds(double* xmin, double* xmax, double* ymin, double* ymax) const;

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace tpl
