#pragma once

#include <string>
#include <vector>

namespace gfk::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
  std::string color = "#1f77b4";
  std::string label;
};

struct Band {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color = "#1f77b4";
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int width = 640, height = 400;
};

std::string line_plot(const Axes& axes, const std::vector<Band>& bands, const std::vector<Series>& series);

struct Bar {
  std::string label;
  double value = 0.0;
  double error = 0.0;  // half width of the whisker, 0 for none
  std::string color = "#1f77b4";
};

std::string bar_chart(const Axes& axes, const std::vector<Bar>& bars);

std::string escape(const std::string& text);

}  // namespace gfk::svg
