#pragma once

#include <string>
#include <vector>

namespace gaplabel::cli {

struct Band {
  double lo, hi;
  std::string label;
};

/// Line plot of y(x) on [x_min, x_max] x [0, 1] with shaded vertical bands.
std::string svg_plot(const std::vector<double>& x, const std::vector<double>& y, const std::vector<Band>& bands,
                     const std::string& header, const std::string& x_label, const std::string& y_label);

}  // namespace gaplabel::cli
