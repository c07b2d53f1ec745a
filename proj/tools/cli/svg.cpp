#include "cli/svg.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace gaplabel::cli {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_plot(const std::vector<double>& x, const std::vector<double>& y, const std::vector<Band>& bands,
                     const std::string& header, const std::string& x_label, const std::string& y_label) {
  const double x_min = x.empty() ? 0.0 : x.front(), x_max = x.empty() ? 1.0 : x.back();
  const double span = x_max > x_min ? x_max - x_min : 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x_min) / span * pw; };
  auto py = [&](double v) { return kTop + (1.0 - v) * ph; };

  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- {} -->\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      escape(header), kWidth, kHeight, kWidth, kHeight);

  for (const Band& b : bands) {
    const double a = px(std::max(b.lo, x_min)), c = px(std::min(b.hi, x_max));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#9ecae1\" fill-opacity=\"0.5\"/>\n",
                       a, kTop, std::max(c - a, 0.5), ph);
    if (!b.label.empty())
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                         0.5 * (a + c), kTop + 12, escape(b.label));
  }

  // Axes and ticks.
  out += fmt::format("<path d=\"M{:.2f},{:.2f} H{:.2f} M{:.2f},{:.2f} V{:.2f}\" stroke=\"black\" fill=\"none\"/>\n", kLeft,
                     kTop + ph, kLeft + pw, kLeft, kTop, kTop + ph);
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0, xv = x_min + v * span;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n", kLeft - 6,
                       py(v) + 4, v);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n", px(xv),
                       kTop + ph + 16, xv);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                     kHeight - 10, escape(x_label));
  out += fmt::format("<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">{}</text>\n",
                     kTop + ph / 2, kTop + ph / 2, escape(y_label));

  if (!x.empty()) {
    out += "<path fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.2\" d=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
      out += fmt::format("{}{:.2f},{:.2f}", i ? " L" : "M", px(x[i]), py(std::clamp(y[i], 0.0, 1.0)));
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gaplabel::cli
