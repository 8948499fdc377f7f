#include "infoplane/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

// Viridis anchor colours at t = 0, 0.25, 0.5, 0.75, 1.
constexpr std::array<std::array<double, 3>, 5> kViridis{{
    {68, 1, 84},
    {59, 82, 139},
    {33, 145, 140},
    {94, 201, 98},
    {253, 231, 37},
}};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_ceiling(double v) {
  if (v <= 0.0) return 1.0;
  const double step = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * step >= v) return m * step;
  return 10.0 * step;
}

}  // namespace

std::string viridis(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  const auto lo = std::min(static_cast<std::size_t>(pos), kViridis.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(kViridis[lo][c] + frac * (kViridis[lo + 1][c] - kViridis[lo][c])));
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string render_information_plane(const InfoPlane& plane, const PlotStyle& style) {
  plane.validate();
  if (plane.layer_count() == 0 || plane.epoch_count() == 0) throw ArgumentError("cannot plot an empty plane");

  const double left = 70.0, right = 110.0, top = 40.0, bottom = 60.0;
  const double plot_w = style.width - left - right;
  const double plot_h = style.height - top - bottom;
  const double x_max = nice_ceiling(*std::max_element(plane.itx.values().begin(), plane.itx.values().end()));
  const double y_max = nice_ceiling(*std::max_element(plane.ity.values().begin(), plane.ity.values().end()));
  auto px = [&](double v) { return left + plot_w * v / x_max; };
  auto py = [&](double v) { return top + plot_h * (1.0 - v / y_max); };
  const std::size_t m = plane.epoch_count();
  auto rank_colour = [&](std::size_t c) {
    return viridis(m == 1 ? 0.0 : static_cast<double>(c) / static_cast<double>(m - 1));
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(style.width) + "\" height=\"" + fmt(style.height) +
       "\" viewBox=\"0 0 " + fmt(style.width) + " " + fmt(style.height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(style.width) + "\" height=\"" + fmt(style.height) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
       escape(style.title) + "</text>\n";

  // Axes and ticks.
  s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(left + plot_w) + "\" y2=\"" +
       fmt(top + plot_h) + "\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(top + plot_h) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = x_max * t / 5.0;
    const double yv = y_max * t / 5.0;
    s += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(px(xv)) + "\" y2=\"" +
         fmt(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(top + plot_h + 18) + "\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
    s += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(py(yv)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"" + fmt(style.height - 15) +
       "\" text-anchor=\"middle\" font-size=\"13\">I(T;X) [bits]</text>\n";
  s += "<text x=\"18\" y=\"" + fmt(top + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
       fmt(top + plot_h / 2) + ")\">I(T;Y) [bits]</text>\n";
  s += "</g>\n";

  // Trajectories.
  if (m > 1) {
    s += "<g fill=\"none\" stroke=\"#888888\" stroke-width=\"1\">\n";
    for (std::size_t r = 0; r < plane.layer_count(); ++r) {
      s += "<polyline data-layer=\"" + std::to_string(plane.layers[r]) + "\" points=\"";
      for (std::size_t c = 0; c < m; ++c) {
        if (c) s += ' ';
        s += fmt(px(plane.itx(r, c))) + "," + fmt(py(plane.ity(r, c)));
      }
      s += "\"/>\n";
    }
    s += "</g>\n";
  }
  s += "<g stroke=\"none\">\n";
  for (std::size_t r = 0; r < plane.layer_count(); ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      s += "<circle cx=\"" + fmt(px(plane.itx(r, c))) + "\" cy=\"" + fmt(py(plane.ity(r, c))) + "\" r=\"" +
           fmt(style.marker_radius) + "\" fill=\"" + rank_colour(c) + "\"/>\n";
    }
  }
  s += "</g>\n";

  // Epoch colour bar.
  const double bar_x = left + plot_w + 30.0;
  const double bar_h = plot_h;
  const int steps = 32;
  s += "<g stroke=\"none\">\n";
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / (steps - 1);
    s += "<rect x=\"" + fmt(bar_x) + "\" y=\"" + fmt(top + bar_h * (1.0 - static_cast<double>(i + 1) / steps)) +
         "\" width=\"14\" height=\"" + fmt(bar_h / steps + 0.5) + "\" fill=\"" + viridis(t) + "\"/>\n";
  }
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<text x=\"" + fmt(bar_x + 18) + "\" y=\"" + fmt(top + 8) + "\">" + std::to_string(plane.epochs.back()) + "</text>\n";
  s += "<text x=\"" + fmt(bar_x + 18) + "\" y=\"" + fmt(top + bar_h) + "\">" + std::to_string(plane.epochs.front()) + "</text>\n";
  s += "<text x=\"" + fmt(bar_x - 4) + "\" y=\"" + fmt(top - 8) + "\">epoch</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace infoplane
