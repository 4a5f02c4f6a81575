#pragma once

// Deterministic SVG plot of the mapped model staircase against the signed
// zero staircase on [-T, T].

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "adelic/io.hpp"
#include "adelic/shift.hpp"
#include "adelic/zeta.hpp"

namespace adelic::svg {

namespace detail {

struct Frame {
  double window;
  double y_range;
  double width = 800.0, height = 500.0, margin = 60.0;

  double x(double lambda) const {
    return margin + (lambda + window) / (2.0 * window) * (width - 2.0 * margin);
  }
  double y(double value) const {
    return height / 2.0 - value / y_range * (height / 2.0 - margin);
  }
};

/// Axis-aligned step path of an odd staircase restricted to [-T, T].
inline std::string step_path(const shift::Staircase& s, const Frame& f) {
  std::vector<double> cuts{-f.window, 0.0, f.window};
  for (double l : s.locations())
    if (l < f.window) {
      cuts.push_back(l);
      cuts.push_back(-l);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::string d;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double v = static_cast<double>(s(mid));
    const std::string y = io::fixed(f.y(v), 3);
    d += (i == 0 ? "M" : "L") + io::fixed(f.x(cuts[i]), 3) + "," + y;
    d += "L" + io::fixed(f.x(cuts[i + 1]), 3) + "," + y;
  }
  return d;
}

}  // namespace detail

inline std::string render_svg(const shift::Staircase& model, const shift::Staircase& zeros,
                              const zeta::AffineMap& map, double window) {
  if (!(window > 0.0)) throw Error("svg", "window must be positive");
  const auto mapped = zeta::mapped_staircase(model, map);
  double y_range = 1.0;
  for (const auto* s : {&mapped, &zeros})
    y_range = std::max(y_range, static_cast<double>(std::llabs((*s)(window))));
  const detail::Frame f{window, y_range};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<line x1=\"" + io::fixed(f.x(-window), 3) + "\" y1=\"" + io::fixed(f.y(0), 3) +
         "\" x2=\"" + io::fixed(f.x(window), 3) + "\" y2=\"" + io::fixed(f.y(0), 3) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + io::fixed(f.x(0), 3) + "\" y1=\"" + io::fixed(f.margin, 3) +
         "\" x2=\"" + io::fixed(f.x(0), 3) + "\" y2=\"" + io::fixed(f.height - f.margin, 3) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out += "<path id=\"zeros\" d=\"" + detail::step_path(zeros, f) +
         "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  out += "<path id=\"model\" d=\"" + detail::step_path(mapped, f) +
         "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  out += "<text x=\"70\" y=\"30\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#1f77b4\">"
         "model staircase (mapped)</text>\n";
  out += "<text x=\"70\" y=\"48\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#d62728\">"
         "zero staircase</text>\n";
  out += "<text x=\"560\" y=\"30\" font-family=\"sans-serif\" font-size=\"13\">a = " +
         io::fixed(map.a, 6) + ", b = " + io::fixed(map.b, 6) + "</text>\n";
  out += "<text x=\"560\" y=\"48\" font-family=\"sans-serif\" font-size=\"13\">T = " +
         io::fixed(window, 3) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace adelic::svg
