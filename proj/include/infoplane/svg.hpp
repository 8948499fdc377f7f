#pragma once

#include <string>

#include "infoplane/analysis.hpp"

namespace infoplane {

struct PlotStyle {
  double width = 640.0;
  double height = 480.0;
  std::string title = "Information plane";
  double marker_radius = 3.0;
};

/// One polyline per layer through its (I(T;X), I(T;Y)) points, circle
/// markers coloured by snapshot rank (viridis ramp), axes in bits. A plane
/// with a single epoch gets markers only. Output is byte-deterministic.
std::string render_information_plane(const InfoPlane& plane, const PlotStyle& style = {});

/// Colour for position t in [0, 1] along the viridis ramp, "#rrggbb".
std::string viridis(double t);

}  // namespace infoplane
