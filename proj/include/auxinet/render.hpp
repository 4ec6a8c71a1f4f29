#pragma once

#include <string>

#include "auxinet/dynamics.hpp"
#include "auxinet/graph.hpp"

namespace auxinet {

// Fixed defaults, overridable; none of this feeds back into the math.
struct RenderOptions {
  int canvas_width = 640;
  double margin = 24.0;
  double stroke_min = 0.5;   // width for X = 0
  double stroke_max = 6.0;   // width for the largest X in the state
  double vertex_radius = 0;  // 0 = auto from edge spacing
  bool omit_zero_edges = false;
};

// Deterministic SVG: edges drawn with stroke width stroke_min +
// (stroke_max - stroke_min) * X / max(X) and a sequential colormap on the
// same ratio; vertices as filled circles colored by a / max(a). An empty
// state.a draws vertices in a neutral gray. Coordinates use the model's
// y-up convention (flipped for SVG).
std::string render_svg(const Graph& g, const NetworkState& st,
                       const RenderOptions& opts = {});

}  // namespace auxinet
