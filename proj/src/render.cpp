#include "auxinet/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "auxinet/errors.hpp"

namespace auxinet {

namespace {

// Sequential dark-violet to yellow ramp (viridis sampled at nine evenly
// spaced points), linearly interpolated.
constexpr unsigned char kRamp[9][3] = {
    {0x44, 0x01, 0x54}, {0x47, 0x2d, 0x7b}, {0x3b, 0x52, 0x8b},
    {0x2c, 0x72, 0x8e}, {0x21, 0x91, 0x8c}, {0x27, 0xad, 0x81},
    {0x5e, 0xc9, 0x62}, {0xaa, 0xdc, 0x32}, {0xfd, 0xe7, 0x25}};

std::string ramp_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const double pos = v * 8.0;
  const int lo = std::min(7, static_cast<int>(pos));
  const double f = pos - lo;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(kRamp[lo][0] +
                                             f * (kRamp[lo + 1][0] - kRamp[lo][0]))),
                static_cast<int>(std::lround(kRamp[lo][1] +
                                             f * (kRamp[lo + 1][1] - kRamp[lo][1]))),
                static_cast<int>(std::lround(kRamp[lo][2] +
                                             f * (kRamp[lo + 1][2] - kRamp[lo][2]))));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Graph& g, const NetworkState& st,
                       const RenderOptions& opts) {
  if (st.X.size() != g.edge_count()) {
    throw DimensionError("render: X does not match the edge count");
  }
  if (st.a.size() != 0 && st.a.size() != g.vertex_count()) {
    throw DimensionError("render: a does not match the vertex count");
  }
  if (opts.canvas_width < 64 || opts.margin < 0 ||
      !(opts.stroke_max >= opts.stroke_min) || !(opts.stroke_min >= 0)) {
    throw ConfigError("render: bad canvas or stroke options");
  }

  const BBox box = g.extent();
  const double w_world = std::max(box.width(), 1e-12);
  const double h_world = std::max(box.height(), 1e-12);
  const double inner_w = opts.canvas_width - 2.0 * opts.margin;
  const double scale = inner_w / w_world;
  const double inner_h = h_world * scale;
  const double canvas_h = inner_h + 2.0 * opts.margin;

  auto px = [&](double x) { return opts.margin + (x - box.xmin) * scale; };
  auto py = [&](double y) { return opts.margin + (box.ymax - y) * scale; };

  const double x_max = st.X.size() ? st.X.maxCoeff() : 0.0;
  const double a_max = st.a.size() ? st.a.maxCoeff() : 0.0;

  double min_edge_px = inner_w;
  for (const Edge& e : g.edges()) {
    min_edge_px = std::min(min_edge_px, e.length * scale);
  }
  double radius = opts.vertex_radius;
  if (radius <= 0) radius = std::clamp(0.18 * min_edge_px, 1.5, 8.0);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(opts.canvas_width) + "\" height=\"" + num(canvas_h) +
         "\" viewBox=\"0 0 " + num(opts.canvas_width) + " " + num(canvas_h) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  svg += "<g stroke-linecap=\"round\">\n";
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    const double ratio = x_max > 0 ? std::max(st.X[e], 0.0) / x_max : 0.0;
    if (opts.omit_zero_edges && st.X[e] <= 0.0) continue;
    const double width =
        opts.stroke_min + (opts.stroke_max - opts.stroke_min) * ratio;
    const Vertex& a = g.vertices()[ed.i];
    const Vertex& b = g.vertices()[ed.j];
    svg += "<line x1=\"" + num(px(a.x)) + "\" y1=\"" + num(py(a.y)) +
           "\" x2=\"" + num(px(b.x)) + "\" y2=\"" + num(py(b.y)) +
           "\" stroke=\"" + ramp_color(ratio) + "\" stroke-width=\"" +
           num(width) + "\"/>\n";
  }
  svg += "</g>\n<g stroke=\"none\">\n";
  for (const Vertex& v : g.vertices()) {
    const std::string fill =
        st.a.size() ? ramp_color(a_max > 0 ? std::max(st.a[v.id], 0.0) / a_max
                                           : 0.0)
                    : std::string("#888888");
    svg += "<circle cx=\"" + num(px(v.x)) + "\" cy=\"" + num(py(v.y)) +
           "\" r=\"" + num(radius) + "\" fill=\"" + fill + "\"/>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace auxinet
