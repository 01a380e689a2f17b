#include "floppy/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "floppy/error.hpp"

namespace floppy {

RenderSpec parse_overlay(const std::string& text) {
  RenderSpec spec;
  if (text == "none") return spec;
  if (text == "globality") {
    spec.overlay = Overlay::globality;
  } else if (text == "extensions") {
    spec.overlay = Overlay::extensions;
  } else if (text == "prediction") {
    spec.overlay = Overlay::prediction;
  } else if (text.rfind("mode:", 0) == 0) {
    spec.overlay = Overlay::mode;
    try {
      std::size_t used = 0;
      spec.mode = std::stoi(text.substr(5), &used);
      if (used != text.size() - 5 || spec.mode < 0) throw std::invalid_argument(text);
    } catch (const std::logic_error&) {
      throw Error("bad-overlay", "mode overlay needs a non-negative index: " + text);
    }
  } else {
    throw Error("bad-overlay", "unknown overlay '" + text + "'");
  }
  return spec;
}

namespace {

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::string num(double v) { return fmt("%.3f", std::abs(v) < 5e-4 ? 0.0 : v); }

// Dark indigo to bright yellow.
std::string gradient(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double lo[3] = {27, 27, 58};
  const double hi[3] = {255, 210, 63};
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(lo[0] + t * (hi[0] - lo[0]))),
                static_cast<int>(std::lround(lo[1] + t * (hi[1] - lo[1]))),
                static_cast<int>(std::lround(lo[2] + t * (hi[2] - lo[2]))));
  return buf;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  double operator()(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

Scale make_scale(const std::vector<double>& values, const RenderSpec& spec) {
  Scale s;
  if (!values.empty()) {
    s.lo = *std::min_element(values.begin(), values.end());
    s.hi = *std::max_element(values.begin(), values.end());
  }
  if (spec.lo) s.lo = *spec.lo;
  if (spec.hi) s.hi = *spec.hi;
  return s;
}

}  // namespace

std::string render_svg(const Network& net, const RenderSpec& spec, const RenderData& data) {
  const int n = net.node_count();
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  if (n > 0) {
    x0 = x1 = net.node(0).position.x();
    y0 = y1 = net.node(0).position.y();
    for (const auto& node : net.nodes()) {
      x0 = std::min(x0, node.position.x());
      x1 = std::max(x1, node.position.x());
      y0 = std::min(y0, node.position.y());
      y1 = std::max(y1, node.position.y());
    }
  }
  const double pad = 1.0;
  const double s = spec.scale;
  auto px = [&](double x) { return (x - x0 + pad) * s; };
  auto py = [&](double y) { return (y1 - y + pad) * s; };  // y up
  const double width = (x1 - x0 + 2 * pad) * s;
  const double height = (y1 - y0 + 2 * pad) * s;

  const Mode* mode = nullptr;
  if (spec.overlay == Overlay::mode) {
    if (spec.mode >= data.basis.dimension()) {
      throw Error("bad-overlay", "mode " + std::to_string(spec.mode) + " not in basis of " +
                                     std::to_string(data.basis.dimension()));
    }
    mode = &data.basis.modes[spec.mode];
    if (mode->vector.size() != net.coordinate_count()) throw Error("bad-overlay", "basis does not match network");
  }
  if (spec.overlay == Overlay::globality && static_cast<int>(data.node_values.size()) != n) {
    throw Error("bad-overlay", "globality overlay needs one value per node");
  }
  if (spec.overlay == Overlay::extensions && static_cast<int>(data.edge_values.size()) != net.edge_count()) {
    throw Error("bad-overlay", "extension overlay needs one value per edge");
  }
  const Scale node_scale = make_scale(data.node_values, spec);
  const Scale edge_scale = make_scale(data.edge_values, spec);
  std::set<EdgeKey> highlighted(data.highlighted.begin(), data.highlighted.end());

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (mode) {
    out += "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
           "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#2a9d3a\"/></marker></defs>\n";
  }

  out += "<g id=\"edges\" stroke-linecap=\"round\">\n";
  for (int i = 0; i < net.edge_count(); ++i) {
    const Edge& e = net.edge(i);
    std::string color = "#555555";
    double w = 2.0;
    if (spec.overlay == Overlay::extensions) {
      color = gradient(edge_scale(data.edge_values[i]));
      w = 3.0;
    } else if (spec.overlay == Overlay::prediction) {
      const bool on = highlighted.count(e.a < e.b ? EdgeKey{e.a, e.b} : EdgeKey{e.b, e.a}) != 0;
      color = on ? gradient(1.0) : gradient(0.0);
      w = on ? 4.0 : 2.0;
    }
    const Vec2& a = net.node(e.a).position;
    const Vec2& b = net.node(e.b).position;
    out += "<line x1=\"" + num(px(a.x())) + "\" y1=\"" + num(py(a.y())) + "\" x2=\"" + num(px(b.x())) + "\" y2=\"" +
           num(py(b.y())) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(w) + "\"/>\n";
  }
  out += "</g>\n<g id=\"nodes\">\n";
  for (const auto& node : net.nodes()) {
    std::string fill = node.fixed ? "#1f4e9c" : "#ffffff";
    if (spec.overlay == Overlay::globality && !node.fixed) fill = gradient(node_scale(data.node_values[node.id]));
    out += "<circle cx=\"" + num(px(node.position.x())) + "\" cy=\"" + num(py(node.position.y())) +
           "\" r=\"6.000\" fill=\"" + fill + "\" stroke=\"#222222\" stroke-width=\"1.500\"/>\n";
  }
  out += "</g>\n";

  if (mode) {
    double peak = 0.0;
    for (int i : mode->node_support) peak = std::max(peak, mode->vector.segment<2>(2 * i).norm());
    const double len = peak > 0 ? 0.8 / peak : 0.0;  // longest arrow 0.8 length units
    out += "<g id=\"mode\" stroke=\"#2a9d3a\" stroke-width=\"2.500\">\n";
    for (int i : mode->node_support) {
      const Vec2 p = net.node(i).position;
      const Vec2 q = p + len * mode->vector.segment<2>(2 * i);
      out += "<line x1=\"" + num(px(p.x())) + "\" y1=\"" + num(py(p.y())) + "\" x2=\"" + num(px(q.x())) + "\" y2=\"" +
             num(py(q.y())) + "\" marker-end=\"url(#head)\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace floppy
