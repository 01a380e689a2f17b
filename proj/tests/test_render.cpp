#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floppy/error.hpp"
#include "floppy/netgen.hpp"
#include "floppy/render.hpp"

using namespace floppy;

namespace {

int count(const std::string& s, const std::string& what) {
  int n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("overlay parsing") {
  CHECK(parse_overlay("none").overlay == Overlay::none);
  const RenderSpec m = parse_overlay("mode:3");
  CHECK(m.overlay == Overlay::mode);
  CHECK(m.mode == 3);
  CHECK(parse_overlay("prediction").overlay == Overlay::prediction);
  CHECK_THROWS_AS(parse_overlay("mode:"), Error);
  CHECK_THROWS_AS(parse_overlay("mode:-1"), Error);
  CHECK_THROWS_AS(parse_overlay("mode:2x"), Error);
  CHECK_THROWS_AS(parse_overlay("heat"), Error);
}

TEST_CASE("plain drawing") {
  const Network net = fixture(GeneratorKind::robot_arm);
  const std::string svg = render_svg(net, {});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "<line") == 4);
  CHECK(count(svg, "<circle") == 5);
  CHECK(count(svg, "fill=\"#1f4e9c\"") == 1);
  CHECK(svg == render_svg(net, {}));
}

TEST_CASE("mode arrows") {
  const Network net = fixture(GeneratorKind::robot_arm);
  RenderData data;
  data.basis = snd_basis(build_rigidity(net));
  RenderSpec spec = parse_overlay("mode:3");
  const std::string svg = render_svg(net, spec, data);
  CHECK(svg.find("id=\"mode\"") != std::string::npos);
  CHECK(count(svg, "marker-end") == data.basis.modes[3].node_support.size());
  spec.mode = 9;
  CHECK_THROWS_AS(render_svg(net, spec, data), Error);
}

TEST_CASE("value overlays") {
  const Network net = fixture(GeneratorKind::robot_arm);
  RenderData data;
  data.edge_values = {0.0, 1.0, 0.5, 0.25};
  const std::string svg = render_svg(net, parse_overlay("extensions"), data);
  CHECK(svg.find("#1b1b3a") != std::string::npos);
  CHECK(svg.find("#ffd23f") != std::string::npos);
  data.edge_values.pop_back();
  CHECK_THROWS_AS(render_svg(net, parse_overlay("extensions"), data), Error);
  CHECK_THROWS_AS(render_svg(net, parse_overlay("globality"), data), Error);

  RenderData pred;
  pred.highlighted = {{1, 2}};
  const std::string p = render_svg(net, parse_overlay("prediction"), pred);
  CHECK(count(p, "stroke=\"#ffd23f\"") == 1);
}
