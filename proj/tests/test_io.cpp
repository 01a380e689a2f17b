#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "floppy/error.hpp"
#include "floppy/io.hpp"
#include "floppy/netgen.hpp"

using namespace floppy;

namespace {

std::string message_of(auto&& fn, std::string* code = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("network round trip is exact") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::bidisperse_packing;
  spec.particles = 40;
  spec.target_dof = 8;
  spec.seed = 5;
  for (const Network& net : {generate_triangular_with_dof(5, 5, 6, 291), generate(spec), fixture(GeneratorKind::molecule_fixture)}) {
    const std::string text = dump(network_to_json(net));
    const Network back = network_from_json(Json::parse(text));
    CHECK(back == net);
    CHECK(dump(network_to_json(back)) == text);
  }
}

TEST_CASE("dump format") {
  const std::string text = dump(Json{{"b", 1}, {"a", 0.1}});
  CHECK(text == "{\n  \"a\": 0.1,\n  \"b\": 1\n}\n");
}

TEST_CASE("schema errors name the field") {
  std::string code;
  Json j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["nodes"][3].erase("x");
  CHECK(message_of([&] { network_from_json(j); }, &code).find("missing field 'x' in nodes[3]") != std::string::npos);
  CHECK(code == "schema");

  j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["edges"][1]["b"] = "two";
  CHECK(message_of([&] { network_from_json(j); }, &code).find("'b' in edges[1]") != std::string::npos);

  j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["nodes"][2]["id"] = 7;
  message_of([&] { network_from_json(j); }, &code);
  CHECK(code == "schema");

  CHECK(!message_of([&] { network_from_json(Json::object()); }, &code).empty());
  CHECK(code == "schema");
}

TEST_CASE("structural errors keep their codes") {
  std::string code;
  Json j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["edges"].push_back({{"a", 1}, {"b", 1}});
  message_of([&] { network_from_json(j); }, &code);
  CHECK(code == "self-loop");
  j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["edges"].push_back({{"a", 1}, {"b", 0}});
  message_of([&] { network_from_json(j); }, &code);
  CHECK(code == "duplicate-edge");
  j = network_to_json(fixture(GeneratorKind::robot_arm));
  j["edges"].push_back({{"a", 1}, {"b", 12}});
  message_of([&] { network_from_json(j); }, &code);
  CHECK(code == "unknown-node");
}

TEST_CASE("rest lengths default to geometry") {
  const Json j = Json::parse(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":3,"y":4,"fixed":true}],
                                 "edges":[{"a":0,"b":1}]})");
  const Network net = network_from_json(j);
  CHECK(net.edge(0).rest_length == 5.0);
  CHECK(net.node(1).fixed);
  CHECK_FALSE(net.node(0).fixed);
}

TEST_CASE("basis round trip") {
  const Network net = generate_triangular_with_dof(5, 5, 6, 291);
  const ModeBasis basis = snd_basis(build_rigidity(net), 3);
  const Json j = basis_to_json(basis);
  CHECK(j["participation"] == basis.participation());
  const ModeBasis back = basis_from_json(Json::parse(dump(j)), net.coordinate_count());
  REQUIRE(back.dimension() == basis.dimension());
  CHECK(back.method == BasisMethod::snd);
  CHECK(back.seed == 3);
  for (int k = 0; k < basis.dimension(); ++k) {
    CHECK(back.modes[k].vector == basis.modes[k].vector);
    CHECK(back.modes[k].tag == basis.modes[k].tag);
  }
  CHECK_THROWS_AS(basis_from_json(j, 4), Error);
}

TEST_CASE("extension CSV") {
  Network net;
  net.add_node({-1, 0}, true);
  net.add_node({1, 0}, true);
  net.add_node({0, 1});
  net.add_edge(0, 2);
  net.add_edge(1, 2);
  std::istringstream in("edge_a,edge_b,extension\n0,2,0.5\n\n1,2,-0.25\n");
  const auto ext = read_extensions_csv(in, net);
  REQUIRE(ext.size() == 2);
  CHECK(ext[0].a == 0);
  CHECK(ext[1].extension == -0.25);
  CHECK(ext[0].scaled == doctest::Approx(0.25));
  std::istringstream bad("a,b,c\n");
  CHECK_THROWS_AS(read_extensions_csv(bad, net), Error);
  std::istringstream junk("edge_a,edge_b,extension\n0,x,1\n");
  CHECK_THROWS_AS(read_extensions_csv(junk, net), Error);
}

TEST_CASE("tuning CSV") {
  TuningRun run;
  run.link_sequence = {{1, 2}};
  run.g_curve = {{10, 0.0}, {11, 0.5}};
  std::ostringstream out;
  write_tuning_csv(out, run);
  CHECK(out.str() == "step,added_a,added_b,G\n0,,,0\n1,1,2,0.5\n");
}

TEST_CASE("trace CSV header") {
  ControlTrace tr;
  tr.steps.push_back({1, 0, -1, 0.5, 0.01, 0.02});
  std::ostringstream out;
  write_trace_csv(out, tr);
  CHECK(out.str().rfind("step,mode,sign,distance,energy,step_size\n1,0,-1,", 0) == 0);
}

TEST_CASE("file helpers") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/net.json"), Error);
  const std::string path = "io_roundtrip.json";
  const Network net = fixture(GeneratorKind::robot_arm);
  save_network(path, net);
  CHECK(load_network(path) == net);
  write_text_file(path, "{not json");
  std::string code;
  message_of([&] { load_network(path); }, &code);
  CHECK(code == "schema");
}
