#include "floppy/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "floppy/error.hpp"

namespace floppy {

namespace {

const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw Error("schema", where + " is not an object");
  const auto it = obj.find(name);
  if (it == obj.end()) throw Error("schema", "missing field '" + std::string(name) + "' in " + where);
  return *it;
}

double number(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_number()) throw Error("schema", "field '" + std::string(name) + "' in " + where + " must be a number");
  return v.get<double>();
}

int integer(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_number_integer()) throw Error("schema", "field '" + std::string(name) + "' in " + where + " must be an integer");
  return v.get<int>();
}

const Json& array(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_array()) throw Error("schema", "field '" + std::string(name) + "' in " + where + " must be an array");
  return v;
}

Json edge_keys(const std::vector<EdgeKey>& edges) {
  Json out = Json::array();
  for (const auto& [a, b] : edges) out.push_back({a, b});
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

Json network_to_json(const Network& net) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : net.nodes()) {
    j["nodes"].push_back({{"id", n.id}, {"x", n.position.x()}, {"y", n.position.y()}, {"fixed", n.fixed}});
  }
  j["edges"] = Json::array();
  for (const auto& e : net.edges()) {
    j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"rest_length", e.rest_length}});
  }
  j["metadata"] = Json::object();
  for (const auto& [k, v] : net.metadata()) j["metadata"][k] = v;
  return j;
}

Network network_from_json(const Json& j) {
  Network net;
  const Json& nodes = array(j, "nodes", "network");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const int id = integer(nodes[i], "id", where);
    if (id != static_cast<int>(i)) throw Error("schema", "field 'id' in " + where + " must equal its index");
    bool fixed = false;
    if (nodes[i].contains("fixed")) {
      if (!nodes[i]["fixed"].is_boolean()) throw Error("schema", "field 'fixed' in " + where + " must be a boolean");
      fixed = nodes[i]["fixed"].get<bool>();
    }
    net.add_node(Vec2(number(nodes[i], "x", where), number(nodes[i], "y", where)), fixed);
  }
  const Json& edges = array(j, "edges", "network");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const int a = integer(edges[i], "a", where);
    const int b = integer(edges[i], "b", where);
    std::optional<double> rest;
    if (edges[i].contains("rest_length")) rest = number(edges[i], "rest_length", where);
    net.add_edge(a, b, rest);
  }
  if (j.contains("metadata")) {
    const Json& md = j["metadata"];
    if (!md.is_object()) throw Error("schema", "field 'metadata' in network must be an object");
    for (const auto& [k, v] : md.items()) {
      net.metadata()[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return net;
}

Json basis_to_json(const ModeBasis& basis) {
  Json j;
  j["method"] = to_string(basis.method);
  j["seed"] = basis.seed;
  j["incomplete"] = basis.incomplete;
  j["participation"] = basis.participation();
  j["modes"] = Json::array();
  for (const auto& m : basis.modes) {
    Json entries = Json::array();
    for (int c : m.support) entries.push_back({c, m.vector(c)});
    j["modes"].push_back({{"size", m.size()}, {"tag", to_string(m.tag)}, {"nodes", m.node_support}, {"entries", entries}});
  }
  return j;
}

ModeBasis basis_from_json(const Json& j, int coordinate_count) {
  ModeBasis basis;
  const Json& method = field(j, "method", "basis");
  if (!method.is_string()) throw Error("schema", "field 'method' in basis must be a string");
  const std::string name = method.get<std::string>();
  if (name == "snd") {
    basis.method = BasisMethod::snd;
  } else if (name == "svd") {
    basis.method = BasisMethod::svd;
  } else if (name == "multiscale") {
    basis.method = BasisMethod::multiscale;
  } else {
    throw Error("schema", "unknown basis method '" + name + "'");
  }
  if (j.contains("seed")) basis.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("incomplete")) basis.incomplete = j["incomplete"].get<bool>();
  const Json& modes = array(j, "modes", "basis");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string where = "modes[" + std::to_string(i) + "]";
    Eigen::VectorXd v = Eigen::VectorXd::Zero(coordinate_count);
    for (const auto& e : array(modes[i], "entries", where)) {
      if (!e.is_array() || e.size() != 2) throw Error("schema", "entries in " + where + " must be [index, value] pairs");
      const int c = e[0].get<int>();
      if (c < 0 || c >= coordinate_count) throw Error("schema", "entry index out of range in " + where);
      v(c) = e[1].get<double>();
    }
    ModeTag tag = ModeTag::plain;
    if (modes[i].contains("tag")) {
      const std::string t = modes[i]["tag"].get<std::string>();
      if (t == "rotational") tag = ModeTag::rotational;
      if (t == "component_local") tag = ModeTag::component_local;
    }
    basis.modes.push_back(make_mode(v, 0.0, tag));
  }
  return basis;
}

Json sim_result_to_json(const SimResult& result) {
  Json j;
  j["E"] = result.energy;
  if (result.shear_modulus) j["G"] = *result.shear_modulus;
  j["noise_floor"] = result.noise_floor;
  j["per_edge"] = Json::array();
  for (const auto& e : result.per_edge) {
    j["per_edge"].push_back({{"a", e.a}, {"b", e.b}, {"extension", e.extension}, {"scaled_extension", e.scaled}});
  }
  j["positions"] = Json::array();
  for (Eigen::Index i = 0; i + 1 < result.positions.size(); i += 2) {
    j["positions"].push_back({result.positions(i), result.positions(i + 1)});
  }
  if (!result.energy_trace.empty()) j["energy_trace"] = result.energy_trace;
  return j;
}

Json globality_to_json(const GlobalityMap& g) {
  Json j;
  j["m"] = g.m;
  j["threshold"] = g.threshold;
  j["f"] = g.f;
  Json rigid = Json::array();
  for (std::size_t i = 0; i < g.rigid.size(); ++i) {
    if (g.rigid[i]) rigid.push_back(i);
  }
  j["rigid_nodes"] = rigid;
  return j;
}

Json prediction_to_json(const Prediction& p, const PredictionReport* report) {
  Json j;
  j["eligible_nodes"] = p.eligible_nodes;
  j["predicted_edges"] = edge_keys(p.predicted_edges);
  j["params"] = {{"t", p.threshold}, {"all_ties", p.all_ties}};
  if (!p.warning.empty()) j["warning"] = p.warning;
  if (report) {
    j["score"] = {{"e", report->e},     {"eta", report->eta}, {"n_b", report->n_b},
                  {"n_o", report->n_o}, {"n_t", report->n_t}, {"reference_edges", edge_keys(report->reference)}};
  }
  return j;
}

Json trace_to_json(const ControlTrace& trace) {
  Json j;
  j["success"] = trace.success;
  j["steps"] = trace.steps.size();
  j["initial_distance"] = trace.initial_distance;
  j["final_distance"] = trace.final_distance();
  j["total_energy"] = trace.total_energy;
  j["canonical_sizes"] = trace.canonical_sizes;
  j["recanonicalizations"] = trace.recanonicalizations;
  Json first = Json::array();
  for (const auto& times : trace.activation_times) {
    first.push_back(times.empty() ? Json(nullptr) : Json(times.front()));
  }
  j["first_activation"] = first;
  return j;
}

Json sweep_to_json(const Sweep& sweep) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : sweep.points) j["points"].push_back({{"e", p.e}, {"eta", p.eta}});
  if (!sweep.points.empty()) {
    j["best"] = {{"e", sweep.points[sweep.best].e}, {"eta", sweep.points[sweep.best].eta}};
  }
  return j;
}

void write_trace_csv(std::ostream& out, const ControlTrace& trace) {
  out << "step,mode,sign,distance,energy,step_size\n";
  out.precision(17);
  for (const auto& s : trace.steps) {
    out << s.step << ',' << s.mode_id << ',' << s.sign << ',' << s.distance << ',' << s.energy << ',' << s.step_size
        << '\n';
  }
}

void write_tuning_csv(std::ostream& out, const TuningRun& run) {
  out << "step,added_a,added_b,G\n";
  out.precision(17);
  for (std::size_t i = 0; i < run.g_curve.size(); ++i) {
    out << i << ',';
    if (i == 0) {
      out << ",,";
    } else {
      out << run.link_sequence[i - 1].first << ',' << run.link_sequence[i - 1].second << ',';
    }
    out << run.g_curve[i].shear_modulus << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const Sweep& sweep) {
  out << "e,eta\n";
  out.precision(17);
  for (const auto& p : sweep.points) out << p.e << ',' << p.eta << '\n';
}

std::vector<EdgeExtension> read_extensions_csv(std::istream& in, const Network& net) {
  std::string line;
  if (!std::getline(in, line)) throw Error("schema", "empty extension CSV");
  const auto header = split_csv(line);
  if (header != std::vector<std::string>{"edge_a", "edge_b", "extension"}) {
    throw Error("schema", "extension CSV header must be edge_a,edge_b,extension");
  }
  const double diameter = boundary_diameter(net);
  std::vector<EdgeExtension> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) throw Error("schema", "row " + std::to_string(row) + " needs 3 columns");
    try {
      EdgeExtension e;
      e.a = std::stoi(cells[0]);
      e.b = std::stoi(cells[1]);
      e.extension = std::stod(cells[2]);
      e.scaled = e.extension / diameter;
      out.push_back(e);
    } catch (const std::logic_error&) {
      throw Error("schema", "row " + std::to_string(row) + " is not numeric");
    }
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("schema", path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  out << text;
}

Network load_network(const std::string& path) { return network_from_json(read_json_file(path)); }

void save_network(const std::string& path, const Network& net) { write_text_file(path, dump(network_to_json(net))); }

}  // namespace floppy
