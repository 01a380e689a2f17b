#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "floppy/control.hpp"
#include "floppy/error.hpp"
#include "floppy/experiments.hpp"
#include "floppy/io.hpp"
#include "floppy/loadpredict.hpp"
#include "floppy/multiscale.hpp"
#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/render.hpp"
#include "floppy/rigidify.hpp"
#include "floppy/rigidity.hpp"
#include "floppy/springsim.hpp"

using namespace floppy;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

// Bad option values are usage errors, not domain errors.
template <typename F>
auto option_value(F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw Usage(e.what());
  }
}

BasisMethod parse_method(const std::string& s) {
  if (s == "snd") return BasisMethod::snd;
  if (s == "svd") return BasisMethod::svd;
  if (s == "multiscale") return BasisMethod::multiscale;
  throw Usage("unknown method '" + s + "'");
}

ModeBasis decompose(const Network& net, BasisMethod method, std::uint64_t seed) {
  switch (method) {
    case BasisMethod::svd: return svd_basis(build_rigidity(net));
    case BasisMethod::multiscale: {
      MultiscaleOptions opts;
      opts.seed = seed;
      return multiscale_basis(net, opts);
    }
    default: return snd_basis(build_rigidity(net), seed);
  }
}

Network require_network(const std::string& path) {
  if (path.empty()) throw Usage("--in is required");
  return load_network(path);
}

// ---- generate

struct GenerateArgs {
  std::string kind = "triangular_lattice";
  std::string boundary;
  int nx = 4, ny = 4;
  double keep = 1.0;
  int dof = -1;
  int particles = 90;
  int target_dof = 18;
};

void cmd_generate(const Globals& g, const GenerateArgs& a) {
  GeneratorSpec spec;
  spec.kind = option_value([&] { return parse_generator_kind(a.kind); });
  spec.nx = a.nx;
  spec.ny = a.ny;
  spec.dilution_fraction = a.keep;
  spec.seed = g.seed;
  spec.particles = a.particles;
  spec.target_dof = a.target_dof;
  spec.boundary = spec.kind == GeneratorKind::bidisperse_packing ? Boundary::fixed_circle : Boundary::open;
  if (!a.boundary.empty()) spec.boundary = option_value([&] { return parse_boundary(a.boundary); });
  Network net;
  if (spec.kind == GeneratorKind::triangular_lattice && a.dof >= 0) {
    net = generate_triangular_with_dof(a.nx, a.ny, a.dof, g.seed,
                                       a.boundary.empty() ? Boundary::fixed_rows : spec.boundary);
  } else {
    net = generate(spec);
  }
  emit(g, dump(network_to_json(net)));
}

// ---- decompose

struct DecomposeArgs {
  std::string in;
  std::string method = "snd";
  int ensemble = 1;
};

void cmd_decompose(const Globals& g, const DecomposeArgs& a) {
  const Network net = require_network(a.in);
  const BasisMethod method = parse_method(a.method);
  if (a.ensemble < 1) throw Usage("--ensemble must be >= 1");
  if (a.ensemble == 1) {
    emit(g, dump(basis_to_json(decompose(net, method, g.seed))));
    return;
  }
  const auto seeds = ensemble_seeds(g.seed, a.ensemble);
  std::vector<ModeBasis> runs(seeds.size());
  const long m = static_cast<long>(seeds.size());
  std::vector<std::string> errors(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      runs[i] = decompose(net, method, seeds[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("decompose-failed", e);
  }
  Json j;
  j["method"] = a.method;
  j["dof"] = dof(build_rigidity(net));
  j["runs"] = Json::array();
  double mean = 0.0;
  for (const auto& b : runs) {
    j["runs"].push_back(basis_to_json(b));
    mean += b.participation();
  }
  j["mean_participation"] = mean / m;
  emit(g, dump(j));
}

// ---- control

struct ControlArgs {
  std::string task = "grasp";
  std::string in;
  std::string method = "snd";
  int count = 1;
  std::string csv;
};

void cmd_control(const Globals& g, const ControlArgs& a) {
  const BasisMethod method = parse_method(a.method);
  if (a.count < 1) throw Usage("--count must be >= 1");
  std::vector<ControlTask> tasks;
  Network net;
  if (a.task == "reach") net = require_network(a.in);
  for (int i = 0; i < a.count; ++i) {
    const std::uint64_t s = a.count == 1 ? g.seed : derive_seed(g.seed, static_cast<std::uint64_t>(i));
    if (a.task == "grasp") {
      tasks.push_back(grasping_task(s, method));
    } else if (a.task == "reach") {
      tasks.push_back(reaching_task(net, s, method));
    } else {
      throw Usage("unknown task '" + a.task + "'");
    }
  }
  const auto traces = run_tasks(tasks);
  Json j;
  j["task"] = a.task;
  j["method"] = a.method;
  j["traces"] = Json::array();
  for (const auto& t : traces) j["traces"].push_back(trace_to_json(t));
  emit(g, dump(j));
  if (!a.csv.empty()) {
    std::ostringstream os;
    write_trace_csv(os, traces.front());
    write_text_file(a.csv, os.str());
  }
}

// ---- rigidify

struct RigidifyArgs {
  std::string in;
  std::string protocol = "ms";
  int stop_at = 100;
  int steps = 20000;
};

void cmd_rigidify(const Globals& g, const RigidifyArgs& a) {
  const Network net = require_network(a.in);
  SimConfig sim;
  sim.steps = a.steps;
  sim.seed = g.seed;
  const TuningRun run = tune(net, option_value([&] { return parse_protocol(a.protocol); }), g.seed, a.stop_at, sim);
  std::ostringstream os;
  write_tuning_csv(os, run);
  emit(g, os.str());
}

// ---- simulate

struct SimulateArgs {
  std::string in;
  std::string protocol = "shear";
  int steps = 20000;
  double dt = 0.05;
  double noise = 1e-4;
  double gamma = 0.08;
  double stretch = 0.10;
  double k = 1.0;
};

void cmd_simulate(const Globals& g, const SimulateArgs& a) {
  const Network net = require_network(a.in);
  SimConfig cfg;
  cfg.steps = a.steps;
  cfg.dt = a.dt;
  cfg.noise_amplitude = a.noise;
  cfg.strain = a.gamma;
  cfg.stretch = a.stretch;
  cfg.stiffness = a.k;
  cfg.seed = g.seed;
  SimResult r;
  if (a.protocol == "shear") {
    cfg.protocol = SimProtocol::shear_top_row;
    r = shear_modulus(net, cfg);
  } else if (a.protocol == "radial") {
    cfg.protocol = SimProtocol::radial_stretch;
    r = radial_stretch(net, cfg);
  } else if (a.protocol == "none") {
    r = relax(net, cfg);
  } else {
    throw Usage("unknown protocol '" + a.protocol + "'");
  }
  emit(g, dump(sim_result_to_json(r)));
}

// ---- predict

struct PredictArgs {
  std::string in;
  int m = 100;
  double t = 12.0;
  bool all_ties = false;
  std::string extensions;
  std::string sweep_csv;
  int steps = 20000;
};

std::vector<EdgeExtension> measured_extensions(const Network& net, const std::string& csv, int steps,
                                               std::uint64_t seed) {
  if (!csv.empty()) {
    std::ifstream in(csv);
    if (!in) throw Error("io", "cannot open " + csv);
    return read_extensions_csv(in, net);
  }
  SimConfig cfg;
  cfg.steps = steps;
  cfg.seed = seed;
  return radial_stretch(net, cfg).per_edge;
}

void cmd_predict(const Globals& g, const PredictArgs& a) {
  const Network net = require_network(a.in);
  const GlobalityMap gm = globality(net, a.m, g.seed);
  const Prediction p = predict_loaded_edges(net, gm, a.t, a.all_ties);
  const auto ext = measured_extensions(net, a.extensions, a.steps, g.seed);
  const Sweep sweep = threshold_sweep(net, p.predicted_edges, ext, breakpoint_grid(ext));
  const PredictionReport best = score(net, p.predicted_edges, ext, sweep.points[sweep.best].e);
  Json j = prediction_to_json(p, &best);
  j["globality"] = globality_to_json(gm);
  j["params"]["m"] = a.m;
  emit(g, dump(j));
  if (!a.sweep_csv.empty()) {
    std::ostringstream os;
    write_sweep_csv(os, sweep);
    write_text_file(a.sweep_csv, os.str());
  }
  if (!p.warning.empty()) std::cerr << "warning: " << p.warning << "\n";
}

// ---- render

struct RenderArgs {
  std::string in;
  std::string overlay = "none";
  std::string data;  // basis / simulate / predict JSON matching the overlay
  std::string method = "snd";
  int m = 100;
  double lo = NAN, hi = NAN;
};

void cmd_render(const Globals& g, const RenderArgs& a) {
  const Network net = require_network(a.in);
  RenderSpec spec = option_value([&] { return parse_overlay(a.overlay); });
  if (!std::isnan(a.lo)) spec.lo = a.lo;
  if (!std::isnan(a.hi)) spec.hi = a.hi;
  RenderData data;
  switch (spec.overlay) {
    case Overlay::mode:
      data.basis = a.data.empty() ? decompose(net, parse_method(a.method), g.seed)
                                  : basis_from_json(read_json_file(a.data), net.coordinate_count());
      break;
    case Overlay::globality:
      if (a.data.empty()) {
        data.node_values = globality(net, a.m, g.seed).f;
      } else {
        const Json j = read_json_file(a.data);
        const Json& gj = j.contains("globality") ? j["globality"] : j;
        data.node_values = gj.at("f").get<std::vector<double>>();
      }
      break;
    case Overlay::extensions: {
      std::vector<EdgeExtension> ext;
      if (a.data.empty()) {
        SimConfig cfg;
        cfg.seed = g.seed;
        ext = radial_stretch(net, cfg).per_edge;
        for (const auto& e : ext) data.edge_values.push_back(std::abs(e.scaled));
      } else {
        for (const auto& e : read_json_file(a.data).at("per_edge")) {
          data.edge_values.push_back(std::abs(e.at("scaled_extension").get<double>()));
        }
      }
      break;
    }
    case Overlay::prediction:
      if (a.data.empty()) {
        data.highlighted = predict_loaded_edges(net, globality(net, a.m, g.seed), 12.0).predicted_edges;
      } else {
        for (const auto& e : read_json_file(a.data).at("predicted_edges")) {
          data.highlighted.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
      }
      break;
    case Overlay::none: break;
  }
  emit(g, render_svg(net, spec, data));
}

// ---- compare

struct CompareArgs {
  std::string experiment = "participation";
  std::string in;
  int count = 100;
};

void cmd_compare(const Globals& g, const CompareArgs& a) {
  Json j;
  j["experiment"] = a.experiment;
  j["seed"] = g.seed;
  if (a.experiment == "participation") {
    const auto c = compare_participation(require_network(a.in), a.count, g.seed);
    j["shuffles"] = a.count;
    j["mean_P_snd"] = c.mean_snd;
    j["mean_P_svd"] = c.mean_svd;
    j["snd_smaller"] = c.snd_smaller;
    j["ties"] = c.ties;
    j["p_value"] = c.p_value;
  } else if (a.experiment == "involvement") {
    const auto c = compare_involvement(require_network(a.in), g.seed);
    j["mean_Q_snd"] = c.mean_snd;
    j["mean_Q_svd"] = c.mean_svd;
    j["mean_Q_multiscale"] = c.mean_multiscale;
    j["movable_nodes"] = c.movable_nodes;
  } else if (a.experiment == "reaching") {
    const auto c = compare_reaching(require_network(a.in), a.count, g.seed);
    j["pairs"] = c.pairs;
    j["snd_wins"] = c.snd_wins;
    j["snd_win_fraction"] = c.fraction();
    j["snd_successes"] = c.snd_successes;
    j["svd_successes"] = c.svd_successes;
  } else if (a.experiment == "grasping") {
    for (auto method : {BasisMethod::snd, BasisMethod::svd, BasisMethod::multiscale}) {
      const auto s = grasping_activation(a.count, g.seed, method);
      Json m;
      m["tasks"] = s.tasks;
      m["successes"] = s.successes;
      m["mean_first_activation"] = Json::array();
      for (double v : s.mean_first) m["mean_first_activation"].push_back(std::isnan(v) ? Json(nullptr) : Json(v));
      m["activated_tasks"] = s.counts;
      j[to_string(method)] = m;
    }
  } else {
    throw Usage("unknown experiment '" + a.experiment + "'");
  }
  emit(g, dump(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floppy-mode analysis, control and rigidification of mechanical networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--jobs", g.jobs, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Output file (default stdout)");

  GenerateArgs gen;
  auto* s_gen = app.add_subcommand("generate", "Generate a network");
  s_gen->add_option("--kind", gen.kind, "triangular_lattice|bidisperse_packing|robot_arm|molecule_fixture");
  s_gen->add_option("--nx", gen.nx)->check(CLI::PositiveNumber);
  s_gen->add_option("--ny", gen.ny)->check(CLI::PositiveNumber);
  s_gen->add_option("--keep", gen.keep, "Fraction of lattice edges kept")->check(CLI::Range(0.0, 1.0));
  s_gen->add_option("--dof", gen.dof, "Dilute the lattice to this many floppy modes");
  s_gen->add_option("--boundary", gen.boundary, "open|fixed_circle|fixed_rows");
  s_gen->add_option("--particles", gen.particles)->check(CLI::PositiveNumber);
  s_gen->add_option("--target-dof", gen.target_dof, "Packing DoF after dilution");

  DecomposeArgs dec;
  auto* s_dec = app.add_subcommand("decompose", "Floppy-mode basis");
  s_dec->add_option("--in", dec.in, "Network JSON");
  s_dec->add_option("--method", dec.method, "snd|svd|multiscale");
  s_dec->add_option("--ensemble", dec.ensemble, "Number of shuffled runs");

  ControlArgs ctl;
  auto* s_ctl = app.add_subcommand("control", "Greedy mode-stepping control");
  s_ctl->add_option("--task", ctl.task, "grasp|reach");
  s_ctl->add_option("--in", ctl.in, "Network JSON (reach)");
  s_ctl->add_option("--method", ctl.method, "snd|svd|multiscale");
  s_ctl->add_option("--count", ctl.count, "Number of randomized tasks");
  s_ctl->add_option("--csv", ctl.csv, "Trace CSV of the first task");

  RigidifyArgs rig;
  auto* s_rig = app.add_subcommand("rigidify", "Sequential link addition");
  s_rig->add_option("--in", rig.in, "Lattice JSON");
  s_rig->add_option("--protocol", rig.protocol, "ms|random");
  s_rig->add_option("--stop-at", rig.stop_at, "Number of links to add")->check(CLI::NonNegativeNumber);
  s_rig->add_option("--steps", rig.steps, "Relaxation steps per G measurement")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Overdamped spring relaxation");
  s_sim->add_option("--in", sim.in, "Network JSON");
  s_sim->add_option("--protocol", sim.protocol, "shear|radial|none");
  s_sim->add_option("--steps", sim.steps)->check(CLI::PositiveNumber);
  s_sim->add_option("--dt", sim.dt)->check(CLI::PositiveNumber);
  s_sim->add_option("--noise", sim.noise)->check(CLI::NonNegativeNumber);
  s_sim->add_option("--gamma", sim.gamma, "Shear strain");
  s_sim->add_option("--stretch", sim.stretch, "Radial stretch fraction");
  s_sim->add_option("--k", sim.k, "Spring stiffness")->check(CLI::PositiveNumber);

  PredictArgs pre;
  auto* s_pre = app.add_subcommand("predict", "Load-bearing edge prediction");
  s_pre->add_option("--in", pre.in, "Network JSON with fixed boundary");
  s_pre->add_option("--m", pre.m, "Ensemble size")->check(CLI::PositiveNumber);
  s_pre->add_option("-t,--threshold", pre.t, "Globality threshold");
  s_pre->add_flag("--all-ties", pre.all_ties, "Mark every tied shortest path");
  s_pre->add_option("--extensions", pre.extensions, "CSV edge_a,edge_b,extension (default: simulate)");
  s_pre->add_option("--sweep-csv", pre.sweep_csv, "Write the e sweep");
  s_pre->add_option("--steps", pre.steps)->check(CLI::PositiveNumber);

  RenderArgs ren;
  auto* s_ren = app.add_subcommand("render", "SVG rendering");
  s_ren->add_option("--in", ren.in, "Network JSON");
  s_ren->add_option("--overlay", ren.overlay, "none|mode:k|globality|extensions|prediction");
  s_ren->add_option("--data", ren.data, "Basis, simulate or predict JSON for the overlay");
  s_ren->add_option("--method", ren.method, "Basis method when --data is absent");
  s_ren->add_option("--m", ren.m, "Ensemble size when --data is absent");
  s_ren->add_option("--lo", ren.lo, "Color scale minimum");
  s_ren->add_option("--hi", ren.hi, "Color scale maximum");

  CompareArgs cmp;
  auto* s_cmp = app.add_subcommand("compare", "Paired SND/SVD experiments");
  s_cmp->add_option("--experiment", cmp.experiment, "participation|involvement|reaching|grasping");
  s_cmp->add_option("--in", cmp.in, "Network JSON");
  s_cmp->add_option("--count", cmp.count, "Shuffles or tasks")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (g.jobs > 0) omp_set_num_threads(g.jobs);

  try {
    if (*s_gen) cmd_generate(g, gen);
    if (*s_dec) cmd_decompose(g, dec);
    if (*s_ctl) cmd_control(g, ctl);
    if (*s_rig) cmd_rigidify(g, rig);
    if (*s_sim) cmd_simulate(g, sim);
    if (*s_pre) cmd_predict(g, pre);
    if (*s_ren) cmd_render(g, ren);
    if (*s_cmp) cmd_compare(g, cmp);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
