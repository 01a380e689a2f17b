#include "floppy/rigidify.hpp"

#include <algorithm>
#include <exception>
#include <string>

#include "floppy/error.hpp"
#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

TuneProtocol parse_protocol(const std::string& name) {
  if (name == "ms") return TuneProtocol::ms;
  if (name == "random") return TuneProtocol::random;
  throw Error("bad-protocol", "unknown protocol '" + name + "'");
}

const char* to_string(TuneProtocol protocol) { return protocol == TuneProtocol::ms ? "ms" : "random"; }

namespace {

bool is_lattice(const Network& net) {
  const auto& md = net.metadata();
  return md.count("nx") != 0 && md.count("ny") != 0 &&
         std::stoi(md.at("nx")) * std::stoi(md.at("ny")) == net.node_count();
}

}  // namespace

std::vector<Link> candidate_links(const Network& net) {
  std::vector<Link> out;
  auto usable = [&](int a, int b) { return !net.has_edge(a, b); };
  if (is_lattice(net)) {
    for (const auto& [a, b] : triangular_lattice_edges(std::stoi(net.metadata().at("nx")),
                                                       std::stoi(net.metadata().at("ny")))) {
      if (usable(a, b)) out.emplace_back(a, b);
    }
    return out;
  }
  const double cutoff = 1.2 * net.mean_edge_length();
  for (int a = 0; a < net.node_count(); ++a) {
    for (int b = a + 1; b < net.node_count(); ++b) {
      if (usable(a, b) && (net.node(a).position - net.node(b).position).norm() < cutoff) out.emplace_back(a, b);
    }
  }
  return out;
}

Link ms_select_link(const Network& net, Rng& rng, std::uint64_t snd_seed) {
  const RigidityMatrix r = build_rigidity(net);
  const ModeBasis basis = snd_basis(r, snd_seed);
  if (basis.dimension() == 0) throw Error("already-rigid", "network has no floppy mode");

  auto node_disp = [](const Mode& m, int node) { return m.vector.segment<2>(2 * node).norm(); };
  auto peak = [&](const Mode& m) {
    double best = 0.0;
    for (int i : m.node_support) best = std::max(best, node_disp(m, i));
    return best;
  };
  const Mode* largest = &basis.modes.front();
  for (const auto& m : basis.modes) {
    if (m.size() > largest->size() || (m.size() == largest->size() && peak(m) > peak(*largest))) largest = &m;
  }

  std::vector<int> nodes;
  for (int i : largest->node_support) {
    if (!net.node(i).fixed) nodes.push_back(i);
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](int a, int b) { return node_disp(*largest, a) > node_disp(*largest, b); });

  const std::vector<Link> candidates = candidate_links(net);
  for (int node : nodes) {
    // Candidates from this node, restricted to its closest available partners.
    std::vector<Link> options;
    double closest = 0.0;
    for (const auto& link : candidates) {
      if (link.first != node && link.second != node) continue;
      if (net.node(link.first).fixed && net.node(link.second).fixed) continue;
      const int other = link.first == node ? link.second : link.first;
      const double d = (net.node(node).position - net.node(other).position).norm();
      if (options.empty() || d < closest - 1e-9) {
        options.assign(1, link);
        closest = d;
      } else if (d <= closest + 1e-9) {
        options.push_back(link);
      }
    }
    if (!options.empty()) return options[rng.index(options.size())];
  }
  throw Error("no-candidate-link", "no unused link at any node of the largest mode");
}

TuningRun tune(const Network& lattice, TuneProtocol protocol, std::uint64_t seed, int stop_at, const SimConfig& sim) {
  TuningRun run;
  run.protocol = protocol;
  run.seed = seed;
  Network net = lattice;
  Rng rng(seed);
  auto measure = [&](int step) {
    try {
      run.g_curve.push_back({net.edge_count(), *shear_modulus(net, sim).shear_modulus});
    } catch (const Error& e) {
      throw Error(e.code(), "tuning step " + std::to_string(step) + ": " + e.what());
    }
  };
  measure(0);
  for (int step = 1; step <= stop_at; ++step) {
    const std::vector<Link> candidates = candidate_links(net);
    if (candidates.empty()) break;
    Link link;
    bool chosen = false;
    if (protocol == TuneProtocol::ms) {
      try {
        link = ms_select_link(net, rng, derive_seed(seed, static_cast<std::uint64_t>(step)));
        chosen = true;
      } catch (const Error& e) {
        if (e.code() != "already-rigid" && e.code() != "no-candidate-link") throw;
        ++run.ms_fallbacks;
      }
    }
    if (!chosen) link = candidates[rng.index(candidates.size())];
    net.add_edge(link.first, link.second);
    run.link_sequence.push_back(link);
    measure(step);
  }
  return run;
}

std::vector<LinkEffect> single_link_experiment(const Network& lattice, const std::vector<Link>& candidates,
                                               const SimConfig& sim, double* baseline) {
  const double base = *shear_modulus(lattice, sim).shear_modulus;
  if (baseline) *baseline = base;
  std::vector<LinkEffect> out;
  Network net = lattice;
  for (const auto& link : candidates) {
    net.add_edge(link.first, link.second);
    const double g = *shear_modulus(net, sim).shear_modulus;
    net.remove_edge(link.first, link.second);
    out.push_back({link, g, g - base});
  }
  return out;
}

std::vector<TuningRun> tune_batch_serial(const std::vector<Network>& starts, TuneProtocol protocol,
                                         const std::vector<std::uint64_t>& seeds, int stop_at, const SimConfig& sim) {
  if (starts.size() != seeds.size()) throw Error("bad-batch", "one seed per start network required");
  std::vector<TuningRun> out;
  for (std::size_t i = 0; i < starts.size(); ++i) out.push_back(tune(starts[i], protocol, seeds[i], stop_at, sim));
  return out;
}

std::vector<TuningRun> tune_batch(const std::vector<Network>& starts, TuneProtocol protocol,
                                  const std::vector<std::uint64_t>& seeds, int stop_at, const SimConfig& sim) {
  if (starts.size() != seeds.size()) throw Error("bad-batch", "one seed per start network required");
  std::vector<TuningRun> out(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = tune(starts[i], protocol, seeds[i], stop_at, sim);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace floppy
