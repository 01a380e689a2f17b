#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "floppy/network.hpp"
#include "floppy/random.hpp"
#include "floppy/springsim.hpp"

namespace floppy {

enum class TuneProtocol { ms, random };

TuneProtocol parse_protocol(const std::string& name);
const char* to_string(TuneProtocol protocol);

using Link = std::pair<int, int>;

// Links that may be added: unused edges of the underlying full triangular
// lattice for lattice networks, otherwise unused pairs closer than 1.2x the
// mean edge length.
std::vector<Link> candidate_links(const Network& net);

// MS choice: SND basis, the largest mode, its node with the largest
// infinitesimal displacement, then a random unused nearest-neighbor link
// from that node (falling back to the next node when it has none).
// Throws "already-rigid" when dof = 0, "no-candidate-link" when exhausted.
Link ms_select_link(const Network& net, Rng& rng, std::uint64_t snd_seed = 0);

struct TuningPoint {
  int edge_count = 0;
  double shear_modulus = 0.0;
};

struct TuningRun {
  TuneProtocol protocol = TuneProtocol::ms;
  std::uint64_t seed = 0;
  std::vector<Link> link_sequence;
  std::vector<TuningPoint> g_curve;  // initial state plus one point per addition
  int ms_fallbacks = 0;              // MS additions made randomly once rigid
};

// Adds links one by one (up to `stop_at`, or until no candidate remains),
// measuring G after every addition. MS falls back to random choice once the
// network has no floppy mode left.
TuningRun tune(const Network& lattice, TuneProtocol protocol, std::uint64_t seed, int stop_at,
               const SimConfig& sim);

struct LinkEffect {
  Link link;
  double shear_modulus = 0.0;
  double delta = 0.0;  // versus the network without the link
};

// Each candidate added on its own, measured, and removed again. All runs
// share the simulation seed so the comparison is paired.
std::vector<LinkEffect> single_link_experiment(const Network& lattice, const std::vector<Link>& candidates,
                                               const SimConfig& sim, double* baseline = nullptr);

// Independent tuning runs over seeds, ordered by seed index.
std::vector<TuningRun> tune_batch(const std::vector<Network>& starts, TuneProtocol protocol,
                                  const std::vector<std::uint64_t>& seeds, int stop_at, const SimConfig& sim);
std::vector<TuningRun> tune_batch_serial(const std::vector<Network>& starts, TuneProtocol protocol,
                                         const std::vector<std::uint64_t>& seeds, int stop_at, const SimConfig& sim);

}  // namespace floppy
