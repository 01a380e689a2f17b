#pragma once

#include <cstdint>
#include <vector>

#include "floppy/control.hpp"
#include "floppy/network.hpp"
#include "floppy/rigidify.hpp"

namespace floppy {

// One-sided exact sign test: P(X >= wins) for X ~ Binomial(trials, 1/2).
double sign_test_p(int wins, int trials);

double median(std::vector<double> v);

// Paired P over row shuffles: SND and SVD each on the same shuffled matrix.
struct ParticipationComparison {
  std::vector<int> snd, svd;
  double mean_snd = 0.0, mean_svd = 0.0;
  int snd_smaller = 0, ties = 0;
  double p_value = 1.0;  // sign test over non-tied pairs
};
ParticipationComparison compare_participation(const Network& net, int shuffles, std::uint64_t seed);

// Mean involvement Q over nodes that move in at least one mode.
struct InvolvementComparison {
  double mean_snd = 0.0, mean_svd = 0.0, mean_multiscale = 0.0;
  int movable_nodes = 0;
};
InvolvementComparison compare_involvement(const Network& net, std::uint64_t seed);

// Mean first-activation step of the canonical modes ranked by size
// (largest first); tasks where a rank never fires are left out of its mean.
struct ActivationSummary {
  std::vector<double> mean_first;
  std::vector<int> counts;
  int tasks = 0;
  int successes = 0;
};
ActivationSummary grasping_activation(int tasks, std::uint64_t seed, BasisMethod method);

// Paired reaching tasks: identical node, target and start for SND and SVD.
// An SND win needs SND to succeed and either SVD to fail or use less energy.
struct ReachingComparison {
  int pairs = 0;
  int snd_wins = 0;
  int snd_successes = 0, svd_successes = 0;
  std::vector<double> snd_energy, svd_energy;
  double fraction() const { return pairs ? static_cast<double>(snd_wins) / pairs : 0.0; }
};
ReachingComparison compare_reaching(const Network& net, int tasks, std::uint64_t seed);

// The MS link against `random_count` other candidates (no fixed-fixed
// pairs) drawn with `seed`; both protocols see the same simulation seed.
struct SingleLinkTrial {
  Link ms;
  std::vector<Link> random;
  std::vector<LinkEffect> effects;  // ms first
  double baseline = 0.0;
  bool ms_wins() const;
};
SingleLinkTrial single_link_trial(const Network& lattice, int random_count, std::uint64_t seed, const SimConfig& sim);

// Median G per link count across paired MS/random tuning runs.
struct TuningComparison {
  std::vector<int> edge_counts;
  std::vector<double> median_ms, median_random;
  std::vector<TuningRun> ms, random;
};
TuningComparison compare_tuning(const std::vector<Network>& starts, const std::vector<std::uint64_t>& seeds,
                                int stop_at, const SimConfig& sim);

}  // namespace floppy
