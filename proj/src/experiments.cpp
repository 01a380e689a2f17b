#include "floppy/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "floppy/error.hpp"
#include "floppy/multiscale.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/random.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

double sign_test_p(int wins, int trials) {
  if (trials <= 0) return 1.0;
  // Sum of C(n, k) / 2^n for k >= wins, in log space.
  double p = 0.0;
  for (int k = std::max(wins, 0); k <= trials; ++k) {
    const double logc = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
    p += std::exp(logc - trials * std::log(2.0));
  }
  return std::min(p, 1.0);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ParticipationComparison compare_participation(const Network& net, int shuffles, std::uint64_t seed) {
  const RigidityMatrix r = build_rigidity(net);
  const auto seeds = ensemble_seeds(seed, shuffles);
  ParticipationComparison out;
  out.snd.resize(seeds.size());
  out.svd.resize(seeds.size());
  const long m = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    const RigidityMatrix shuffled = shuffle_rows(r, seeds[i]);
    out.snd[i] = snd_basis(shuffled).participation();
    out.svd[i] = svd_basis(shuffled).participation();
  }
  int decided = 0;
  for (long i = 0; i < m; ++i) {
    out.mean_snd += out.snd[i];
    out.mean_svd += out.svd[i];
    if (out.snd[i] == out.svd[i]) {
      ++out.ties;
    } else {
      ++decided;
      if (out.snd[i] < out.svd[i]) ++out.snd_smaller;
    }
  }
  if (m > 0) {
    out.mean_snd /= m;
    out.mean_svd /= m;
  }
  out.p_value = sign_test_p(out.snd_smaller, decided);
  return out;
}

InvolvementComparison compare_involvement(const Network& net, std::uint64_t seed) {
  const RigidityMatrix r = build_rigidity(net);
  const int n = net.node_count();
  const auto q_snd = involvement(snd_basis(r, seed), n);
  const auto q_svd = involvement(svd_basis(r), n);
  MultiscaleOptions opts;
  opts.seed = seed;
  const auto q_ms = involvement(multiscale_basis(net, opts), n);
  InvolvementComparison out;
  for (int i = 0; i < n; ++i) {
    if (q_svd[i] == 0 && q_snd[i] == 0) continue;
    ++out.movable_nodes;
    out.mean_snd += q_snd[i];
    out.mean_svd += q_svd[i];
    out.mean_multiscale += q_ms[i];
  }
  if (out.movable_nodes > 0) {
    out.mean_snd /= out.movable_nodes;
    out.mean_svd /= out.movable_nodes;
    out.mean_multiscale /= out.movable_nodes;
  }
  return out;
}

ActivationSummary grasping_activation(int tasks, std::uint64_t seed, BasisMethod method) {
  std::vector<ControlTask> batch;
  for (int i = 0; i < tasks; ++i) batch.push_back(grasping_task(derive_seed(seed, static_cast<std::uint64_t>(i)), method));
  const auto traces = run_tasks(batch);

  ActivationSummary out;
  out.tasks = tasks;
  std::vector<double> sum;
  for (const auto& tr : traces) {
    out.successes += tr.success;
    std::vector<int> order(tr.canonical_sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return tr.canonical_sizes[a] > tr.canonical_sizes[b]; });
    if (sum.size() < order.size()) {
      sum.resize(order.size(), 0.0);
      out.counts.resize(order.size(), 0);
    }
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      const auto& times = tr.activation_times[order[rank]];
      if (times.empty()) continue;
      sum[rank] += times.front();
      ++out.counts[rank];
    }
  }
  out.mean_first.resize(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    out.mean_first[k] = out.counts[k] ? sum[k] / out.counts[k] : std::nan("");
  }
  return out;
}

ReachingComparison compare_reaching(const Network& net, int tasks, std::uint64_t seed) {
  std::vector<ControlTask> batch;
  for (int i = 0; i < tasks; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    batch.push_back(reaching_task(net, s, BasisMethod::snd));
    batch.push_back(reaching_task(net, s, BasisMethod::svd));
  }
  const auto traces = run_tasks(batch);
  ReachingComparison out;
  for (int i = 0; i < tasks; ++i) {
    const ControlTrace& a = traces[2 * i];
    const ControlTrace& b = traces[2 * i + 1];
    ++out.pairs;
    out.snd_successes += a.success;
    out.svd_successes += b.success;
    out.snd_energy.push_back(a.total_energy);
    out.svd_energy.push_back(b.total_energy);
    if (a.success && (!b.success || a.total_energy < b.total_energy)) ++out.snd_wins;
  }
  return out;
}

bool SingleLinkTrial::ms_wins() const {
  if (effects.empty()) return false;
  for (std::size_t i = 1; i < effects.size(); ++i) {
    if (effects[i].delta >= effects[0].delta) return false;
  }
  return true;
}

SingleLinkTrial single_link_trial(const Network& lattice, int random_count, std::uint64_t seed, const SimConfig& sim) {
  SingleLinkTrial trial;
  Rng rng(seed);
  trial.ms = ms_select_link(lattice, rng);
  std::vector<Link> pool;
  for (const auto& link : candidate_links(lattice)) {
    if (link == trial.ms) continue;
    if (lattice.node(link.first).fixed && lattice.node(link.second).fixed) continue;
    pool.push_back(link);
  }
  rng.shuffle(pool);
  pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(std::max(random_count, 0))));
  trial.random = pool;
  std::vector<Link> all{trial.ms};
  all.insert(all.end(), pool.begin(), pool.end());
  trial.effects = single_link_experiment(lattice, all, sim, &trial.baseline);
  return trial;
}

TuningComparison compare_tuning(const std::vector<Network>& starts, const std::vector<std::uint64_t>& seeds,
                                int stop_at, const SimConfig& sim) {
  if (starts.size() != seeds.size()) throw Error("bad-batch", "one seed per start network required");
  const long n = static_cast<long>(starts.size());
  TuningComparison out;
  out.ms.resize(starts.size());
  out.random.resize(starts.size());
  std::vector<std::exception_ptr> errors(2 * starts.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < 2 * n; ++k) {
    const long i = k / 2;
    SimConfig cfg = sim;
    cfg.seed = seeds[i];
    try {
      if (k % 2 == 0) {
        out.ms[i] = tune(starts[i], TuneProtocol::ms, seeds[i], stop_at, cfg);
      } else {
        out.random[i] = tune(starts[i], TuneProtocol::random, seeds[i], stop_at, cfg);
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (starts.empty()) return out;
  std::size_t len = out.ms[0].g_curve.size();
  for (long i = 0; i < n; ++i) {
    len = std::min({len, out.ms[i].g_curve.size(), out.random[i].g_curve.size()});
  }
  for (std::size_t k = 0; k < len; ++k) {
    std::vector<double> a, b;
    for (long i = 0; i < n; ++i) {
      a.push_back(out.ms[i].g_curve[k].shear_modulus);
      b.push_back(out.random[i].g_curve[k].shear_modulus);
    }
    out.edge_counts.push_back(out.ms[0].g_curve[k].edge_count);
    out.median_ms.push_back(median(a));
    out.median_random.push_back(median(b));
  }
  return out;
}

}  // namespace floppy
