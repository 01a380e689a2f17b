#include "floppy/control.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "floppy/error.hpp"
#include "floppy/multiscale.hpp"
#include "floppy/random.hpp"
#include "floppy/rigidity.hpp"

namespace floppy {

double effector_distance(const Eigen::VectorXd& x, const std::vector<int>& effectors, const Vec2& target) {
  if (effectors.empty()) return 0.0;
  double sum = 0.0;
  for (int e : effectors) sum += (x.segment<2>(2 * e) - target).norm();
  return sum / static_cast<double>(effectors.size());
}

std::vector<int> match_modes(const ModeBasis& current, const ModeBasis& reference) {
  const int k = current.dimension();
  if (k != reference.dimension()) {
    throw Error("mode-count-mismatch", std::to_string(k) + " vs " + std::to_string(reference.dimension()) + " modes");
  }
  struct Pair {
    double cosine;
    int cur;
    int ref;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      pairs.push_back({std::abs(current.modes[i].vector.dot(reference.modes[j].vector)), i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.cosine > b.cosine; });
  std::vector<int> assigned(static_cast<std::size_t>(k), -1);
  std::vector<bool> taken(static_cast<std::size_t>(k), false);
  for (const auto& p : pairs) {
    if (assigned[p.cur] >= 0 || taken[p.ref]) continue;
    assigned[p.cur] = p.ref;
    taken[p.ref] = true;
  }
  return assigned;
}

Eigen::VectorXd project_to_manifold(const Network& net, Eigen::VectorXd x, double tol, int max_iterations) {
  std::vector<int> free_coords;
  std::vector<int> column(static_cast<std::size_t>(net.coordinate_count()), -1);
  for (const auto& node : net.nodes()) {
    if (node.fixed) continue;
    for (int axis = 0; axis < 2; ++axis) {
      column[2 * node.id + axis] = static_cast<int>(free_coords.size());
      free_coords.push_back(2 * node.id + axis);
    }
  }
  const int m = net.edge_count();
  if (m == 0 || free_coords.empty()) return x;

  Eigen::VectorXd g(m);
  Eigen::MatrixXd jac(m, static_cast<Eigen::Index>(free_coords.size()));
  for (int it = 0; it <= max_iterations; ++it) {
    double worst = 0.0;
    jac.setZero();
    for (int i = 0; i < m; ++i) {
      const Edge& e = net.edge(i);
      const Vec2 d = x.segment<2>(2 * e.a) - x.segment<2>(2 * e.b);
      const double len = d.norm();
      g(i) = len - e.rest_length;
      worst = std::max(worst, std::abs(g(i)) / e.rest_length);
      const Vec2 u = d / len;
      for (int axis = 0; axis < 2; ++axis) {
        if (column[2 * e.a + axis] >= 0) jac(i, column[2 * e.a + axis]) = u(axis);
        if (column[2 * e.b + axis] >= 0) jac(i, column[2 * e.b + axis]) = -u(axis);
      }
    }
    if (!std::isfinite(worst)) break;
    if (worst <= tol) return x;
    if (it == max_iterations) break;
    const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-g);
    for (std::size_t c = 0; c < free_coords.size(); ++c) x(free_coords[c]) += delta(static_cast<Eigen::Index>(c));
  }
  throw Error("manifold-projection-failed", "edge constraints not restored within " + std::to_string(max_iterations) +
                                                " Newton iterations");
}

ModeBasis compute_basis(const Network& net, BasisMethod method, std::uint64_t seed) {
  switch (method) {
    case BasisMethod::snd: return snd_basis(build_rigidity(net), seed);
    case BasisMethod::svd: return svd_basis(build_rigidity(net));
    case BasisMethod::multiscale: {
      MultiscaleOptions options;
      options.seed = seed;
      return multiscale_basis(net, options);
    }
  }
  throw Error("bad-method", "unknown basis method");
}

double max_node_displacement(const Eigen::VectorXd& v) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) worst = std::max(worst, v.segment<2>(i).norm());
  return worst;
}

namespace {

struct Candidate {
  double distance;
  int size;
  int canonical;
  int mode;
  int sign;
};

}  // namespace

ControlTrace run_task(const ControlTask& task) {
  if (!(task.tolerance > 0.0) || task.max_steps < 0) throw Error("bad-task", "tolerance > 0 and max_steps >= 0 required");
  for (int e : task.effectors) {
    if (task.network.node(e).fixed) throw Error("bad-task", "effector " + std::to_string(e) + " is fixed");
  }
  const double alpha0 = task.step_size > 0.0 ? task.step_size : 0.02 * task.network.mean_edge_length();

  Network net = task.network;
  Eigen::VectorXd x = net.coordinates();
  ControlTrace trace;
  trace.initial_distance = effector_distance(x, task.effectors, task.target);
  double distance = trace.initial_distance;

  ModeBasis reference = compute_basis(net, task.method, task.seed);
  auto reset_reference = [&](const ModeBasis& basis) {
    reference = basis;
    trace.activation_times.assign(static_cast<std::size_t>(basis.dimension()), {});
    trace.canonical_sizes.clear();
    for (const auto& m : basis.modes) trace.canonical_sizes.push_back(m.size());
  };
  reset_reference(reference);

  for (int step = 0; step < task.max_steps; ++step) {
    if (distance <= task.tolerance) break;
    ModeBasis basis = step == 0 ? reference : compute_basis(net, task.method, task.seed);
    if (basis.dimension() != reference.dimension()) {
      ++trace.recanonicalizations;
      reset_reference(basis);
    }
    if (basis.dimension() == 0) break;
    const std::vector<int> ids = match_modes(basis, reference);
    // Each primitive is scaled so its fastest node moves alpha.
    std::vector<Eigen::VectorXd> primitive;
    for (const auto& m : basis.modes) primitive.push_back(m.vector / max_node_displacement(m.vector));

    bool accepted = false;
    double alpha = alpha0;
    for (int halving = 0; halving <= task.max_halvings && !accepted; ++halving, alpha *= 0.5) {
      std::vector<Candidate> candidates;
      for (int j = 0; j < basis.dimension(); ++j) {
        for (int sign : {1, -1}) {
          const Eigen::VectorXd trial = x + sign * alpha * primitive[j];
          const double d = effector_distance(trial, task.effectors, task.target);
          if (d < distance) candidates.push_back({d, basis.modes[j].size(), ids[j], j, sign});
        }
      }
      std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.size != b.size) return a.size < b.size;
        return a.canonical < b.canonical;
      });
      for (const auto& c : candidates) {
        Eigen::VectorXd next;
        try {
          next = project_to_manifold(net, x + c.sign * alpha * primitive[c.mode]);
        } catch (const Error&) {
          continue;
        }
        const double d = effector_distance(next, task.effectors, task.target);
        if (!(d < distance)) continue;
        ControlStep record;
        record.step = step;
        record.mode_id = c.canonical;
        record.sign = c.sign;
        record.distance = d;
        record.step_size = alpha;
        for (const auto& node : net.nodes()) {
          record.energy += 0.5 * (next.segment<2>(2 * node.id) - x.segment<2>(2 * node.id)).squaredNorm();
        }
        trace.total_energy += record.energy;
        trace.activation_times[c.canonical].push_back(step);
        trace.steps.push_back(record);
        x = next;
        net.set_coordinates(x);
        distance = d;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  trace.success = distance <= task.tolerance;
  trace.final_positions = x;
  return trace;
}

std::vector<ControlTrace> run_tasks_serial(const std::vector<ControlTask>& tasks) {
  std::vector<ControlTrace> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(run_task(t));
  return out;
}

std::vector<ControlTrace> run_tasks(const std::vector<ControlTask>& tasks) {
  std::vector<ControlTrace> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_task(tasks[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

constexpr double kUpperArm = 1.3;
constexpr double kForearm = 1.0;
constexpr double kFinger = 0.45;

Vec2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

Network robot_arm_pose(double shoulder, double elbow, double finger_a, double finger_b) {
  Network net;
  const Vec2 s(0.0, 0.0);
  const Vec2 e = s + kUpperArm * direction(shoulder);
  const Vec2 w = e + kForearm * direction(shoulder + elbow);
  const int is = net.add_node(s, true);
  const int ie = net.add_node(e);
  const int iw = net.add_node(w);
  const int fa = net.add_node(w + kFinger * direction(shoulder + elbow + finger_a));
  const int fb = net.add_node(w + kFinger * direction(shoulder + elbow + finger_b));
  net.add_edge(is, ie);
  net.add_edge(ie, iw);
  net.add_edge(iw, fa);
  net.add_edge(iw, fb);
  net.metadata()["generator"] = "robot_arm";
  return net;
}

ControlTask grasping_task(std::uint64_t seed, BasisMethod method) {
  Rng rng(seed);
  const double pi = std::numbers::pi;
  ControlTask task;
  task.network = robot_arm_pose(rng.uniform(0.2, pi - 0.2), rng.uniform(-2.2, 2.2), rng.uniform(0.3, 0.9),
                                -rng.uniform(0.3, 0.9));
  task.effectors = {3, 4};
  // Both fingertips meet where a finger length away from some reachable wrist.
  const double reach = rng.uniform(0.5, 0.95) * (kUpperArm + kForearm);
  const Vec2 wrist = reach * direction(rng.uniform(0.2, pi - 0.2));
  task.target = wrist + kFinger * direction(rng.uniform(0.0, 2.0 * pi));
  task.tolerance = 0.05;
  task.max_steps = 3000;
  task.method = method;
  task.seed = seed;
  return task;
}

ControlTask reaching_task(const Network& net, std::uint64_t seed, BasisMethod method) {
  Rng rng(seed);
  ControlTask task;
  task.network = net;
  task.method = method;
  task.seed = seed;
  const double ell = net.mean_edge_length();
  task.tolerance = 0.01 * ell;
  task.max_steps = 3000;

  const ModeBasis null0 = svd_basis(build_rigidity(net));
  std::vector<int> movable;
  {
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(net.node_count());
    for (const auto& m : null0.modes) {
      for (int i = 0; i < net.node_count(); ++i) weight(i) += m.vector.segment<2>(2 * i).squaredNorm();
    }
    for (int i = 0; i < net.node_count(); ++i) {
      if (!net.node(i).fixed && weight(i) > 1e-6) movable.push_back(i);
    }
  }
  if (movable.empty()) throw Error("bad-task", "network has no floppy node");

  for (int attempt = 0; attempt < 100; ++attempt) {
    const int effector = movable[rng.index(movable.size())];
    // Follow a random floppy direction for a finite path length.
    Network moving = net;
    Eigen::VectorXd x = net.coordinates();
    Eigen::VectorXd coeff(null0.dimension());
    for (int j = 0; j < null0.dimension(); ++j) coeff(j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(x.size());
    for (int j = 0; j < null0.dimension(); ++j) dir += coeff(j) * null0.modes[j].vector;
    const int substeps = 20;
    const double path = rng.uniform(0.2, 0.5) * ell;
    bool ok = true;
    for (int s = 0; s < substeps && ok; ++s) {
      const ModeBasis local = svd_basis(build_rigidity(moving));
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(x.size());
      for (const auto& m : local.modes) proj += m.vector.dot(dir) * m.vector;
      if (!(proj.norm() > 1e-12)) {
        ok = false;
        break;
      }
      dir = proj.normalized();
      try {
        x = project_to_manifold(moving, x + (path / substeps) * dir);
      } catch (const Error&) {
        ok = false;
      }
      moving.set_coordinates(x);
    }
    if (!ok) continue;
    const Vec2 target = x.segment<2>(2 * effector);
    if ((target - net.node(effector).position).norm() < 5.0 * task.tolerance) continue;
    task.effectors = {effector};
    task.target = target;
    return task;
  }
  throw Error("bad-task", "could not place a reachable target");
}

}  // namespace floppy
