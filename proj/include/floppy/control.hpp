#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "floppy/network.hpp"
#include "floppy/nullspace.hpp"

namespace floppy {

struct ControlTask {
  Network network;
  std::vector<int> effectors;
  Vec2 target = Vec2::Zero();
  double tolerance = 0.05;
  int max_steps = 2000;
  double step_size = 0.0;  // alpha, displacement of the fastest node per step; <= 0 means 0.02 * mean edge length
  int max_halvings = 6;
  BasisMethod method = BasisMethod::snd;
  std::uint64_t seed = 0;  // row shuffle seed for SND-based bases
};

struct ControlStep {
  int step = 0;
  int mode_id = -1;  // canonical id (index in the step-0 basis)
  int sign = 0;
  double distance = 0.0;  // after the step
  double energy = 0.0;    // sum over nodes of |dx|^2 / 2 for this step
  double step_size = 0.0;
};

struct ControlTrace {
  std::vector<ControlStep> steps;
  double initial_distance = 0.0;
  double total_energy = 0.0;
  // activation_times[id] = steps at which canonical mode id was applied.
  std::vector<std::vector<int>> activation_times;
  std::vector<int> canonical_sizes;
  int recanonicalizations = 0;
  bool success = false;
  Eigen::VectorXd final_positions;

  double final_distance() const { return steps.empty() ? initial_distance : steps.back().distance; }
};

// Mean distance of the effectors to the target.
double effector_distance(const Eigen::VectorXd& x, const std::vector<int>& effectors, const Vec2& target);

// Largest per-node displacement norm of a coordinate vector.
double max_node_displacement(const Eigen::VectorXd& v);

// Greedy |cosine| matching; result[i] is the reference id assigned to mode
// i of `current`. Throws "mode-count-mismatch" for unequal counts.
std::vector<int> match_modes(const ModeBasis& current, const ModeBasis& reference);

// Newton iterations (minimum-norm corrections on free coordinates) until
// every edge satisfies ||x_a - x_b| - rest| <= tol * rest.
// Throws "manifold-projection-failed" after max_iterations.
Eigen::VectorXd project_to_manifold(const Network& net, Eigen::VectorXd x, double tol = 1e-9,
                                    int max_iterations = 50);

ModeBasis compute_basis(const Network& net, BasisMethod method, std::uint64_t seed);

ControlTrace run_task(const ControlTask& task);

// Batched tasks, ordered by index. The parallel version runs tasks on
// OpenMP threads and returns the same traces as the serial one.
std::vector<ControlTrace> run_tasks(const std::vector<ControlTask>& tasks);
std::vector<ControlTrace> run_tasks_serial(const std::vector<ControlTask>& tasks);

// Robot arm with the given joint angles (radians): shoulder, elbow,
// and the two finger directions relative to the forearm.
Network robot_arm_pose(double shoulder, double elbow, double finger_a, double finger_b);

// Randomized pinch task on the robot arm: random initial pose, target
// placed where both fingertips can meet.
ControlTask grasping_task(std::uint64_t seed, BasisMethod method);

// Random reaching task: a floppy node must reach a point obtained by
// following a random finite floppy motion of the network.
ControlTask reaching_task(const Network& net, std::uint64_t seed, BasisMethod method);

}  // namespace floppy
