#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "floppy/rigidity.hpp"

namespace floppy {

enum class BasisMethod { snd, svd, multiscale };
enum class ModeTag { plain, rotational, component_local };

const char* to_string(BasisMethod method);
const char* to_string(ModeTag tag);

// One floppy mode. `vector` has unit norm; entries below the zero tolerance
// are exactly zero, so `support` is the set of nonzero coordinates.
struct Mode {
  Eigen::VectorXd vector;
  std::vector<int> support;       // coordinate indices, ascending
  std::vector<int> node_support;  // node ids, ascending
  ModeTag tag = ModeTag::plain;

  int size() const { return static_cast<int>(support.size()); }
};

struct ModeBasis {
  BasisMethod method = BasisMethod::snd;
  std::uint64_t seed = 0;
  std::vector<Mode> modes;  // ascending size, then smallest node id
  bool incomplete = false;  // multiscale had to fall back to plain SND

  int dimension() const { return static_cast<int>(modes.size()); }
  int participation() const;
};

struct SndOptions {
  double drop_tol = 1e-10;
  double zero_tol = 1e-8;
  // Threshold pivoting: a pivot needs |d_p| >= pivot_threshold * max|d|.
  double pivot_threshold = 1e-2;
};

// Hard-zeroes entries below zero_tol, renormalizes and records supports.
Mode make_mode(const Eigen::VectorXd& v, double zero_tol, ModeTag tag = ModeTag::plain);
void sort_modes(std::vector<Mode>& modes);

// Row-by-row ABS-style elimination. H starts as the n x n identity; each
// constraint row removes one pivot row of H and projects the others so
// they stay orthogonal to every constraint seen so far.
class SndEliminator {
 public:
  SndEliminator(const RigidityMatrix& r, SndOptions options = {});

  // Processes the next constraint row. Returns false for a redundant row.
  bool step();
  void run();

  bool done() const { return next_ == static_cast<int>(constraints_.size()); }
  int processed() const { return next_; }
  const std::vector<Eigen::VectorXd>& rows() const { return h_; }

 private:
  int pick_pivot(const std::vector<double>& d, double max_abs) const;
  int future_touch(int row) const;

  SndOptions options_;
  std::vector<SparseRow> constraints_;
  std::vector<Eigen::VectorXd> h_;
  std::vector<int> nnz_;
  std::vector<int> remaining_col_count_;
  int next_ = 0;
};

// Sparse null-space basis of R, processing rows in their stored order.
ModeBasis snd_basis(const RigidityMatrix& r, SndOptions options = {});
// Same, after shuffling the rows with `seed`.
ModeBasis snd_basis(const RigidityMatrix& r, std::uint64_t seed, SndOptions options = {});

// Right singular vectors with singular value <= tol * sigma_max.
ModeBasis svd_basis(const RigidityMatrix& r, double tol = kDefaultRankTol, double zero_tol = 1e-8);

int participation_rate(const ModeBasis& basis);
// Q[i] = number of modes whose node support contains node i.
std::vector<int> involvement(const ModeBasis& basis, int node_count);

// Largest 2-norm residual when each mode of `a` is projected onto span(b).
double projection_residual(const std::vector<Mode>& a, const std::vector<Mode>& b);
// Infinity norm of R v over all modes.
double max_residual(const RigidityMatrix& r, const ModeBasis& basis);

struct DecompositionEnsemble {
  std::vector<ModeBasis> bases;

  int size() const { return static_cast<int>(bases.size()); }
  double mean_participation() const;
};

// Independently shuffled SND runs, ordered by run index. The parallel
// version distributes runs over OpenMP threads; both give identical output.
DecompositionEnsemble ensemble(const RigidityMatrix& r, std::span<const std::uint64_t> seeds,
                               SndOptions options = {});
DecompositionEnsemble ensemble_serial(const RigidityMatrix& r, std::span<const std::uint64_t> seeds,
                                      SndOptions options = {});
// Seeds derive_seed(base, 0..m-1).
std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, int m);

}  // namespace floppy
