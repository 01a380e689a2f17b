#include "floppy/nullspace.hpp"

#include <Eigen/QR>
#include <lapacke.h>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "floppy/error.hpp"
#include "floppy/random.hpp"

namespace floppy {

namespace {

// Entries that cancel to this level during elimination are exact zeros.
constexpr double kCancellationTol = 1e-14;

}  // namespace

const char* to_string(BasisMethod method) {
  switch (method) {
    case BasisMethod::snd: return "snd";
    case BasisMethod::svd: return "svd";
    case BasisMethod::multiscale: return "multiscale";
  }
  return "?";
}

const char* to_string(ModeTag tag) {
  switch (tag) {
    case ModeTag::plain: return "plain";
    case ModeTag::rotational: return "rotational";
    case ModeTag::component_local: return "component-local";
  }
  return "?";
}

int ModeBasis::participation() const { return participation_rate(*this); }

Mode make_mode(const Eigen::VectorXd& v, double zero_tol, ModeTag tag) {
  Mode mode;
  mode.tag = tag;
  mode.vector = v;
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("numerical-breakdown", "zero or non-finite mode vector");
  mode.vector /= norm;
  for (Eigen::Index i = 0; i < mode.vector.size(); ++i) {
    if (std::abs(mode.vector(i)) < zero_tol) mode.vector(i) = 0.0;
  }
  mode.vector.normalize();
  for (Eigen::Index i = 0; i < mode.vector.size(); ++i) {
    if (mode.vector(i) != 0.0) {
      const int c = static_cast<int>(i);
      mode.support.push_back(c);
      if (mode.node_support.empty() || mode.node_support.back() != c / 2) mode.node_support.push_back(c / 2);
    }
  }
  return mode;
}

void sort_modes(std::vector<Mode>& modes) {
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const int na = a.node_support.empty() ? -1 : a.node_support.front();
    const int nb = b.node_support.empty() ? -1 : b.node_support.front();
    if (na != nb) return na < nb;
    return a.support < b.support;
  });
}

SndEliminator::SndEliminator(const RigidityMatrix& r, SndOptions options) : options_(options) {
  if (!(options.drop_tol > 0.0) || !(options.zero_tol > 0.0)) throw Error("bad-tolerance", "tolerances must be positive");
  const int n = r.col_count();
  constraints_.reserve(static_cast<std::size_t>(r.row_count()));
  remaining_col_count_.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < r.row_count(); ++i) {
    constraints_.push_back(r.sparse_row(i));
    for (int c : constraints_.back().cols) ++remaining_col_count_[c];
  }
  h_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) h_.push_back(Eigen::VectorXd::Unit(n, i));
  nnz_.assign(static_cast<std::size_t>(n), 1);
}

int SndEliminator::future_touch(int row) const {
  int touch = 0;
  const Eigen::VectorXd& h = h_[row];
  for (Eigen::Index c = 0; c < h.size(); ++c) {
    if (h(c) != 0.0) touch += remaining_col_count_[c];
  }
  return touch;
}

// Markowitz-style choice: fewest nonzeros in the pivot row (the fill each
// updated row can receive) times the number of rows to update. Ties go to
// the row whose support meets the fewest unprocessed constraints, then to
// the larger |d_p|, then to the lowest index.
int SndEliminator::pick_pivot(const std::vector<double>& d, double max_abs) const {
  const double floor = std::max(options_.drop_tol, options_.pivot_threshold * max_abs);
  long updates = 0;
  for (double v : d) {
    if (std::abs(v) > options_.drop_tol) ++updates;
  }
  const long others = std::max(1L, updates - 1);

  int best = -1;
  long best_score = 0;
  int best_touch = 0;
  for (int r = 0; r < static_cast<int>(d.size()); ++r) {
    if (std::abs(d[r]) < floor) continue;
    const long score = static_cast<long>(nnz_[r]) * others;
    if (best >= 0 && score > best_score) continue;
    const int touch = future_touch(r);
    bool take = best < 0 || score < best_score;
    if (!take && score == best_score) {
      if (touch != best_touch) {
        take = touch < best_touch;
      } else {
        take = std::abs(d[r]) > std::abs(d[best]);
      }
    }
    if (take) {
      best = r;
      best_score = score;
      best_touch = touch;
    }
  }
  return best;
}

bool SndEliminator::step() {
  if (done()) return false;
  const int index = next_++;
  const SparseRow& a = constraints_[index];
  for (int c : a.cols) --remaining_col_count_[c];

  const int rows = static_cast<int>(h_.size());
  std::vector<double> d(static_cast<std::size_t>(rows), 0.0);
  double max_abs = 0.0;
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols.size(); ++k) s += h_[r](a.cols[k]) * a.vals[k];
    if (!std::isfinite(s)) throw Error("numerical-breakdown", "non-finite projection at constraint " + std::to_string(index));
    d[r] = s;
    max_abs = std::max(max_abs, std::abs(s));
  }
  if (max_abs <= options_.drop_tol) return false;

  const int p = pick_pivot(d, max_abs);
  if (p < 0) throw Error("numerical-breakdown", "no pivot candidate at constraint " + std::to_string(index));

  const Eigen::VectorXd& hp = h_[p];
  std::vector<int> pivot_support;
  for (Eigen::Index c = 0; c < hp.size(); ++c) {
    if (hp(c) != 0.0) pivot_support.push_back(static_cast<int>(c));
  }
  for (int r = 0; r < rows; ++r) {
    if (r == p || std::abs(d[r]) <= options_.drop_tol) continue;
    const double factor = d[r] / d[p];
    Eigen::VectorXd& hr = h_[r];
    int nnz = nnz_[r];
    for (int c : pivot_support) {
      const bool was = hr(c) != 0.0;
      double v = hr(c) - factor * hp(c);
      if (std::abs(v) < kCancellationTol) v = 0.0;
      hr(c) = v;
      nnz += static_cast<int>(v != 0.0) - static_cast<int>(was);
    }
    nnz_[r] = nnz;
    const double norm = hr.norm();
    if (!(norm > 0.0)) throw Error("numerical-breakdown", "row annihilated at constraint " + std::to_string(index));
    hr /= norm;
  }
  h_.erase(h_.begin() + p);
  nnz_.erase(nnz_.begin() + p);
  return true;
}

void SndEliminator::run() {
  while (!done()) step();
}

ModeBasis snd_basis(const RigidityMatrix& r, SndOptions options) {
  SndEliminator elim(r, options);
  elim.run();
  ModeBasis basis;
  basis.method = BasisMethod::snd;
  for (const auto& h : elim.rows()) basis.modes.push_back(make_mode(h, options.zero_tol));
  sort_modes(basis.modes);
  return basis;
}

ModeBasis snd_basis(const RigidityMatrix& r, std::uint64_t seed, SndOptions options) {
  ModeBasis basis = snd_basis(shuffle_rows(r, seed), options);
  basis.seed = seed;
  return basis;
}

ModeBasis svd_basis(const RigidityMatrix& r, double tol, double zero_tol) {
  const int n = r.col_count();
  ModeBasis basis;
  basis.method = BasisMethod::svd;
  if (n == 0) return basis;
  Eigen::MatrixXd v;
  int rank = 0;
  if (r.row_count() == 0) {
    v = Eigen::MatrixXd::Identity(n, n);
  } else {
    // LAPACK divide and conquer; Eigen's BDCSVD can return wrong null-space
    // columns of V after deflation.
    Eigen::MatrixXd a = r.entries;
    const lapack_int m = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd s(std::min<Eigen::Index>(m, n));
    Eigen::MatrixXd u(m, m);
    Eigen::MatrixXd vt(n, n);
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, n, a.data(), m, s.data(), u.data(), m, vt.data(), n);
    if (info != 0) throw Error("numerical-breakdown", "dgesdd failed with info " + std::to_string(info));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol * s(0)) ++rank;
    }
    v = vt.transpose();
  }
  for (int j = rank; j < n; ++j) basis.modes.push_back(make_mode(v.col(j), zero_tol));
  sort_modes(basis.modes);
  return basis;
}

int participation_rate(const ModeBasis& basis) {
  int p = 0;
  for (const auto& m : basis.modes) p += m.size();
  return p;
}

std::vector<int> involvement(const ModeBasis& basis, int node_count) {
  std::vector<int> q(static_cast<std::size_t>(node_count), 0);
  for (const auto& m : basis.modes) {
    for (int node : m.node_support) ++q[node];
  }
  return q;
}

double projection_residual(const std::vector<Mode>& a, const std::vector<Mode>& b) {
  if (a.empty()) return 0.0;
  const Eigen::Index n = a.front().vector.size();
  if (b.empty()) {
    double worst = 0.0;
    for (const auto& m : a) worst = std::max(worst, m.vector.norm());
    return worst;
  }
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(b.size()));
  for (std::size_t j = 0; j < b.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = b[j].vector;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, basis.cols());
  double worst = 0.0;
  for (const auto& m : a) worst = std::max(worst, (m.vector - q * (q.transpose() * m.vector)).norm());
  return worst;
}

double max_residual(const RigidityMatrix& r, const ModeBasis& basis) {
  double worst = 0.0;
  for (const auto& m : basis.modes) {
    if (r.row_count() == 0) continue;
    worst = std::max(worst, (r.entries * m.vector).cwiseAbs().maxCoeff());
  }
  return worst;
}

double DecompositionEnsemble::mean_participation() const {
  if (bases.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : bases) sum += b.participation();
  return sum / static_cast<double>(bases.size());
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base, int m) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(m, 0)));
  for (int i = 0; i < m; ++i) seeds[i] = derive_seed(base, static_cast<std::uint64_t>(i));
  return seeds;
}

DecompositionEnsemble ensemble_serial(const RigidityMatrix& r, std::span<const std::uint64_t> seeds,
                                      SndOptions options) {
  if (seeds.empty()) throw Error("bad-ensemble", "ensemble size must be >= 1");
  DecompositionEnsemble out;
  out.bases.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      out.bases.push_back(snd_basis(r, seeds[i], options));
    } catch (const Error& e) {
      throw Error(e.code(), "run " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

DecompositionEnsemble ensemble(const RigidityMatrix& r, std::span<const std::uint64_t> seeds, SndOptions options) {
  if (seeds.empty()) throw Error("bad-ensemble", "ensemble size must be >= 1");
  const long m = static_cast<long>(seeds.size());
  DecompositionEnsemble out;
  out.bases.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      out.bases[i] = snd_basis(r, seeds[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "run " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace floppy
