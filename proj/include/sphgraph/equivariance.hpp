#pragma once

// Rotation-equivariance diagnostics for graph Laplacians on the sphere.
//
// The normalized error of a signal f under a rotation g is
//   E(f, g) = ||R_V(g) L f - L R_V(g) f||^2 / ||L f||^2
// with unweighted Euclidean norms over the samples; the mean error averages
// E over random single-degree signals and Haar-random rotations.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphgraph/graph.hpp"
#include "sphgraph/harmonics.hpp"
#include "sphgraph/sampling.hpp"

namespace sphgraph {

struct EquivarianceConfig {
  int n_signals = 10;
  int n_rotations = 10;
  std::uint64_t seed = 0;
  /// Band limit of the least-squares fit inside R_V(g). Negative selects
  /// min(reliable_band, 2 * largest degree + 1).
  int lmax_analysis = -1;
  int threads = 1;

  void validate() const;
};

/// Throws UndefinedNormalization when ||L f|| <= 1e-12 ||L||_inf ||f||.
double equivariance_error(const SparseOperator& L, const SampledRotation& r, const Eigen::Ref<const Eigen::VectorXd>& f);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;      // sample standard deviation of the draws
  double std_err = 0.0;  // std / sqrt(samples)
  int samples = 0;
  int skipped = 0;  // draws with L f ~ 0
};

/// Random signals and rotations for one (sampling, k) pair and a set of
/// degrees, reusable across weight schemes.
///
/// Draws for degree l use the substream derive_seed(seed, {scheme, n, k, l}),
/// so results do not depend on which other degrees are present or on the
/// thread count. Rotated signals R_V(g) f do not depend on the weights and are
/// computed once.
class EquivarianceProblem {
 public:
  EquivarianceProblem(const Sampling& s, int k, std::vector<int> degrees, const EquivarianceConfig& cfg);
  ~EquivarianceProblem();
  EquivarianceProblem(const EquivarianceProblem&) = delete;
  EquivarianceProblem& operator=(const EquivarianceProblem&) = delete;

  const Sampling& sampling() const noexcept;
  int k() const noexcept;
  int lmax_analysis() const noexcept;
  const std::vector<int>& degrees() const noexcept;
  const NeighborTable& neighbors() const noexcept;

  /// Per-degree statistics, in the order of degrees().
  std::vector<ErrorStats> evaluate(const WeightScheme& w) const;

  /// Mean over degrees of the per-degree mean error.
  double objective(const WeightScheme& w) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ErrorStats mean_equivariance_error(const Sampling& s, int k, const WeightScheme& w, int degree,
                                   const EquivarianceConfig& cfg);

/// Degrees 1..min(15, reliable_band(s)).
std::vector<int> default_degrees(const Sampling& s);

struct KernelWidthResult {
  double t_opt = 0.0;
  double objective = 0.0;
  double t_heuristic = 0.0;
  double objective_heuristic = 0.0;
  int evaluations = 0;
  bool multimodal = false;
};

/// Minimizes the mean error over `degrees` with Gaussian weights: a 25-point
/// log grid over [t_h/100, 100 t_h] around the half-mean-square heuristic t_h,
/// then golden-section search on log t between the neighbours of the best grid
/// point to a relative tolerance of 1e-3. When the best grid point is a bracket
/// endpoint, or the grid shows several strict local minima, `multimodal` is set;
/// in the endpoint case the grid point is returned as is.
KernelWidthResult optimize_kernel_width(const EquivarianceProblem& problem);
KernelWidthResult optimize_kernel_width(const Sampling& s, int k, const std::vector<int>& degrees,
                                        const EquivarianceConfig& cfg);

struct PowerLawFit {
  double beta = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
};

/// Least squares on (log n, log t): t = prefactor * n^beta.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs);

struct SweepRow {
  std::string scheme;
  int n = 0;
  int k = 0;
  std::string weight;
  double t = 0.0;  // 0 for inverse distance
  int ell = 0;
  ErrorStats stats;
};

/// Sorts by (scheme, n, k, ell) and writes
/// `scheme,n,k,weight,t,ell,mean_err,std_err,samples`.
void write_sweep_csv(std::ostream& out, std::vector<SweepRow> rows);

/// Raw kernel sum (1/n) sum_i exp(-|x_i - y|^2 / 4t) (f(y) - f(x_i)) and its
/// scaled version |S^2| / (4 pi t^2) times that, which tends to -Delta f, i.e.
/// l(l+1) f on degree-l harmonics.
double extended_laplacian_raw(const Sampling& s, double t, const Eigen::Ref<const Eigen::VectorXd>& f, const Vec3& y,
                              double fy);
double extended_laplacian_apply(const Sampling& s, double t, const Eigen::Ref<const Eigen::VectorXd>& f, const Vec3& y,
                                double fy);

/// Max over probes y of |(R(g) L f)(y) - (L R(g) f)(y)| for the scaled
/// extended Laplacian, with R(g) f evaluated through rotate_coeffs and synthesis.
double extended_equivariance_check(const Sampling& s, double t, const HarmonicCoeffs& f, const Rotation& g,
                                   std::span<const Vec3> probes);
/// As above with f = random_degree_coeffs(degree, seed).
double extended_equivariance_check(const Sampling& s, double t, int degree, const Rotation& g,
                                   std::span<const Vec3> probes, std::uint64_t seed);

/// Spherical Fibonacci lattice of `count` nearly uniform probe points.
std::vector<Vec3> fibonacci_lattice(int count);

}  // namespace sphgraph
