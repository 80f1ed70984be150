#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "sphgraph/sampling.hpp"

namespace sphgraph {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Edge weighting. Gaussian weights are exp(-|xi - xj|^2 / (4t)), inverse
/// distance weights are 1 / |xi - xj|; distances are chordal.
struct WeightScheme {
  enum class Kind { inverse_distance, gaussian };

  Kind kind = Kind::gaussian;
  double kernel_width = 0.0;  // t, gaussian only

  static WeightScheme inverse_distance() { return {Kind::inverse_distance, 0.0}; }
  static WeightScheme gaussian(double t);

  double operator()(double sq_dist) const;
};

std::string_view to_string(WeightScheme::Kind kind);

/// Directed k-nearest-neighbor table: row i lists the k nearest samples of
/// vertex i in increasing distance.
///
/// Candidates whose distances agree to within 1e-10 (relative) are ordered by
/// z (descending), then by azimuth relative to vertex i, then by index. Every
/// key is invariant under rotations about the z axis, so a z rotation that
/// permutes the sampling also permutes the neighbor table.
struct NeighborTable {
  int n = 0;
  int k = 0;
  std::vector<int> index;       // n*k
  std::vector<double> sq_dist;  // n*k

  std::span<const int> neighbors(int i) const { return {index.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)}; }
  std::span<const double> sq_distances(int i) const {
    return {sq_dist.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
  }
};

NeighborTable knn_edges(const Sampling& s, int k);

/// Undirected weighted graph; edge (i,j) exists when either endpoint lists
/// the other among its k nearest neighbors.
class Graph {
 public:
  Graph(SparseMatrix adjacency, int k);

  int size() const noexcept { return static_cast<int>(adjacency_.rows()); }
  int k() const noexcept { return k_; }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }

 private:
  SparseMatrix adjacency_;
  Eigen::VectorXd degrees_;
  int k_;
};

Graph build_graph(const NeighborTable& knn, const WeightScheme& w);
Graph build_graph(const Sampling& s, int k, const WeightScheme& w);

/// Combinatorial Laplacian L = D - A.
class SparseOperator {
 public:
  explicit SparseOperator(SparseMatrix matrix);

  int size() const noexcept { return static_cast<int>(matrix_.rows()); }
  Eigen::Index nonzeros() const noexcept { return matrix_.nonZeros(); }
  const SparseMatrix& matrix() const noexcept { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix_ * f; }

  /// Largest absolute row sum, an upper bound on the spectral radius.
  double inf_norm() const;

 private:
  SparseMatrix matrix_;
};

SparseOperator laplacian(const Graph& g);

enum class WidthHeuristic {
  half_mean_square,  // (1/2) mean |xi - xj|^2 over directed kNN pairs
  mean_distance,     // mean |xi - xj| over directed kNN pairs
};

double heuristic_kernel_width(const NeighborTable& knn, WidthHeuristic h = WidthHeuristic::half_mean_square);
double heuristic_kernel_width(const Sampling& s, int k, WidthHeuristic h = WidthHeuristic::half_mean_square);

struct EigenEstimate {
  double value = 0.0;  // lambda_max * (1 + tol)
  double rayleigh = 0.0;
  int iterations = 0;
};

/// Power iteration for the largest eigenvalue of a symmetric PSD operator.
/// Throws NumericalFailure when the Rayleigh quotient has not settled to
/// `tol` (relative) after `max_iterations`.
EigenEstimate largest_eigenvalue(const SparseOperator& L, double tol = 1e-6, int max_iterations = 20000);

/// Header `n,nnz` followed by `row,col,value` triplets in row-major order.
void write_sparse_csv(std::ostream& out, const SparseMatrix& m);

}  // namespace sphgraph
