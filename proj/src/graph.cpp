#include "sphgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "sphgraph/errors.hpp"
#include "sphgraph/kdtree.hpp"
#include "sphgraph/random.hpp"

namespace sphgraph {
namespace {

constexpr double kTieTol = 1e-10;

struct Candidate {
  double sq_dist;
  double z;
  double azimuth;
  int index;
};

// Azimuth of y around the z axis measured from the meridian of x.
// Mapped to (-pi, pi] with a margin so that a neighbour diametrically across
// the z axis gets the same key from every rotated copy of x.
double relative_azimuth(const Vec3& x, const Vec3& y) {
  const double a = std::atan2(x.x() * y.y() - x.y() * y.x(), x.x() * y.x() + x.y() * y.y());
  return a <= -std::numbers::pi + kTieTol ? std::numbers::pi : a;
}

// Order a group of (near-)equidistant candidates by z, then azimuth, then index.
void order_tie_group(std::vector<Candidate>& group) {
  std::sort(group.begin(), group.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.z - b.z) > kTieTol) return a.z > b.z;
    if (std::abs(a.azimuth - b.azimuth) > kTieTol) return a.azimuth < b.azimuth;
    return a.index < b.index;
  });
}

}  // namespace

WeightScheme WeightScheme::gaussian(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("gaussian weights need a positive kernel width");
  return {Kind::gaussian, t};
}

double WeightScheme::operator()(double sq_dist) const {
  if (kind == Kind::gaussian) return std::exp(-sq_dist / (4.0 * kernel_width));
  if (sq_dist <= 0.0) throw SingularWeight("inverse-distance weight for coincident points");
  return 1.0 / std::sqrt(sq_dist);
}

std::string_view to_string(WeightScheme::Kind kind) {
  return kind == WeightScheme::Kind::gaussian ? "gaussian" : "inverse-distance";
}

NeighborTable knn_edges(const Sampling& s, int k) {
  const int n = static_cast<int>(s.size());
  if (k < 1 || k >= n) throw InvalidArgument("knn_edges: need 1 <= k < n");
  const KdTree tree(s.points());
  NeighborTable table;
  table.n = n;
  table.k = k;
  table.index.resize(static_cast<std::size_t>(n) * k);
  table.sq_dist.resize(static_cast<std::size_t>(n) * k);

  std::vector<Candidate> cand;
  std::vector<Candidate> group;
  for (int i = 0; i < n; ++i) {
    const Vec3& x = s[i];
    const auto nearest = tree.nearest(x, k, i);
    const double cutoff = nearest.back().sq_dist;
    // Everything that could tie with the k-th neighbor.
    const auto hits = tree.within(x, cutoff * (1.0 + 1e-9) + 1e-300, i);
    cand.clear();
    for (const auto& h : hits) cand.push_back({h.sq_dist, s[h.index].z(), relative_azimuth(x, s[h.index]), h.index});

    // Split the sorted candidates into tie groups and resolve each group.
    std::size_t start = 0;
    std::size_t filled = 0;
    while (filled < static_cast<std::size_t>(k)) {
      std::size_t stop = start + 1;
      while (stop < cand.size() &&
             cand[stop].sq_dist - cand[stop - 1].sq_dist <= kTieTol * std::max(cand[stop].sq_dist, 1e-300)) {
        ++stop;
      }
      group.assign(cand.begin() + start, cand.begin() + stop);
      if (group.size() > 1) order_tie_group(group);
      for (const auto& c : group) {
        if (filled == static_cast<std::size_t>(k)) break;
        table.index[static_cast<std::size_t>(i) * k + filled] = c.index;
        table.sq_dist[static_cast<std::size_t>(i) * k + filled] = c.sq_dist;
        ++filled;
      }
      start = stop;
    }
  }
  return table;
}

Graph::Graph(SparseMatrix adjacency, int k) : adjacency_(std::move(adjacency)), k_(k) {
  adjacency_.makeCompressed();
  degrees_ = Eigen::VectorXd::Zero(adjacency_.rows());
  for (Eigen::Index r = 0; r < adjacency_.outerSize(); ++r) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(adjacency_, r); it; ++it) sum += it.value();
    degrees_[r] = sum;
  }
}

Graph build_graph(const NeighborTable& knn, const WeightScheme& w) {
  if (w.kind == WeightScheme::Kind::gaussian && !(w.kernel_width > 0.0)) {
    throw InvalidArgument("gaussian weights need a positive kernel width");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * knn.index.size());
  for (int i = 0; i < knn.n; ++i) {
    const auto nb = knn.neighbors(i);
    const auto d2 = knn.sq_distances(i);
    for (int e = 0; e < knn.k; ++e) {
      const double weight = w(d2[e]);
      triplets.emplace_back(i, nb[e], weight);
      triplets.emplace_back(nb[e], i, weight);
    }
  }
  // Union symmetrization: a mutual pair appears twice with the same weight.
  SparseMatrix a(knn.n, knn.n);
  a.setFromTriplets(triplets.begin(), triplets.end(), [](double x, double) { return x; });
  return Graph(std::move(a), knn.k);
}

Graph build_graph(const Sampling& s, int k, const WeightScheme& w) { return build_graph(knn_edges(s, k), w); }

SparseOperator::SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) { matrix_.makeCompressed(); }

double SparseOperator::inf_norm() const {
  double best = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

SparseOperator laplacian(const Graph& g) {
  const SparseMatrix& a = g.adjacency();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.nonZeros() + a.rows());
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    triplets.emplace_back(r, r, g.degrees()[r]);
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) triplets.emplace_back(r, it.col(), -it.value());
  }
  SparseMatrix l(a.rows(), a.cols());
  l.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(l));
}

double heuristic_kernel_width(const NeighborTable& knn, WidthHeuristic h) {
  double sum = 0.0;
  for (double d2 : knn.sq_dist) sum += h == WidthHeuristic::half_mean_square ? d2 : std::sqrt(d2);
  const double mean = sum / static_cast<double>(knn.sq_dist.size());
  return h == WidthHeuristic::half_mean_square ? 0.5 * mean : mean;
}

double heuristic_kernel_width(const Sampling& s, int k, WidthHeuristic h) {
  return heuristic_kernel_width(knn_edges(s, k), h);
}

EigenEstimate largest_eigenvalue(const SparseOperator& L, double tol, int max_iterations) {
  const int n = L.size();
  EigenEstimate est;
  if (n == 0 || L.nonzeros() == 0) return est;

  Rng rng(0x5eed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();

  double previous = 0.0;
  int settled = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd w = L.matrix() * v;
    const double rho = v.dot(w);
    const double norm = w.norm();
    est.iterations = it;
    est.rayleigh = rho;
    if (norm == 0.0) {
      est.value = 0.0;
      return est;
    }
    v = w / norm;
    // The Rayleigh quotient rises monotonically; require several consecutive
    // steps well below tol before trusting it.
    if (it > 1 && std::abs(rho - previous) <= 1e-2 * tol * std::abs(rho)) {
      if (++settled >= 5) {
        est.value = rho * (1.0 + tol);
        return est;
      }
    } else {
      settled = 0;
    }
    previous = rho;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "largest_eigenvalue: no convergence after %d iterations (rayleigh %.17g)",
                est.iterations, est.rayleigh);
  throw NumericalFailure(msg);
}

void write_sparse_csv(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ',' << m.nonZeros() << '\n';
  char buf[96];
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g\n", static_cast<long>(r), static_cast<long>(it.col()), it.value());
      out << buf;
    }
  }
}

}  // namespace sphgraph
