#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sphgraph/sampling.hpp"

namespace sphgraph {

/// Static 3D k-d tree over a point set. Queries return squared Euclidean
/// distances; among exactly equal distances the lower index wins.
class KdTree {
 public:
  struct Hit {
    double sq_dist;
    int index;
  };

  explicit KdTree(std::span<const Vec3> points);

  /// The `count` nearest points to `q`, sorted by (sq_dist, index).
  /// `skip` excludes one index (the query vertex itself), or -1.
  std::vector<Hit> nearest(const Vec3& q, int count, int skip = -1) const;

  /// All points with squared distance <= radius_sq, sorted by (sq_dist, index).
  std::vector<Hit> within(const Vec3& q, double radius_sq, int skip = -1) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    int begin, end;  // range in order_
    int left = -1, right = -1;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
  };

  int build(int begin, int end);

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace sphgraph
