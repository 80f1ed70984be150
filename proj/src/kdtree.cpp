#include "sphgraph/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace sphgraph {
namespace {

constexpr int kLeafSize = 12;

bool hit_less(const KdTree::Hit& a, const KdTree::Hit& b) {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
}

struct HitWorse {
  bool operator()(const KdTree::Hit& a, const KdTree::Hit& b) const { return hit_less(a, b); }
};

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  if (!points_.empty()) build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    return points_[a][axis] < points_[b][axis] || (points_[a][axis] == points_[b][axis] && a < b);
  });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<KdTree::Hit> KdTree::nearest(const Vec3& q, int count, int skip) const {
  std::vector<Hit> out;
  if (count <= 0 || nodes_.empty()) return out;
  std::priority_queue<Hit, std::vector<Hit>, HitWorse> heap;  // top = worst kept

  // Explicit stack of (node, lower bound on squared distance to its region).
  std::vector<std::pair<int, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (static_cast<int>(heap.size()) == count && bound > heap.top().sq_dist) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (idx == skip) continue;
        const Hit h{(points_[idx] - q).squaredNorm(), idx};
        if (static_cast<int>(heap.size()) < count) {
          heap.push(h);
        } else if (hit_less(h, heap.top())) {
          heap.pop();
          heap.push(h);
        }
      }
      continue;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0 ? node.left : node.right;
    const int far = diff < 0 ? node.right : node.left;
    stack.emplace_back(far, std::max(bound, diff * diff));
    stack.emplace_back(near, bound);
  }
  out.resize(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = heap.top();
    heap.pop();
  }
  return out;
}

std::vector<KdTree::Hit> KdTree::within(const Vec3& q, double radius_sq, int skip) const {
  std::vector<Hit> out;
  if (nodes_.empty()) return out;
  std::vector<std::pair<int, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (bound > radius_sq) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (idx == skip) continue;
        const double d = (points_[idx] - q).squaredNorm();
        if (d <= radius_sq) out.push_back({d, idx});
      }
      continue;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0 ? node.left : node.right;
    const int far = diff < 0 ? node.right : node.left;
    stack.emplace_back(far, std::max(bound, diff * diff));
    stack.emplace_back(near, bound);
  }
  std::sort(out.begin(), out.end(), hit_less);
  return out;
}

}  // namespace sphgraph
