// Spherical Voronoi cells from the convex hull of the sample points.
//
// For points on the unit sphere the hull is the spherical Delaunay
// triangulation; the outward unit normal of each hull face is the
// circumcenter of its triangle and hence a Voronoi vertex.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "sphgraph/errors.hpp"
#include "sphgraph/kdtree.hpp"
#include "sphgraph/sampling.hpp"

namespace sphgraph {
namespace {

using Face = std::array<int, 3>;

double orient(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  return (b - a).cross(c - a).dot(p - a);
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::vector<Face> convex_hull(const std::vector<Vec3>& pts) {
  const int n = static_cast<int>(pts.size());
  constexpr double eps = 1e-13;

  // Initial tetrahedron.
  int i0 = 0;
  int i1 = 0;
  double best = -1.0;
  for (int i = 1; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).squaredNorm();
    if (d > best) best = d, i1 = i;
  }
  int i2 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double a = (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm();
    if (a > best) best = a, i2 = i;
  }
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n && i2 >= 0; ++i) {
    const double v = std::abs(orient(pts[i0], pts[i1], pts[i2], pts[i]));
    if (v > best) best = v, i3 = i;
  }
  if (i2 < 0 || i3 < 0) throw InvalidArgument("sampling_geometry: points are coplanar");
  if (orient(pts[i0], pts[i1], pts[i2], pts[i3]) > 0) std::swap(i1, i2);

  std::vector<Face> faces{{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}};
  std::vector<char> alive(4, 1);
  std::unordered_map<std::uint64_t, int> edge_face;
  auto link = [&](int f) {
    const Face& t = faces[f];
    for (int e = 0; e < 3; ++e) edge_face[edge_key(t[e], t[(e + 1) % 3])] = f;
  };
  for (int f = 0; f < 4; ++f) link(f);

  std::vector<int> visible;
  std::vector<char> is_visible;
  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    is_visible.assign(faces.size(), 0);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (!alive[f]) continue;
      const Face& t = faces[f];
      if (orient(pts[t[0]], pts[t[1]], pts[t[2]], pts[p]) > eps) {
        visible.push_back(f);
        is_visible[f] = 1;
      }
    }
    if (visible.empty()) throw InvalidArgument("sampling_geometry: degenerate sampling (duplicate or interior point)");

    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const Face& t = faces[f];
      for (int e = 0; e < 3; ++e) {
        const int a = t[e];
        const int b = t[(e + 1) % 3];
        const int across = edge_face.at(edge_key(b, a));
        if (!is_visible[across]) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) {
      alive[f] = 0;
      const Face& t = faces[f];
      for (int e = 0; e < 3; ++e) edge_face.erase(edge_key(t[e], t[(e + 1) % 3]));
    }
    for (auto [a, b] : horizon) {
      faces.push_back({a, b, p});
      alive.push_back(1);
      link(static_cast<int>(faces.size()) - 1);
    }
  }

  std::vector<Face> out;
  out.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (alive[f]) out.push_back(faces[f]);
  }
  return out;
}

// Area of the spherical triangle with unit-vector corners.
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

SamplingGeometry sampling_geometry(const Sampling& s) {
  const int n = static_cast<int>(s.size());
  if (n < 4) throw InvalidArgument("sampling_geometry: need at least 4 points");
  {
    const KdTree tree(s.points());
    for (int i = 0; i < n; ++i) {
      const auto hit = tree.nearest(s[i], 1, i);
      if (hit[0].sq_dist < 1e-24) throw InvalidArgument("sampling_geometry: duplicate points");
    }
  }

  const auto faces = convex_hull(s.points());
  std::vector<Vec3> centers(faces.size());
  std::vector<std::vector<int>> incident(n);
  std::vector<std::vector<int>> adjacent(n);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    centers[f] = (s[t[1]] - s[t[0]]).cross(s[t[2]] - s[t[0]]).normalized();
    for (int e = 0; e < 3; ++e) {
      incident[t[e]].push_back(static_cast<int>(f));
      adjacent[t[e]].push_back(t[(e + 1) % 3]);
    }
  }

  SamplingGeometry g;
  g.patch_areas.resize(n);
  g.patch_diameters.resize(n);
  std::vector<std::pair<double, int>> angle;
  const bool equal_area = s.scheme() == Scheme::healpix_ring || s.scheme() == Scheme::healpix_nested;
  for (int i = 0; i < n; ++i) {
    const Vec3& x = s[i];
    double far = 0.0;
    for (int j : adjacent[i]) far = std::max(far, (s[j] - x).norm());
    g.patch_diameters[i] = 0.5 * far;

    if (equal_area) {
      g.patch_areas[i] = 4.0 * std::numbers::pi / n;
      continue;
    }
    // Order the Voronoi vertices counter-clockwise in the tangent plane at x.
    const Vec3 u = (std::abs(x.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).cross(x).normalized();
    const Vec3 v = x.cross(u);
    auto& cell = incident[i];
    angle.clear();
    for (int f : cell) angle.emplace_back(std::atan2(centers[f].dot(v), centers[f].dot(u)), f);
    std::sort(angle.begin(), angle.end());
    for (std::size_t c = 0; c < cell.size(); ++c) cell[c] = angle[c].second;
    double area = 0.0;
    for (std::size_t c = 0; c < cell.size(); ++c) {
      area += spherical_triangle_area(x, centers[cell[c]], centers[cell[(c + 1) % cell.size()]]);
    }
    g.patch_areas[i] = area;
  }
  g.max_diameter = *std::max_element(g.patch_diameters.begin(), g.patch_diameters.end());
  g.max_area = *std::max_element(g.patch_areas.begin(), g.patch_areas.end());
  return g;
}

}  // namespace sphgraph
