#include "sphgraph/sampling.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>

#include "sphgraph/errors.hpp"
#include "sphgraph/healpix.hpp"
#include "sphgraph/kdtree.hpp"
#include "sphgraph/random.hpp"

namespace sphgraph {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::healpix_ring: return "healpix-ring";
    case Scheme::healpix_nested: return "healpix-nested";
    case Scheme::equiangular: return "equiangular";
    case Scheme::icosahedral: return "icosahedral";
    case Scheme::random: return "random";
    case Scheme::custom: return "custom";
  }
  return "custom";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "healpix" || name == "healpix-ring") return Scheme::healpix_ring;
  if (name == "healpix-nested") return Scheme::healpix_nested;
  if (name == "equiangular") return Scheme::equiangular;
  if (name == "icosahedral") return Scheme::icosahedral;
  if (name == "random") return Scheme::random;
  if (name == "custom") return Scheme::custom;
  throw InvalidArgument("unknown sampling scheme '" + std::string(name) + "'");
}

Sampling::Sampling(std::vector<Vec3> points, Scheme scheme, int resolution, std::optional<Hierarchy> hierarchy)
    : points_(std::move(points)), scheme_(scheme), resolution_(resolution), hierarchy_(std::move(hierarchy)) {
  if (hierarchy_) {
    if (hierarchy_->parent.size() != points_.size()) throw InvalidArgument("hierarchy size does not match sampling");
    for (int p : hierarchy_->parent) {
      if (p < 0 || p >= hierarchy_->parent_count) throw InvalidArgument("hierarchy parent index out of range");
    }
  }
}

Sampling healpix_sampling(int nside, HealpixOrder order) {
  if (!healpix::is_valid_nside(nside)) throw InvalidArgument("healpix: nside must be a positive power of two");
  const std::int64_t npix = 12 * std::int64_t{nside} * nside;
  std::vector<Vec3> points(static_cast<std::size_t>(npix));
  if (order == HealpixOrder::ring) {
    for (std::int64_t p = 0; p < npix; ++p) points[p] = healpix::pix2vec_ring(nside, p);
    return Sampling(std::move(points), Scheme::healpix_ring, nside);
  }
  for (std::int64_t p = 0; p < npix; ++p) points[p] = healpix::pix2vec_ring(nside, healpix::nest2ring(nside, p));
  std::optional<Hierarchy> hierarchy;
  if (nside >= 2) {
    Hierarchy h;
    h.parent.resize(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) h.parent[p] = static_cast<int>(p / 4);
    h.parent_count = static_cast<int>(points.size() / 4);
    hierarchy = std::move(h);
  }
  return Sampling(std::move(points), Scheme::healpix_nested, nside, std::move(hierarchy));
}

Sampling equiangular_sampling(int b) {
  if (b < 1) throw InvalidArgument("equiangular: bandwidth must be >= 1");
  const int m = 2 * b;
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const double theta = std::numbers::pi * (2 * j + 1) / (4.0 * b);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    for (int k = 0; k < m; ++k) {
      const double phi = std::numbers::pi * k / b;
      points.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
    }
  }
  std::optional<Hierarchy> hierarchy;
  if (b % 2 == 0) {
    Hierarchy h;
    h.parent.resize(points.size());
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) h.parent[j * m + k] = (j / 2) * b + k / 2;
    }
    h.parent_count = b * b;
    hierarchy = std::move(h);
  }
  return Sampling(std::move(points), Scheme::equiangular, b, std::move(hierarchy));
}

Sampling icosahedral_sampling(int level) {
  if (level < 0) throw InvalidArgument("icosahedral: level must be >= 0");
  if (level > 10) throw InvalidArgument("icosahedral: level > 10 is not supported");

  std::vector<Vec3> points;
  points.emplace_back(0.0, 0.0, 1.0);
  const double z = 1.0 / std::sqrt(5.0);
  const double r = 2.0 / std::sqrt(5.0);
  for (int k = 0; k < 5; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / 5.0;
    points.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / 5.0 + std::numbers::pi / 5.0;
    points.emplace_back(r * std::cos(phi), r * std::sin(phi), -z);
  }
  points.emplace_back(0.0, 0.0, -1.0);

  std::vector<std::array<int, 3>> faces;
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k;
    const int u1 = 1 + (k + 1) % 5;
    const int l0 = 6 + k;
    const int l1 = 6 + (k + 1) % 5;
    faces.push_back({0, u0, u1});
    faces.push_back({u0, l0, u1});
    faces.push_back({u1, l0, l1});
    faces.push_back({11, l1, l0});
  }

  std::optional<Hierarchy> hierarchy;
  for (int it = 0; it < level; ++it) {
    const int coarse = static_cast<int>(points.size());
    std::map<std::pair<int, int>, int> midpoint;
    Hierarchy h;
    h.parent_count = coarse;
    h.parent.resize(coarse);
    for (int i = 0; i < coarse; ++i) h.parent[i] = i;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto found = midpoint.find(key);
      if (found != midpoint.end()) return found->second;
      const int id = static_cast<int>(points.size());
      points.push_back((points[a] + points[b]).normalized());
      h.parent.push_back(key.first);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
    hierarchy = std::move(h);
  }
  return Sampling(std::move(points), Scheme::icosahedral, level, std::move(hierarchy));
}

Sampling random_uniform_sampling(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random sampling: n must be >= 1");
  Rng rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  while (static_cast<int>(points.size()) < n) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    points.push_back(v / norm);
  }
  return Sampling(std::move(points), Scheme::random, n);
}

Sampling custom_sampling(std::vector<Vec3> points) {
  for (auto& p : points) {
    const double norm = p.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("custom sampling: zero or non-finite direction");
    p /= norm;
  }
  const int n = static_cast<int>(points.size());
  return Sampling(std::move(points), Scheme::custom, n);
}

int reliable_band(const Sampling& s) {
  switch (s.scheme()) {
    case Scheme::healpix_ring:
    case Scheme::healpix_nested: return 3 * s.resolution() - 1;
    case Scheme::equiangular: return s.resolution() - 1;
    default: break;
  }
  const double cap = 0.75 * static_cast<double>(s.size());
  int band = 0;
  while ((band + 2) * (band + 2) <= cap) ++band;
  return band;
}

std::vector<int> automorphism_permutation(const Sampling& s, const Eigen::Matrix3d& rotation, double tol) {
  const KdTree tree(s.points());
  std::vector<int> perm(s.size());
  const Eigen::Matrix3d inverse = rotation.transpose();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto hit = tree.nearest(inverse * s[i], 1);
    if (hit.empty() || hit[0].sq_dist > tol * tol) {
      throw InvalidArgument("rotation does not map the sampling onto itself");
    }
    perm[i] = hit[0].index;
  }
  return perm;
}

void write_sampling_csv(std::ostream& out, const Sampling& s) {
  out << "index,x,y,z\n";
  char buf[128];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, s[i].x(), s[i].y(), s[i].z());
    out << buf;
  }
}

}  // namespace sphgraph
