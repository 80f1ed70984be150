#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sphgraph {

using Vec3 = Eigen::Vector3d;

enum class Scheme { healpix_ring, healpix_nested, equiangular, icosahedral, random, custom };

std::string_view to_string(Scheme scheme);
/// Accepts the names produced by to_string plus "healpix" as an alias of healpix-ring.
Scheme parse_scheme(std::string_view name);

/// Child-to-parent map between two levels of a hierarchical sampling.
struct Hierarchy {
  std::vector<int> parent;  // parent[child]
  int parent_count = 0;
};

/// An ordered set of unit vectors on the sphere.
///
/// `resolution` is Nside for HEALPix, the bandwidth b for equiangular grids,
/// the subdivision level for icosahedral samplings and n otherwise.
class Sampling {
 public:
  Sampling(std::vector<Vec3> points, Scheme scheme, int resolution, std::optional<Hierarchy> hierarchy = {});

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vec3>& points() const noexcept { return points_; }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  Scheme scheme() const noexcept { return scheme_; }
  int resolution() const noexcept { return resolution_; }
  const std::optional<Hierarchy>& hierarchy() const noexcept { return hierarchy_; }

 private:
  std::vector<Vec3> points_;
  Scheme scheme_;
  int resolution_;
  std::optional<Hierarchy> hierarchy_;
};

enum class HealpixOrder { ring, nested };

/// HEALPix pixel centers, 12 nside^2 points. The nested variant carries the
/// hierarchy to nside/2 (children 4p..4p+3 share parent p) when nside >= 2.
Sampling healpix_sampling(int nside, HealpixOrder order);

/// Offset equiangular grid: 2b rings at theta_j = pi(2j+1)/(4b), 2b longitudes
/// phi_k = pi k / b, point index j*2b + k. For even b the hierarchy groups
/// 2x2 blocks into the b/2 grid.
Sampling equiangular_sampling(int b);

/// Icosahedron (two vertices on +-z) with `level` rounds of edge-midpoint
/// subdivision and re-projection; 10*4^level + 2 points. Vertices of the
/// previous level keep their indices; each new midpoint is assigned to the
/// lower-indexed endpoint of its edge in the hierarchy.
Sampling icosahedral_sampling(int level);

/// n points uniform on the sphere (normalized 3D standard normals).
Sampling random_uniform_sampling(int n, std::uint64_t seed);

/// Points on the sphere from arbitrary directions; each is normalized.
Sampling custom_sampling(std::vector<Vec3> points);

/// Largest degree for which harmonic analysis on `s` is considered reliable:
/// 3 nside - 1 (HEALPix), b - 1 (equiangular), otherwise the largest L with
/// (L+1)^2 <= 3n/4.
int reliable_band(const Sampling& s);

struct SamplingGeometry {
  std::vector<double> patch_areas;      // steradians
  std::vector<double> patch_diameters;  // chordal
  double max_diameter = 0.0;
  double max_area = 0.0;
};

/// Patch areas (4 pi / n for HEALPix, spherical Voronoi cells otherwise) and
/// diameters estimated as half the largest chordal distance to a
/// Voronoi-adjacent sample.
SamplingGeometry sampling_geometry(const Sampling& s);

/// Index map of a rotation that maps the sampling onto itself:
/// result[i] = j with x_j = g^{-1} x_i, so (R v)_i = v[result[i]].
/// Throws InvalidArgument if some rotated point has no sample within `tol`.
std::vector<int> automorphism_permutation(const Sampling& s, const Eigen::Matrix3d& rotation, double tol = 1e-9);

/// CSV with header `index,x,y,z` and 17 significant digits.
void write_sampling_csv(std::ostream& out, const Sampling& s);

}  // namespace sphgraph
