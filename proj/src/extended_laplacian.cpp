#include <cmath>
#include <numbers>

#include "sphgraph/equivariance.hpp"
#include "sphgraph/errors.hpp"

namespace sphgraph {

double extended_laplacian_raw(const Sampling& s, double t, const Eigen::Ref<const Eigen::VectorXd>& f, const Vec3& y,
                              double fy) {
  if (!(t > 0.0)) throw InvalidArgument("extended Laplacian needs t > 0");
  if (f.size() != static_cast<Eigen::Index>(s.size())) {
    throw InvalidArgument("extended Laplacian: signal length does not match sampling");
  }
  const double inv4t = 1.0 / (4.0 * t);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += std::exp(-(s[i] - y).squaredNorm() * inv4t) * (fy - f[static_cast<Eigen::Index>(i)]);
  }
  return sum / static_cast<double>(s.size());
}

double extended_laplacian_apply(const Sampling& s, double t, const Eigen::Ref<const Eigen::VectorXd>& f, const Vec3& y,
                                double fy) {
  const double area = 4.0 * std::numbers::pi;
  return area / (4.0 * std::numbers::pi * t * t) * extended_laplacian_raw(s, t, f, y, fy);
}

double extended_equivariance_check(const Sampling& s, double t, const HarmonicCoeffs& f, const Rotation& g,
                                   std::span<const Vec3> probes) {
  const HarmonicCoeffs rotated = rotate_coeffs(f, g);
  const Eigen::VectorXd fs = synthesis(s, f);
  const Eigen::VectorXd rfs = synthesis(s, rotated);
  const Eigen::Matrix3d inv = g.matrix().transpose();
  double worst = 0.0;
  for (const Vec3& y : probes) {
    const Vec3 back = inv * y;
    const double fb = synthesis(std::span<const Vec3>(&back, 1), f)[0];
    const double ry = synthesis(std::span<const Vec3>(&y, 1), rotated)[0];
    const double lhs = extended_laplacian_apply(s, t, fs, back, fb);
    const double rhs = extended_laplacian_apply(s, t, rfs, y, ry);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double extended_equivariance_check(const Sampling& s, double t, int degree, const Rotation& g,
                                   std::span<const Vec3> probes, std::uint64_t seed) {
  return extended_equivariance_check(s, t, random_degree_coeffs(degree, seed), g, probes);
}

std::vector<Vec3> fibonacci_lattice(int count) {
  if (count < 1) throw InvalidArgument("fibonacci_lattice: count must be >= 1");
  std::vector<Vec3> pts(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts[i] = Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

}  // namespace sphgraph
