#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphgraph/harmonics.hpp"
#include "sphgraph/random.hpp"

namespace sphgraph {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

Eigen::Matrix3d rz(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Eigen::Matrix3d ry(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

}  // namespace

Rotation Rotation::about_z(double angle) { return {wrap_angle(angle), 0.0, 0.0}; }

Eigen::Matrix3d Rotation::matrix() const { return rz(alpha) * ry(beta) * rz(gamma); }

Rotation Rotation::from_matrix(const Eigen::Matrix3d& r) {
  Rotation g;
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  const double sb = std::hypot(r(0, 2), r(1, 2));
  g.beta = std::atan2(sb, cb);
  if (sb > 1e-12) {
    g.alpha = std::atan2(r(1, 2), r(0, 2));
    g.gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (cb > 0.0) {
    g.beta = 0.0;
    g.alpha = std::atan2(r(1, 0), r(0, 0));
    g.gamma = 0.0;
  } else {
    g.beta = std::numbers::pi;
    g.alpha = std::atan2(-r(1, 0), -r(0, 0));
    g.gamma = 0.0;
  }
  g.alpha = wrap_angle(g.alpha);
  g.gamma = wrap_angle(g.gamma);
  return g;
}

Rotation Rotation::inverse() const {
  // (Rz(a) Ry(b) Rz(c))^{-1} = Rz(-c) Ry(-b) Rz(-a) = Rz(pi - c) Ry(b) Rz(-pi - a)
  if (beta == 0.0) return about_z(-(alpha + gamma));
  return {wrap_angle(std::numbers::pi - gamma), beta, wrap_angle(-std::numbers::pi - alpha)};
}

Rotation operator*(const Rotation& g1, const Rotation& g2) {
  if (g1.beta == 0.0 && g2.beta == 0.0) return Rotation::about_z(g1.alpha + g1.gamma + g2.alpha + g2.gamma);
  return Rotation::from_matrix(g1.matrix() * g2.matrix());
}

Rotation random_rotation(std::uint64_t seed) {
  Rng rng(seed);
  Rotation g;
  g.alpha = rng.uniform(0.0, kTwoPi);
  g.beta = std::acos(std::clamp(rng.uniform(-1.0, 1.0), -1.0, 1.0));
  g.gamma = rng.uniform(0.0, kTwoPi);
  return g;
}

}  // namespace sphgraph
