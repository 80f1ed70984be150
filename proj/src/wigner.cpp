#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sphgraph/errors.hpp"
#include "sphgraph/harmonics.hpp"

namespace sphgraph {
namespace {

Complex phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

WignerRotator::WignerRotator(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw InvalidArgument("WignerRotator: lmax must be >= 0");
  eigvecs_.reserve(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    const int dim = 2 * l + 1;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd off(std::max(dim - 1, 0));
    for (int i = 0; i + 1 < dim; ++i) {
      const double m = i - l;
      off[i] = 0.5 * std::sqrt(l * (l + 1.0) - m * (m + 1.0));
    }
    if (dim == 1) {
      eigvecs_.push_back(Eigen::MatrixXd::Ones(1, 1));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalFailure("WignerRotator: eigendecomposition failed");
    // Eigenvalues come out ascending and equal -l..l up to rounding.
    eigvecs_.push_back(solver.eigenvectors());
  }
}

void WignerRotator::rotate_degree(int l, const Rotation& g, std::span<Complex> a) const {
  const int dim = 2 * l + 1;
  // D_{m m'} = e^{-i m alpha} d_{m m'}(beta) e^{-i m' gamma},
  // d(beta) = U exp(-i beta J_x) U^dagger with U = diag(e^{-i m pi/2}).
  if (g.beta == 0.0) {
    for (int i = 0; i < dim; ++i) a[i] *= phase(-(i - l) * (g.alpha + g.gamma));
    return;
  }
  const Eigen::MatrixXd& w = eigvecs_[l];
  Eigen::VectorXcd u(dim);
  for (int i = 0; i < dim; ++i) u[i] = a[i] * phase(-(i - l) * (g.gamma - 0.5 * std::numbers::pi));
  Eigen::VectorXcd v = w.transpose() * u;
  for (int k = 0; k < dim; ++k) v[k] *= phase(-(k - l) * g.beta);
  u = w * v;
  for (int i = 0; i < dim; ++i) a[i] = u[i] * phase(-(i - l) * (g.alpha + 0.5 * std::numbers::pi));
}

HarmonicCoeffs WignerRotator::rotate(const HarmonicCoeffs& a, const Rotation& g) const {
  if (a.lmax() > lmax_) throw InvalidArgument("WignerRotator: coefficients exceed rotator band limit");
  HarmonicCoeffs out = a;
  for (int l = 0; l <= a.lmax(); ++l) rotate_degree(l, g, out.data().subspan(coeff_index(l, -l), 2 * l + 1));
  return out;
}

void WignerRotator::rotate_real(const Rotation& g, Eigen::Ref<Eigen::MatrixXd> c) const {
  int lmax_c = 0;
  while (coeff_count(lmax_c) < c.rows()) ++lmax_c;
  if (coeff_count(lmax_c) != c.rows()) throw InvalidArgument("rotate_real: row count is not a full band");
  if (lmax_c > lmax_) throw InvalidArgument("rotate_real: coefficients exceed rotator band limit");
  const Eigen::Index cols = c.cols();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  for (int l = 1; l <= lmax_c; ++l) {
    const int dim = 2 * l + 1;
    const int base = coeff_index(l, -l);
    // Complex coefficients of degree l, rows m = -l..l.
    Eigen::MatrixXd re(dim, cols);
    Eigen::MatrixXd im(dim, cols);
    re.row(l) = c.row(base + l);
    im.row(l).setZero();
    for (int m = 1; m <= l; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      re.row(l + m) = inv_sqrt2 * c.row(base + l + m);
      im.row(l + m) = -inv_sqrt2 * c.row(base + l - m);
      re.row(l - m) = sign * re.row(l + m);
      im.row(l - m) = -sign * im.row(l + m);
    }
    auto apply_phase = [&](Eigen::MatrixXd& pr, Eigen::MatrixXd& pi, int i, double angle) {
      const double cs = std::cos(angle);
      const double sn = std::sin(angle);
      Eigen::RowVectorXd r = pr.row(i);
      pr.row(i) = cs * r - sn * pi.row(i);
      pi.row(i) = sn * r + cs * pi.row(i);
    };
    if (g.beta == 0.0) {
      for (int i = 0; i < dim; ++i) apply_phase(re, im, i, -(i - l) * (g.alpha + g.gamma));
    } else {
      for (int i = 0; i < dim; ++i) apply_phase(re, im, i, -(i - l) * (g.gamma - 0.5 * std::numbers::pi));
      const Eigen::MatrixXd& w = eigvecs_[l];
      Eigen::MatrixXd vr = w.transpose() * re;
      Eigen::MatrixXd vi = w.transpose() * im;
      for (int k = 0; k < dim; ++k) apply_phase(vr, vi, k, -(k - l) * g.beta);
      // Only m >= 0 is needed: the result stays conjugate symmetric.
      re.bottomRows(l + 1).noalias() = w.bottomRows(l + 1) * vr;
      im.bottomRows(l + 1).noalias() = w.bottomRows(l + 1) * vi;
      for (int i = l; i < dim; ++i) apply_phase(re, im, i, -(i - l) * (g.alpha + 0.5 * std::numbers::pi));
    }
    c.row(base + l) = re.row(l);
    for (int m = 1; m <= l; ++m) {
      c.row(base + l + m) = std::numbers::sqrt2 * re.row(l + m);
      c.row(base + l - m) = -std::numbers::sqrt2 * im.row(l + m);
    }
  }
}

Eigen::MatrixXd WignerRotator::small_d(int l, double beta) const {
  const int dim = 2 * l + 1;
  Eigen::MatrixXd d(dim, dim);
  for (int col = 0; col < dim; ++col) {
    std::vector<Complex> e(dim, Complex(0.0));
    e[col] = 1.0;
    rotate_degree(l, Rotation{0.0, beta, 0.0}, e);
    for (int row = 0; row < dim; ++row) d(row, col) = e[row].real();
  }
  return d;
}

std::shared_ptr<const WignerRotator> wigner_rotator(int lmax) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const WignerRotator>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.lower_bound(lmax);
  if (it != cache.end()) return it->second;
  auto rotator = std::make_shared<const WignerRotator>(lmax);
  cache.emplace(lmax, rotator);
  return rotator;
}

HarmonicCoeffs rotate_coeffs(const HarmonicCoeffs& a, const Rotation& g) {
  return wigner_rotator(std::max(a.lmax(), 0))->rotate(a, g);
}

}  // namespace sphgraph
