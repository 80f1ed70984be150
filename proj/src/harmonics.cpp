#include "sphgraph/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "legendre.hpp"
#include "sphgraph/errors.hpp"
#include "sphgraph/kdtree.hpp"
#include "sphgraph/random.hpp"

namespace sphgraph {
namespace {

using detail::tri_count;
using detail::tri_index;

void fill_real_row(const Vec3& x, int lmax, std::vector<double>& leg, double* row, Eigen::Index stride) {
  const double sin_theta = std::hypot(x.x(), x.y());
  const double cos_theta = x.z();
  const double phi = std::atan2(x.y(), x.x());
  detail::normalized_legendre(cos_theta, sin_theta, lmax, leg);
  for (int l = 0; l <= lmax; ++l) row[coeff_index(l, 0) * stride] = leg[tri_index(l, 0)];
  for (int m = 1; m <= lmax; ++m) {
    const double c = std::numbers::sqrt2 * std::cos(m * phi);
    const double s = std::numbers::sqrt2 * std::sin(m * phi);
    for (int l = m; l <= lmax; ++l) {
      const double p = leg[tri_index(l, m)];
      row[coeff_index(l, m) * stride] = p * c;
      row[coeff_index(l, -m) * stride] = p * s;
    }
  }
}

void require_symmetric(const HarmonicCoeffs& a) {
  if (!a.is_conjugate_symmetric()) throw InvalidArgument("synthesis: coefficients are not conjugate symmetric");
}

}  // namespace

HarmonicCoeffs::HarmonicCoeffs(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw InvalidArgument("HarmonicCoeffs: lmax must be >= 0");
  a_.assign(coeff_count(lmax), Complex(0.0));
}

bool HarmonicCoeffs::is_conjugate_symmetric(double tol) const {
  double scale = 0.0;
  for (const auto& v : a_) scale = std::max(scale, std::abs(v));
  const double bound = tol * std::max(scale, 1.0);
  for (int l = 0; l <= lmax_; ++l) {
    if (std::abs((*this)(l, 0).imag()) > bound) return false;
    for (int m = 1; m <= l; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      if (std::abs((*this)(l, -m) - sign * std::conj((*this)(l, m))) > bound) return false;
    }
  }
  return true;
}

Eigen::VectorXd HarmonicCoeffs::to_real() const {
  Eigen::VectorXd c(coeff_count(lmax_));
  for (int l = 0; l <= lmax_; ++l) {
    c[coeff_index(l, 0)] = (*this)(l, 0).real();
    for (int m = 1; m <= l; ++m) {
      c[coeff_index(l, m)] = std::numbers::sqrt2 * (*this)(l, m).real();
      c[coeff_index(l, -m)] = -std::numbers::sqrt2 * (*this)(l, m).imag();
    }
  }
  return c;
}

HarmonicCoeffs HarmonicCoeffs::from_real(const Eigen::Ref<const Eigen::VectorXd>& c, int lmax) {
  if (c.size() != coeff_count(lmax)) throw InvalidArgument("from_real: size does not match lmax");
  HarmonicCoeffs a(lmax);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int l = 0; l <= lmax; ++l) {
    a(l, 0) = c[coeff_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const Complex v(c[coeff_index(l, m)] * inv_sqrt2, -c[coeff_index(l, -m)] * inv_sqrt2);
      a(l, m) = v;
      a(l, -m) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    }
  }
  return a;
}

double HarmonicCoeffs::degree_energy(int l) const {
  double e = 0.0;
  for (int m = -l; m <= l; ++m) e += std::norm((*this)(l, m));
  return e;
}

Eigen::MatrixXcd evaluate_basis(const Sampling& s, int lmax) {
  if (lmax < 0) throw InvalidArgument("evaluate_basis: lmax must be >= 0");
  const Eigen::MatrixXd r = real_basis(s.points(), lmax);
  Eigen::MatrixXcd y(r.rows(), r.cols());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (int l = 0; l <= lmax; ++l) {
    y.col(coeff_index(l, 0)) = r.col(coeff_index(l, 0)).cast<Complex>();
    for (int m = 1; m <= l; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        const Complex v(r(i, coeff_index(l, m)) * inv_sqrt2, r(i, coeff_index(l, -m)) * inv_sqrt2);
        y(i, coeff_index(l, m)) = v;
        y(i, coeff_index(l, -m)) = sign * std::conj(v);
      }
    }
  }
  return y;
}

Eigen::MatrixXd real_basis(std::span<const Vec3> points, int lmax) {
  if (lmax < 0) throw InvalidArgument("real_basis: lmax must be >= 0");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd b(n, coeff_count(lmax));
  std::vector<double> leg(tri_count(lmax));
  for (Eigen::Index i = 0; i < n; ++i) fill_real_row(points[i], lmax, leg, b.data() + i, n);
  return b;
}

Eigen::VectorXd real_basis_row(const Vec3& x, int lmax) {
  Eigen::VectorXd row(coeff_count(lmax));
  std::vector<double> leg(tri_count(lmax));
  fill_real_row(x, lmax, leg, row.data(), 1);
  return row;
}

HarmonicTransform::HarmonicTransform(const Sampling& s, int lmax)
    : sampling_(std::make_shared<const Sampling>(s)), lmax_(lmax) {
  if (lmax < 0) throw InvalidArgument("HarmonicTransform: lmax must be >= 0");
  const auto n = static_cast<Eigen::Index>(s.size());
  const int nc = sphgraph::coeff_count(lmax);
  if (nc > n) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "analysis: %d coefficients exceed %ld samples", nc, static_cast<long>(n));
    throw IllPosedAnalysis(msg, std::numeric_limits<double>::infinity());
  }
  basis_ = real_basis(s.points(), lmax);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nc, nc);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(basis_.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const double ridge = 1e-12 * gram.trace() / nc;
  gram.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  rcond_ = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond_ >= 1e-10)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "analysis: basis is numerically rank deficient (condition estimate %.3g)", 1.0 / rcond_);
    throw IllPosedAnalysis(msg, 1.0 / rcond_);
  }
  analysis_ = llt.solve(basis_.transpose());
}

HarmonicCoeffs HarmonicTransform::analyze(const Eigen::Ref<const Eigen::VectorXd>& f) const {
  if (f.size() != basis_.rows()) throw InvalidArgument("analysis: signal length does not match sampling");
  const Eigen::VectorXd c = analysis_ * f;
  return HarmonicCoeffs::from_real(c, lmax_);
}

Eigen::VectorXd HarmonicTransform::synthesize(const HarmonicCoeffs& a) const {
  require_symmetric(a);
  if (a.lmax() > lmax_) throw InvalidArgument("synthesize: coefficients exceed transform band limit");
  const int nc = sphgraph::coeff_count(a.lmax());
  return basis_.leftCols(nc) * a.to_real();
}

HarmonicCoeffs analysis(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& signal, int lmax) {
  return HarmonicTransform(s, lmax).analyze(signal);
}

Eigen::VectorXd synthesis(const Sampling& s, const HarmonicCoeffs& a) { return synthesis(s.points(), a); }

Eigen::VectorXd synthesis(std::span<const Vec3> points, const HarmonicCoeffs& a) {
  require_symmetric(a);
  const Eigen::VectorXd c = a.to_real();
  Eigen::VectorXd out(points.size());
  std::vector<double> leg(tri_count(a.lmax()));
  Eigen::VectorXd row(c.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    fill_real_row(points[i], a.lmax(), leg, row.data(), 1);
    out[static_cast<Eigen::Index>(i)] = row.dot(c);
  }
  return out;
}

std::vector<int> rotated_nearest(const Sampling& s, const Rotation& g) {
  const KdTree tree(s.points());
  const Eigen::Matrix3d inv = g.matrix().transpose();
  std::vector<int> nearest(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) nearest[i] = tree.nearest(inv * s[i], 1)[0].index;
  return nearest;
}

SampledRotation::SampledRotation(std::shared_ptr<const HarmonicTransform> transform, const Rotation& g)
    : transform_(std::move(transform)), wigner_(wigner_rotator(transform_->lmax())), g_(g) {
  nearest_ = rotated_nearest(transform_->sampling(), g);
}

Eigen::VectorXd SampledRotation::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::MatrixXd m = v;
  return apply_columns(m).col(0);
}

Eigen::MatrixXd SampledRotation::apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  const auto& b = transform_->basis();
  if (v.rows() != b.rows()) throw InvalidArgument("rotation_operator: signal length does not match sampling");
  Eigen::MatrixXd c = transform_->analysis_matrix() * v;
  Eigen::MatrixXd residual = v - b * c;
  wigner_->rotate_real(g_, c);
  Eigen::MatrixXd out = b * c;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) += residual.row(nearest_[i]);
  return out;
}

SampledRotation rotation_operator(const Sampling& s, const Rotation& g, int lmax) {
  return SampledRotation(std::make_shared<const HarmonicTransform>(s, lmax), g);
}

PowerSpectrum power_spectrum(const HarmonicCoeffs& a) {
  PowerSpectrum p;
  p.c.resize(std::max(a.lmax() + 1, 0));
  for (int l = 0; l <= a.lmax(); ++l) p.c[l] = a.degree_energy(l) / (2.0 * l + 1.0);
  return p;
}

HarmonicCoeffs random_degree_coeffs(int l, std::uint64_t seed, int lmax) {
  if (l < 0) throw InvalidArgument("random_degree_coeffs: degree must be >= 0");
  if (lmax < 0) lmax = l;
  if (lmax < l) throw InvalidArgument("random_degree_coeffs: degree exceeds lmax");
  Rng rng(seed);
  HarmonicCoeffs a(lmax);
  a(l, 0) = rng.normal();
  for (int m = 1; m <= l; ++m) {
    const double re = rng.normal();
    const double im = rng.normal();
    a(l, m) = Complex(re, im);
    a(l, -m) = (m % 2 == 0 ? 1.0 : -1.0) * Complex(re, -im);
  }
  return a;
}

Eigen::VectorXd random_degree_signal(const Sampling& s, int l, std::uint64_t seed) {
  if (l < 0 || l > reliable_band(s)) throw InvalidArgument("random_degree_signal: degree outside the reliable band");
  return synthesis(s, random_degree_coeffs(l, seed));
}

void write_coeffs_csv(std::ostream& out, const HarmonicCoeffs& a) {
  out << "l,m,re,im\n";
  char buf[128];
  for (int l = 0; l <= a.lmax(); ++l) {
    for (int m = -l; m <= l; ++m) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", l, m, a(l, m).real(), a(l, m).imag());
      out << buf;
    }
  }
}

HarmonicCoeffs read_coeffs_csv(std::istream& in) {
  struct Entry {
    int l, m;
    double re, im;
  };
  std::vector<Entry> entries;
  std::string line;
  int lmax = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("l,", 0) == 0) continue;
    Entry e{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf%c", &e.l, &e.m, &e.re, &e.im, &tail) != 4 || e.l < 0 ||
        std::abs(e.m) > e.l) {
      throw InvalidArgument("read_coeffs_csv: malformed row '" + line + "'");
    }
    lmax = std::max(lmax, e.l);
    entries.push_back(e);
  }
  if (lmax < 0) throw InvalidArgument("read_coeffs_csv: no coefficients");
  HarmonicCoeffs a(lmax);
  for (const auto& e : entries) a(e.l, e.m) = Complex(e.re, e.im);
  return a;
}

void write_spectrum_csv(std::ostream& out, const PowerSpectrum& p) {
  out << "l,C_l\n";
  char buf[64];
  for (std::size_t l = 0; l < p.c.size(); ++l) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", l, p.c[l]);
    out << buf;
  }
}

}  // namespace sphgraph
