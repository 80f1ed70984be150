#pragma once

// Band-limited spherical harmonics on samplings.
//
// Conventions: orthonormal Y_lm with the Condon-Shortley phase,
//   Y_lm(theta, phi) = N_lm P_l^m(cos theta) e^{i m phi},  Y_10 = sqrt(3/4pi) z.
// Rotations act on functions as (R(g) f)(x) = f(g^{-1} x), with g given by
// ZYZ Euler angles, g = Rz(alpha) Ry(beta) Rz(gamma).
//
// Real signals are analysed in the real basis
//   R_l0 = Y_l0,  R_lm = sqrt2 Re Y_lm,  R_l,-m = sqrt2 Im Y_lm   (m > 0),
// stored at the same flat index l^2 + l + m as the complex coefficients.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sphgraph/sampling.hpp"

namespace sphgraph {

using Complex = std::complex<double>;

inline constexpr int coeff_count(int lmax) { return (lmax + 1) * (lmax + 1); }
inline constexpr int coeff_index(int l, int m) { return l * l + l + m; }

class HarmonicCoeffs {
 public:
  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int lmax);

  int lmax() const noexcept { return lmax_; }
  Complex& operator()(int l, int m) { return a_[coeff_index(l, m)]; }
  const Complex& operator()(int l, int m) const { return a_[coeff_index(l, m)]; }
  std::span<Complex> data() noexcept { return a_; }
  std::span<const Complex> data() const noexcept { return a_; }

  /// a_{l,-m} = (-1)^m conj(a_lm) within tol * max |a|.
  bool is_conjugate_symmetric(double tol = 1e-10) const;

  /// Real-basis coefficients of the real signal these coefficients describe.
  Eigen::VectorXd to_real() const;
  static HarmonicCoeffs from_real(const Eigen::Ref<const Eigen::VectorXd>& c, int lmax);

  /// Sum over m of |a_lm|^2.
  double degree_energy(int l) const;

 private:
  int lmax_ = -1;
  std::vector<Complex> a_;
};

struct Rotation {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static Rotation identity() { return {}; }
  static Rotation about_z(double angle);
  /// Euler angles of a proper rotation matrix, alpha and gamma in [0, 2pi).
  static Rotation from_matrix(const Eigen::Matrix3d& r);

  Eigen::Matrix3d matrix() const;
  Rotation inverse() const;
};

/// g1 * g2 applies g2 first.
Rotation operator*(const Rotation& g1, const Rotation& g2);

/// Haar-uniform rotation: alpha, gamma uniform, cos(beta) uniform.
Rotation random_rotation(std::uint64_t seed);

/// Wigner-D rotation of coefficient vectors up to a fixed band limit.
///
/// d^l(beta) is formed from the eigendecomposition of the (real, symmetric,
/// tridiagonal) J_x matrix of each degree, using J_y = U J_x U^dagger with
/// U = exp(-i pi/2 J_z); the eigenvalues of J_x are exactly -l..l.
class WignerRotator {
 public:
  explicit WignerRotator(int lmax);

  int lmax() const noexcept { return lmax_; }

  /// Rotate the (2l+1) coefficients of degree l in place.
  void rotate_degree(int l, const Rotation& g, std::span<Complex> a) const;

  HarmonicCoeffs rotate(const HarmonicCoeffs& a, const Rotation& g) const;

  /// Rotate each column of real-basis coefficients (rows l^2 .. (lmax_c+1)^2).
  void rotate_real(const Rotation& g, Eigen::Ref<Eigen::MatrixXd> c) const;

  /// Small-d matrix d^l_{m m'}(beta), rows and columns ordered m = -l..l.
  Eigen::MatrixXd small_d(int l, double beta) const;

 private:
  int lmax_;
  std::vector<Eigen::MatrixXd> eigvecs_;  // per degree, columns ordered by eigenvalue -l..l
};

/// Shared rotator covering at least `lmax`.
std::shared_ptr<const WignerRotator> wigner_rotator(int lmax);

HarmonicCoeffs rotate_coeffs(const HarmonicCoeffs& a, const Rotation& g);

/// Complex basis matrix, column coeff_index(l, m) holds Y_lm at every sample.
Eigen::MatrixXcd evaluate_basis(const Sampling& s, int lmax);

/// Real basis matrix for arbitrary points.
Eigen::MatrixXd real_basis(std::span<const Vec3> points, int lmax);

/// Real-basis values at a single point.
Eigen::VectorXd real_basis_row(const Vec3& x, int lmax);

/// Least-squares harmonic transform of a sampling at a fixed band limit.
///
/// Analysis solves (B^T B + ridge I) c = B^T f in the real basis with
/// ridge = 1e-12 * trace(B^T B) / ncoeff, so it reproduces exact coefficients
/// wherever a sampling theorem holds. Construction throws IllPosedAnalysis
/// when (lmax+1)^2 > n or the normal matrix is numerically singular.
class HarmonicTransform {
 public:
  HarmonicTransform(const Sampling& s, int lmax);

  int lmax() const noexcept { return lmax_; }
  int size() const noexcept { return static_cast<int>(basis_.rows()); }
  int coeff_count() const noexcept { return static_cast<int>(basis_.cols()); }
  const Sampling& sampling() const noexcept { return *sampling_; }

  /// n x (lmax+1)^2 real basis.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  /// (lmax+1)^2 x n least-squares analysis operator.
  const Eigen::MatrixXd& analysis_matrix() const noexcept { return analysis_; }
  /// Reciprocal condition estimate of the normal matrix.
  double rcond() const noexcept { return rcond_; }

  HarmonicCoeffs analyze(const Eigen::Ref<const Eigen::VectorXd>& f) const;
  Eigen::VectorXd synthesize(const HarmonicCoeffs& a) const;

 private:
  std::shared_ptr<const Sampling> sampling_;
  int lmax_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd analysis_;
  double rcond_ = 0.0;
};

HarmonicCoeffs analysis(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& signal, int lmax);

/// Direct evaluation of sum a_lm Y_lm at the samples; requires conjugate symmetry.
Eigen::VectorXd synthesis(const Sampling& s, const HarmonicCoeffs& a);
Eigen::VectorXd synthesis(std::span<const Vec3> points, const HarmonicCoeffs& a);

/// The sampled rotation operator R_V(g) = T_V R(g) T_V^{-1}.
///
/// T_V^{-1} is realized as the least-squares band-limited fit plus the fit
/// residual held piecewise constant on the nearest-sample cells, which makes
/// T_V T_V^{-1} the identity. Band-limited signals are rotated exactly through
/// Wigner-D matrices; a rotation that permutes the samples acts as that
/// permutation on every signal.
class SampledRotation {
 public:
  SampledRotation(std::shared_ptr<const HarmonicTransform> transform, const Rotation& g);

  const Rotation& rotation() const noexcept { return g_; }
  /// nearest[i]: the sample closest to g^{-1} x_i.
  const std::vector<int>& nearest() const noexcept { return nearest_; }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// Column-wise apply.
  Eigen::MatrixXd apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

 private:
  std::shared_ptr<const HarmonicTransform> transform_;
  std::shared_ptr<const WignerRotator> wigner_;
  Rotation g_;
  std::vector<int> nearest_;
};

/// Builds the transform at `lmax` and wraps it; see SampledRotation.
SampledRotation rotation_operator(const Sampling& s, const Rotation& g, int lmax);

/// Nearest sample of g^{-1} x_i for every i.
std::vector<int> rotated_nearest(const Sampling& s, const Rotation& g);

struct PowerSpectrum {
  std::vector<double> c;  // C_l, l = 0..lmax
};

PowerSpectrum power_spectrum(const HarmonicCoeffs& a);

/// Degree-l coefficients with i.i.d. standard normal real and imaginary parts
/// (real a_l0), conjugate symmetry enforced.
HarmonicCoeffs random_degree_coeffs(int l, std::uint64_t seed, int lmax = -1);

/// Synthesis of random_degree_coeffs on `s`; l must lie in 0..reliable_band(s).
Eigen::VectorXd random_degree_signal(const Sampling& s, int l, std::uint64_t seed);

/// CSV `l,m,re,im` for every stored coefficient.
void write_coeffs_csv(std::ostream& out, const HarmonicCoeffs& a);
HarmonicCoeffs read_coeffs_csv(std::istream& in);

/// CSV `l,C_l`.
void write_spectrum_csv(std::ostream& out, const PowerSpectrum& p);

}  // namespace sphgraph
