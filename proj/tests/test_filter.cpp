#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "sphgraph/errors.hpp"
#include "sphgraph/filter.hpp"
#include "sphgraph/harmonics.hpp"
#include "sphgraph/random.hpp"

using namespace sphgraph;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

SparseOperator small_laplacian() {
  const auto s = healpix_sampling(2, HealpixOrder::ring);
  return laplacian(build_graph(s, 8, WeightScheme::gaussian(heuristic_kernel_width(s, 8))));
}

// sum_i alpha_i L^i f with explicit dense matrix powers.
Eigen::VectorXd dense_monomial(const Eigen::MatrixXd& L, const std::vector<double>& alpha, const Eigen::VectorXd& f) {
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(L.rows(), L.cols());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (double a : alpha) {
    out += a * (power * f);
    power = power * L;
  }
  return out;
}

// Chebyshev filter through the eigendecomposition: sum_i alpha_i T_i(2 lambda / lmax - 1).
Eigen::VectorXd spectral_chebyshev(const Eigen::MatrixXd& L, const FilterCoeffs& h, const Eigen::VectorXd& f) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  Eigen::VectorXd response(L.rows());
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const double x = 2.0 * eig.eigenvalues()[i] / h.lambda_max - 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < h.alpha.size(); ++k) sum += h.alpha[k] * std::cos(k * std::acos(std::clamp(x, -1.0, 1.0)));
    response[i] = sum;
  }
  return eig.eigenvectors() * response.asDiagonal() * eig.eigenvectors().transpose() * f;
}

}  // namespace

TEST_CASE("degree zero filter scales the signal") {
  const auto L = small_laplacian();
  const Eigen::VectorXd f = random_vector(L.size(), 1);
  const FilterCoeffs h{FilterBasis::monomial, {2.5}};
  CHECK((filter_apply(L, h, f) - 2.5 * f).cwiseAbs().maxCoeff() <= 1e-15 * f.cwiseAbs().maxCoeff());
  const FilterCoeffs c{FilterBasis::chebyshev, {-1.5}, 3.0};
  CHECK((filter_apply(L, c, f) + 1.5 * f).cwiseAbs().maxCoeff() <= 1e-15 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("constant signals only see alpha_0") {
  const auto L = small_laplacian();
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(L.size());
  const FilterCoeffs h{FilterBasis::monomial, {0.7, 3.0, -2.0, 1.0}};
  CHECK((filter_apply(L, h, one) - 0.7 * one).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("monomial filter against dense matrix powers") {
  const auto L = small_laplacian();
  const Eigen::MatrixXd dense(L.matrix());
  const Eigen::VectorXd f = random_vector(L.size(), 2);
  const std::vector<double> alpha{0.3, -1.2, 0.5, 0.25, -0.05};
  const Eigen::VectorXd want = dense_monomial(dense, alpha, f);
  const Eigen::VectorXd got = filter_apply(L, {FilterBasis::monomial, alpha}, f);
  CHECK((got - want).norm() <= 1e-9 * want.norm());
}

TEST_CASE("chebyshev filter against the spectral definition") {
  const auto L = small_laplacian();
  const Eigen::MatrixXd dense(L.matrix());
  const Eigen::VectorXd f = random_vector(L.size(), 3);
  const FilterCoeffs h{FilterBasis::chebyshev, {0.4, -0.7, 0.2, 0.9, -0.3, 0.1}, chebyshev_lambda_max(L)};
  const Eigen::VectorXd want = spectral_chebyshev(dense, h, f);
  CHECK((filter_apply(L, h, f) - want).norm() <= 1e-9 * want.norm());
}

TEST_CASE("chebyshev lambda_max bounds the spectrum") {
  const auto L = small_laplacian();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(L.matrix())};
  const double top = eig.eigenvalues().maxCoeff();
  const double lm = chebyshev_lambda_max(L);
  CHECK(lm >= 1.01 * top);
  CHECK(lm <= 1.01 * top * (1 + 1e-5));
}

TEST_CASE("basis conversion round trip") {
  const auto L = small_laplacian();
  const double lm = chebyshev_lambda_max(L);
  const FilterCoeffs mono{FilterBasis::monomial, {1.0, -0.5, 0.125, 0.02, -0.003}};
  const FilterCoeffs cheb = chebyshev_from_monomial(mono, lm);
  CHECK(cheb.basis == FilterBasis::chebyshev);
  CHECK(cheb.order() == mono.order());
  const FilterCoeffs back = monomial_from_chebyshev(cheb);
  for (std::size_t i = 0; i < mono.alpha.size(); ++i) CHECK(std::abs(back.alpha[i] - mono.alpha[i]) < 1e-10);

  const Eigen::VectorXd f = random_vector(L.size(), 4);
  const Eigen::VectorXd a = filter_apply(L, mono, f);
  const Eigen::VectorXd b = filter_apply(L, cheb, f);
  CHECK((a - b).norm() <= 1e-9 * a.norm());

  // T_2(x) = 2x^2 - 1 with x = 2L/lm - 1 gives 1 - 8L/lm + 8L^2/lm^2.
  const FilterCoeffs t2 = monomial_from_chebyshev({FilterBasis::chebyshev, {0, 0, 1}, lm});
  CHECK(t2.alpha[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t2.alpha[1] == doctest::Approx(-8.0 / lm).epsilon(1e-14));
  CHECK(t2.alpha[2] == doctest::Approx(8.0 / (lm * lm)).epsilon(1e-14));
}

TEST_CASE("filters are linear") {
  const auto L = small_laplacian();
  const FilterCoeffs h{FilterBasis::chebyshev, {0.1, 0.2, 0.3, 0.4}, chebyshev_lambda_max(L)};
  const Eigen::VectorXd f = random_vector(L.size(), 5);
  const Eigen::VectorXd g = random_vector(L.size(), 6);
  const Eigen::VectorXd lhs = filter_apply(L, h, 2.0 * f - 3.0 * g);
  const Eigen::VectorXd rhs = 2.0 * filter_apply(L, h, f) - 3.0 * filter_apply(L, h, g);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("filters commute with sampling automorphisms") {
  const auto s = healpix_sampling(4, HealpixOrder::nested);
  const auto L = laplacian(build_graph(s, 8, WeightScheme::gaussian(heuristic_kernel_width(s, 8))));
  const auto perm = automorphism_permutation(s, Rotation::about_z(std::numbers::pi / 2).matrix());
  const Eigen::VectorXd f = random_vector(L.size(), 7);
  Eigen::VectorXd pf(f.size());
  for (std::size_t i = 0; i < perm.size(); ++i) pf[perm[i]] = f[i];
  for (const FilterCoeffs& h : {FilterCoeffs{FilterBasis::monomial, {0.5, -1.0, 0.2}},
                                FilterCoeffs{FilterBasis::chebyshev, {0.5, -1.0, 0.2, 0.7}, chebyshev_lambda_max(L)}}) {
    const Eigen::VectorXd hf = filter_apply(L, h, f);
    const Eigen::VectorXd hpf = filter_apply(L, h, pf);
    double worst = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) worst = std::max(worst, std::abs(hpf[perm[i]] - hf[i]));
    CHECK(worst <= 1e-10 * hf.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("invalid filters") {
  const auto L = small_laplacian();
  CHECK_THROWS_AS(filter_apply(L, {FilterBasis::monomial, {}}, Eigen::VectorXd::Ones(L.size())), InvalidArgument);
  CHECK_THROWS_AS(filter_apply(L, {FilterBasis::chebyshev, {1.0}, 0.0}, Eigen::VectorXd::Ones(L.size())), InvalidArgument);
  CHECK_THROWS_AS(filter_apply(L, {FilterBasis::monomial, {1.0}}, Eigen::VectorXd::Ones(3)), InvalidArgument);
  CHECK(parse_filter_basis("chebyshev") == FilterBasis::chebyshev);
  CHECK_THROWS_AS(parse_filter_basis("legendre"), InvalidArgument);
}

TEST_CASE("pool and unpool on the healpix hierarchy") {
  const auto s = healpix_sampling(4, HealpixOrder::nested);
  const Eigen::VectorXd f = random_vector(static_cast<int>(s.size()), 8);
  const Eigen::VectorXd avg = pool(s, f, PoolMode::average);
  const Eigen::VectorXd mx = pool(s, f, PoolMode::max);
  REQUIRE(avg.size() == 48);
  for (int p = 0; p < 48; ++p) {
    const Eigen::VectorXd children = f.segment(4 * p, 4);
    CHECK(avg[p] == doctest::Approx(children.mean()).epsilon(1e-14));
    CHECK(mx[p] == children.maxCoeff());
  }
  const Eigen::VectorXd up = unpool(s, avg);
  for (int i = 0; i < 192; ++i) CHECK(up[i] == avg[i / 4]);
  // Average pooling is a left inverse of unpooling.
  CHECK((pool(s, up, PoolMode::average) - avg).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(192);
  indicator[37] = 1.0;
  const Eigen::VectorXd pi = pool(s, indicator, PoolMode::max);
  for (int p = 0; p < 48; ++p) CHECK(pi[p] == (p == 9 ? 1.0 : 0.0));

  CHECK_THROWS_AS(pool(healpix_sampling(4, HealpixOrder::ring), f, PoolMode::max), InvalidArgument);
  CHECK_THROWS_AS(unpool(s, Eigen::VectorXd::Zero(5)), InvalidArgument);
  CHECK(parse_pool_mode("average") == PoolMode::average);
}

TEST_CASE("pooling on the icosahedral hierarchy") {
  const auto s = icosahedral_sampling(2);
  Eigen::VectorXd f = Eigen::VectorXd::Constant(static_cast<int>(s.size()), 3.0);
  CHECK((pool(s, f, PoolMode::average).array() - 3.0).abs().maxCoeff() < 1e-14);
  CHECK(unpool(s, pool(s, f, PoolMode::max)).size() == f.size());
}

TEST_CASE("filter csv round trip") {
  const FilterCoeffs h{FilterBasis::chebyshev, {0.1, 1.0 / 3.0, -2e-17}, 7.25};
  std::ostringstream out;
  write_filter_csv(out, h);
  CHECK(out.str().rfind("basis,P,lambda_max,alpha_0,alpha_1,alpha_2\n", 0) == 0);
  std::istringstream in(out.str());
  const FilterCoeffs back = read_filter_csv(in);
  CHECK(back.basis == h.basis);
  CHECK(back.lambda_max == h.lambda_max);
  CHECK(back.alpha == h.alpha);
}
