#pragma once

// Polynomial filters h(L) f = sum_i alpha_i L^i f and hierarchical pooling.

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sphgraph/graph.hpp"
#include "sphgraph/sampling.hpp"

namespace sphgraph {

enum class FilterBasis { monomial, chebyshev };

std::string_view to_string(FilterBasis basis);
FilterBasis parse_filter_basis(std::string_view name);

/// alpha_0..alpha_P. Chebyshev coefficients refer to T_i(2L/lambda_max - I).
struct FilterCoeffs {
  FilterBasis basis = FilterBasis::monomial;
  std::vector<double> alpha;
  double lambda_max = 0.0;  // chebyshev only

  int order() const noexcept { return static_cast<int>(alpha.size()) - 1; }
  void validate() const;
};

/// Exactly P sparse matvecs in either basis.
Eigen::VectorXd filter_apply(const SparseOperator& L, const FilterCoeffs& h, const Eigen::Ref<const Eigen::VectorXd>& f);

/// Same polynomial of L expressed in the other basis.
FilterCoeffs chebyshev_from_monomial(const FilterCoeffs& h, double lambda_max);
FilterCoeffs monomial_from_chebyshev(const FilterCoeffs& h);

/// Power-iteration estimate (tol 1e-6) inflated by a further 1%.
double chebyshev_lambda_max(const SparseOperator& L);

enum class PoolMode { max, average };

PoolMode parse_pool_mode(std::string_view name);

/// Reduce each parent's children; requires a hierarchy on `s`.
Eigen::VectorXd pool(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& f, PoolMode mode);

/// Copy each parent value to its children.
Eigen::VectorXd unpool(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& coarse);

/// CSV with header `basis,P,lambda_max,alpha_0,...,alpha_P` and one data row.
void write_filter_csv(std::ostream& out, const FilterCoeffs& h);
FilterCoeffs read_filter_csv(std::istream& in);

}  // namespace sphgraph
