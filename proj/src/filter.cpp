#include "sphgraph/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "sphgraph/csv.hpp"
#include "sphgraph/errors.hpp"

namespace sphgraph {
namespace {

// Chebyshev series of x * p(x), with p given by its Chebyshev coefficients.
std::vector<double> cheb_times_x(const std::vector<double>& c) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == 0) {
      out[1] += c[0];
    } else {
      out[k + 1] += 0.5 * c[k];
      out[k - 1] += 0.5 * c[k];
    }
  }
  return out;
}

const Hierarchy& require_hierarchy(const Sampling& s) {
  if (!s.hierarchy()) throw InvalidArgument("pooling needs a sampling with hierarchy");
  return *s.hierarchy();
}

}  // namespace

std::string_view to_string(FilterBasis basis) { return basis == FilterBasis::chebyshev ? "chebyshev" : "monomial"; }

FilterBasis parse_filter_basis(std::string_view name) {
  if (name == "monomial") return FilterBasis::monomial;
  if (name == "chebyshev") return FilterBasis::chebyshev;
  throw InvalidArgument("unknown filter basis '" + std::string(name) + "'");
}

void FilterCoeffs::validate() const {
  if (alpha.empty()) throw InvalidArgument("filter needs at least one coefficient");
  if (basis == FilterBasis::chebyshev && !(lambda_max > 0.0 && std::isfinite(lambda_max))) {
    throw InvalidArgument("chebyshev filter needs lambda_max > 0");
  }
}

Eigen::VectorXd filter_apply(const SparseOperator& L, const FilterCoeffs& h, const Eigen::Ref<const Eigen::VectorXd>& f) {
  h.validate();
  if (f.size() != L.size()) throw InvalidArgument("filter_apply: signal length does not match operator");
  const SparseMatrix& m = L.matrix();
  const int order = h.order();
  Eigen::VectorXd y = h.alpha[0] * f;
  if (order == 0) return y;

  if (h.basis == FilterBasis::monomial) {
    Eigen::VectorXd power = f;
    Eigen::VectorXd next(f.size());
    for (int i = 1; i <= order; ++i) {
      next.noalias() = m * power;
      power.swap(next);
      y += h.alpha[i] * power;
    }
    return y;
  }

  // T_{k+1} = 2 Lt T_k - T_{k-1},  Lt = (2 / lambda) L - I.
  const double scale = 2.0 / h.lambda_max;
  Eigen::VectorXd prev = f;
  Eigen::VectorXd cur(f.size());
  cur.noalias() = m * f;
  cur = scale * cur - f;
  y += h.alpha[1] * cur;
  Eigen::VectorXd next(f.size());
  for (int k = 2; k <= order; ++k) {
    next.noalias() = m * cur;
    next = 2.0 * (scale * next - cur) - prev;
    prev.swap(cur);
    cur.swap(next);
    y += h.alpha[k] * cur;
  }
  return y;
}

FilterCoeffs chebyshev_from_monomial(const FilterCoeffs& h, double lambda_max) {
  h.validate();
  if (h.basis != FilterBasis::monomial) throw InvalidArgument("chebyshev_from_monomial: input is not monomial");
  if (!(lambda_max > 0.0)) throw InvalidArgument("chebyshev_from_monomial: lambda_max must be > 0");
  // Horner in L = (lambda/2)(x + 1), carried out in the Chebyshev basis of x.
  const double half = 0.5 * lambda_max;
  std::vector<double> c{h.alpha.back()};
  for (int i = h.order() - 1; i >= 0; --i) {
    std::vector<double> xc = cheb_times_x(c);
    for (std::size_t k = 0; k < c.size(); ++k) xc[k] += c[k];
    for (double& v : xc) v *= half;
    xc[0] += h.alpha[i];
    c = std::move(xc);
  }
  c.resize(h.alpha.size());
  return {FilterBasis::chebyshev, std::move(c), lambda_max};
}

FilterCoeffs monomial_from_chebyshev(const FilterCoeffs& h) {
  h.validate();
  if (h.basis != FilterBasis::chebyshev) throw InvalidArgument("monomial_from_chebyshev: input is not chebyshev");
  const std::size_t size = h.alpha.size();
  // T_k(x) in powers of L with x = (2/lambda) L - 1.
  const double scale = 2.0 / h.lambda_max;
  std::vector<double> out(size, 0.0);
  std::vector<double> prev(size, 0.0);
  std::vector<double> cur(size, 0.0);
  prev[0] = 1.0;
  out[0] += h.alpha[0];
  if (size > 1) {
    cur[0] = -1.0;
    cur[1] = scale;
    for (std::size_t j = 0; j < size; ++j) out[j] += h.alpha[1] * cur[j];
  }
  for (std::size_t k = 2; k < size; ++k) {
    std::vector<double> next(size, 0.0);
    for (std::size_t j = 0; j < size; ++j) {
      next[j] = -2.0 * cur[j] - prev[j];
      if (j > 0) next[j] += 2.0 * scale * cur[j - 1];
    }
    for (std::size_t j = 0; j < size; ++j) out[j] += h.alpha[k] * next[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {FilterBasis::monomial, std::move(out), 0.0};
}

double chebyshev_lambda_max(const SparseOperator& L) { return 1.01 * largest_eigenvalue(L, 1e-6).value; }

PoolMode parse_pool_mode(std::string_view name) {
  if (name == "max") return PoolMode::max;
  if (name == "average" || name == "avg" || name == "mean") return PoolMode::average;
  throw InvalidArgument("unknown pooling mode '" + std::string(name) + "'");
}

Eigen::VectorXd pool(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& f, PoolMode mode) {
  const Hierarchy& h = require_hierarchy(s);
  if (f.size() != static_cast<Eigen::Index>(s.size())) throw InvalidArgument("pool: signal length does not match sampling");
  Eigen::VectorXd out(h.parent_count);
  if (mode == PoolMode::max) {
    out.setConstant(-std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < f.size(); ++i) out[h.parent[i]] = std::max(out[h.parent[i]], f[i]);
    return out;
  }
  out.setZero();
  Eigen::VectorXd count = Eigen::VectorXd::Zero(h.parent_count);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    out[h.parent[i]] += f[i];
    count[h.parent[i]] += 1.0;
  }
  return out.cwiseQuotient(count);
}

Eigen::VectorXd unpool(const Sampling& s, const Eigen::Ref<const Eigen::VectorXd>& coarse) {
  const Hierarchy& h = require_hierarchy(s);
  if (coarse.size() != h.parent_count) throw InvalidArgument("unpool: signal length does not match coarse level");
  Eigen::VectorXd out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[static_cast<Eigen::Index>(i)] = coarse[h.parent[i]];
  return out;
}

void write_filter_csv(std::ostream& out, const FilterCoeffs& h) {
  h.validate();
  out << "basis,P,lambda_max";
  for (std::size_t i = 0; i < h.alpha.size(); ++i) out << ",alpha_" << i;
  out << '\n' << to_string(h.basis) << ',' << h.order() << ',' << format_double(h.lambda_max);
  for (double a : h.alpha) out << ',' << format_double(a);
  out << '\n';
}

FilterCoeffs read_filter_csv(std::istream& in) {
  const auto rows = read_csv_rows(in);
  if (rows.size() < 2) throw InvalidArgument("filter file needs a header and one row");
  const auto& row = rows[1];
  if (row.size() < 4) throw InvalidArgument("filter row needs basis, P, lambda_max and at least alpha_0");
  FilterCoeffs h;
  h.basis = parse_filter_basis(row[0]);
  const int order = static_cast<int>(parse_double(row[1]));
  h.lambda_max = parse_double(row[2]);
  for (std::size_t i = 3; i < row.size(); ++i) h.alpha.push_back(parse_double(row[i]));
  if (order != h.order()) throw InvalidArgument("filter row: P does not match the coefficient count");
  h.validate();
  return h;
}

}  // namespace sphgraph
