#include "sphgraph/equivariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include "sphgraph/errors.hpp"
#include "sphgraph/parallel.hpp"
#include "sphgraph/random.hpp"

namespace sphgraph {
namespace {

constexpr double kNormFloor = 1e-12;

ErrorStats summarize(const std::vector<double>& errors, int skipped) {
  ErrorStats st;
  st.samples = static_cast<int>(errors.size());
  st.skipped = skipped;
  if (errors.empty()) {
    st.mean = std::numeric_limits<double>::infinity();
    return st;
  }
  double sum = 0.0;
  for (double e : errors) sum += e;
  st.mean = sum / st.samples;
  if (st.samples > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - st.mean) * (e - st.mean);
    st.std = std::sqrt(ss / (st.samples - 1));
  }
  st.std_err = st.std / std::sqrt(static_cast<double>(st.samples));
  return st;
}

// Add residual rows transported along a nearest-sample map to block `block` of out.
void add_transported(Eigen::MatrixXd& out, Eigen::Index col0, const Eigen::MatrixXd& residual,
                     const std::vector<int>& nearest) {
  const Eigen::Index cols = residual.cols();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i).segment(col0, cols) += residual.row(nearest[i]);
}

}  // namespace

void EquivarianceConfig::validate() const {
  if (n_signals < 1 || n_rotations < 1) throw InvalidArgument("equivariance config needs n_signals, n_rotations >= 1");
}

double equivariance_error(const SparseOperator& L, const SampledRotation& r, const Eigen::Ref<const Eigen::VectorXd>& f) {
  if (f.size() != L.size()) throw InvalidArgument("equivariance_error: signal length does not match operator");
  const Eigen::VectorXd lf = L.matrix() * f;
  const double norm = lf.norm();
  if (!(norm > kNormFloor * L.inf_norm() * f.norm())) {
    throw UndefinedNormalization("equivariance_error: L f vanishes, the normalized error is undefined");
  }
  const Eigen::VectorXd rlf = r.apply(lf);
  const Eigen::VectorXd rf = r.apply(f);
  const Eigen::VectorXd lrf = L.matrix() * rf;
  return (rlf - lrf).squaredNorm() / (norm * norm);
}

struct EquivarianceProblem::Impl {
  struct Degree {
    int ell = 0;
    Eigen::MatrixXd signals;  // n x S
    std::vector<std::vector<int>> nearest;
    std::vector<Rotation> rotations;
    Eigen::MatrixXd rotated;  // n x (S R), column j S + i holds R(g_j) f_i
  };

  std::shared_ptr<const Sampling> sampling;
  int k = 0;
  std::vector<int> degrees;
  EquivarianceConfig cfg;
  int lmax = 0;
  NeighborTable knn;
  std::shared_ptr<const HarmonicTransform> transform;
  std::shared_ptr<const WignerRotator> wigner;
  std::vector<Degree> per_degree;

  // R_V(g_j) applied to every column of v, all rotations side by side.
  Eigen::MatrixXd rotate_all(const Degree& d, const Eigen::MatrixXd& v) const {
    const auto& b = transform->basis();
    const Eigen::MatrixXd c = transform->analysis_matrix() * v;
    Eigen::MatrixXd residual = v;
    residual.noalias() -= b * c;
    const Eigen::Index cols = v.cols();
    const auto nr = static_cast<Eigen::Index>(d.rotations.size());
    Eigen::MatrixXd all(c.rows(), cols * nr);
    for (Eigen::Index j = 0; j < nr; ++j) {
      all.middleCols(j * cols, cols) = c;
      wigner->rotate_real(d.rotations[j], all.middleCols(j * cols, cols));
    }
    Eigen::MatrixXd out(v.rows(), cols * nr);
    out.noalias() = b * all;
    for (Eigen::Index j = 0; j < nr; ++j) add_transported(out, j * cols, residual, d.nearest[j]);
    return out;
  }
};

EquivarianceProblem::EquivarianceProblem(const Sampling& s, int k, std::vector<int> degrees,
                                         const EquivarianceConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  if (degrees.empty()) throw InvalidArgument("equivariance: empty degree list");
  const int band = reliable_band(s);
  for (int l : degrees) {
    if (l == 0) throw InvalidArgument("equivariance: degree 0 signals are constant, the error is undefined");
    if (l < 0 || l > band) throw InvalidArgument("equivariance: degree outside the reliable band");
  }
  const int max_degree = *std::max_element(degrees.begin(), degrees.end());
  Impl& m = *impl_;
  m.sampling = std::make_shared<const Sampling>(s);
  m.k = k;
  m.degrees = std::move(degrees);
  m.cfg = cfg;
  m.lmax = cfg.lmax_analysis >= 0 ? cfg.lmax_analysis : std::min(band, 2 * max_degree + 1);
  if (m.lmax < max_degree) throw InvalidArgument("equivariance: lmax_analysis below the largest degree");
  m.knn = knn_edges(s, k);
  m.transform = std::make_shared<const HarmonicTransform>(s, m.lmax);
  m.wigner = wigner_rotator(m.lmax);

  const auto n = static_cast<std::uint64_t>(s.size());
  const auto scheme = static_cast<std::uint64_t>(s.scheme());
  m.per_degree.resize(m.degrees.size());
  parallel_for(m.degrees.size(), cfg.threads, [&](std::size_t di) {
    Impl::Degree& d = m.per_degree[di];
    d.ell = m.degrees[di];
    const std::uint64_t cell = derive_seed(cfg.seed, {scheme, n, static_cast<std::uint64_t>(k),
                                                      static_cast<std::uint64_t>(d.ell)});
    const int nc = coeff_count(d.ell);
    d.signals.resize(static_cast<Eigen::Index>(n), cfg.n_signals);
    for (int i = 0; i < cfg.n_signals; ++i) {
      const HarmonicCoeffs a = random_degree_coeffs(d.ell, derive_seed(cell, {0, static_cast<std::uint64_t>(i)}));
      d.signals.col(i).noalias() = m.transform->basis().leftCols(nc) * a.to_real();
    }
    for (int j = 0; j < cfg.n_rotations; ++j) {
      d.rotations.push_back(random_rotation(derive_seed(cell, {1, static_cast<std::uint64_t>(j)})));
      d.nearest.push_back(rotated_nearest(*m.sampling, d.rotations.back()));
    }
    d.rotated = m.rotate_all(d, d.signals);
  });
}

EquivarianceProblem::~EquivarianceProblem() = default;

const Sampling& EquivarianceProblem::sampling() const noexcept { return *impl_->sampling; }
int EquivarianceProblem::k() const noexcept { return impl_->k; }
int EquivarianceProblem::lmax_analysis() const noexcept { return impl_->lmax; }
const std::vector<int>& EquivarianceProblem::degrees() const noexcept { return impl_->degrees; }
const NeighborTable& EquivarianceProblem::neighbors() const noexcept { return impl_->knn; }

std::vector<ErrorStats> EquivarianceProblem::evaluate(const WeightScheme& w) const {
  const Impl& m = *impl_;
  const SparseOperator L = laplacian(build_graph(m.knn, w));
  const SparseMatrix& lm = L.matrix();
  const double floor = kNormFloor * L.inf_norm();
  std::vector<ErrorStats> out(m.per_degree.size());
  parallel_for(m.per_degree.size(), m.cfg.threads, [&](std::size_t di) {
    const Impl::Degree& d = m.per_degree[di];
    const Eigen::MatrixXd lf = lm * d.signals;
    const Eigen::MatrixXd rlf = m.rotate_all(d, lf);
    const Eigen::MatrixXd lrf = lm * d.rotated;
    const Eigen::Index ns = d.signals.cols();
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(ns) * d.rotations.size());
    int skipped = 0;
    for (std::size_t j = 0; j < d.rotations.size(); ++j) {
      for (Eigen::Index i = 0; i < ns; ++i) {
        const double norm = lf.col(i).norm();
        if (!(norm > floor * d.signals.col(i).norm())) {
          ++skipped;
          continue;
        }
        const Eigen::Index col = static_cast<Eigen::Index>(j) * ns + i;
        errors.push_back((rlf.col(col) - lrf.col(col)).squaredNorm() / (norm * norm));
      }
    }
    out[di] = summarize(errors, skipped);
  });
  return out;
}

double EquivarianceProblem::objective(const WeightScheme& w) const {
  const auto stats = evaluate(w);
  double sum = 0.0;
  for (const auto& st : stats) sum += st.mean;
  return sum / static_cast<double>(stats.size());
}

ErrorStats mean_equivariance_error(const Sampling& s, int k, const WeightScheme& w, int degree,
                                   const EquivarianceConfig& cfg) {
  return EquivarianceProblem(s, k, {degree}, cfg).evaluate(w).front();
}

std::vector<int> default_degrees(const Sampling& s) {
  std::vector<int> d(std::min(15, reliable_band(s)));
  std::iota(d.begin(), d.end(), 1);
  return d;
}

KernelWidthResult optimize_kernel_width(const EquivarianceProblem& problem) {
  KernelWidthResult res;
  res.t_heuristic = heuristic_kernel_width(problem.neighbors(), WidthHeuristic::half_mean_square);
  std::map<double, double> memo;  // log t -> objective
  auto eval = [&](double u) {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    const double v = problem.objective(WeightScheme::gaussian(std::exp(u)));
    memo.emplace(u, v);
    return v;
  };

  constexpr int kGrid = 25;
  const double u0 = std::log(res.t_heuristic);
  const double span = std::log(100.0);
  std::vector<double> grid(kGrid);
  std::vector<double> value(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = i == kGrid / 2 ? u0 : u0 - span + 2.0 * span * i / (kGrid - 1);
    value[i] = eval(grid[i]);
  }
  res.objective_heuristic = value[kGrid / 2];
  const int best = static_cast<int>(std::min_element(value.begin(), value.end()) - value.begin());
  int minima = 0;
  for (int i = 1; i + 1 < kGrid; ++i) minima += value[i] < value[i - 1] && value[i] < value[i + 1];
  res.multimodal = minima > 1 || best == 0 || best == kGrid - 1;

  if (best > 0 && best < kGrid - 1) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid[best - 1];
    double b = grid[best + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    const double tol = std::log1p(1e-3);
    while (b - a > tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = eval(d);
      }
    }
  }
  auto arg = std::min_element(memo.begin(), memo.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
  res.t_opt = std::exp(arg->first);
  if (arg->first == u0) res.t_opt = res.t_heuristic;
  res.objective = arg->second;
  res.evaluations = static_cast<int>(memo.size());
  return res;
}

KernelWidthResult optimize_kernel_width(const Sampling& s, int k, const std::vector<int>& degrees,
                                        const EquivarianceConfig& cfg) {
  return optimize_kernel_width(EquivarianceProblem(s, k, degrees, cfg));
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw InvalidArgument("fit_power_law: need at least 3 points");
  std::vector<std::pair<double, double>> pts(pairs.begin(), pairs.end());
  for (const auto& [n, t] : pts) {
    if (!(n > 0.0) || !(t > 0.0)) throw InvalidArgument("fit_power_law: values must be positive");
  }
  std::sort(pts.begin(), pts.end());
  const double m = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, t] : pts) sx += std::log(n), sy += std::log(t);
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, t] : pts) {
    const double dx = std::log(n) - mx;
    const double dy = std::log(t) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_power_law: need at least two distinct n");
  PowerLawFit fit;
  fit.beta = sxy / sxx;
  fit.prefactor = std::exp(my - fit.beta * mx);
  double ss_res = 0.0;
  for (const auto& [n, t] : pts) {
    const double r = std::log(t) - (my + fit.beta * (std::log(n) - mx));
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

void write_sweep_csv(std::ostream& out, std::vector<SweepRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.scheme, a.n, a.k, a.ell, a.weight, a.t) < std::tie(b.scheme, b.n, b.k, b.ell, b.weight, b.t);
  });
  out << "scheme,n,k,weight,t,ell,mean_err,std_err,samples\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%.17g,%d,%.17g,%.17g,%d\n", r.scheme.c_str(), r.n, r.k,
                  r.weight.c_str(), r.t, r.ell, r.stats.mean, r.stats.std_err, r.stats.samples);
    out << buf;
  }
}

}  // namespace sphgraph
