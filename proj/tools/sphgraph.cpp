// sphgraph command-line tool: samplings, graphs, harmonic transforms, filters
// and equivariance sweeps, all written as CSV with a '#' provenance header.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphgraph/csv.hpp"
#include "sphgraph/equivariance.hpp"
#include "sphgraph/errors.hpp"
#include "sphgraph/filter.hpp"
#include "sphgraph/graph.hpp"
#include "sphgraph/harmonics.hpp"
#include "sphgraph/sampling.hpp"

using namespace sphgraph;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
};

// Resolution flags; list-valued so that sweeps and single runs share them.
struct SamplingFlags {
  std::string scheme = "healpix";
  std::vector<int> nside, b, level, n;

  const std::vector<int>& resolutions() const {
    switch (parse_scheme(scheme)) {
      case Scheme::healpix_ring:
      case Scheme::healpix_nested: return nside;
      case Scheme::equiangular: return b;
      case Scheme::icosahedral: return level;
      case Scheme::random: return n;
      case Scheme::custom: break;
    }
    throw InvalidArgument("scheme '" + scheme + "' cannot be built from flags");
  }

  std::vector<Sampling> build_all(std::uint64_t seed) const {
    const auto& res = resolutions();
    if (res.empty()) throw InvalidArgument("missing resolution flag for scheme '" + scheme + "'");
    std::vector<Sampling> out;
    for (int r : res) out.push_back(build(r, seed));
    return out;
  }

  Sampling build_one(std::uint64_t seed) const {
    const auto& res = resolutions();
    if (res.size() != 1) throw InvalidArgument("this command takes exactly one resolution");
    return build(res.front(), seed);
  }

  Sampling build(int r, std::uint64_t seed) const {
    switch (parse_scheme(scheme)) {
      case Scheme::healpix_ring: return healpix_sampling(r, HealpixOrder::ring);
      case Scheme::healpix_nested: return healpix_sampling(r, HealpixOrder::nested);
      case Scheme::equiangular: return equiangular_sampling(r);
      case Scheme::icosahedral: return icosahedral_sampling(r);
      case Scheme::random: return random_uniform_sampling(r, seed);
      case Scheme::custom: break;
    }
    throw InvalidArgument("scheme '" + scheme + "' cannot be built from flags");
  }
};

void add_sampling_flags(CLI::App* cmd, SamplingFlags& f) {
  cmd->add_option("--scheme", f.scheme, "healpix | healpix-ring | healpix-nested | equiangular | icosahedral | random")
      ->capture_default_str();
  cmd->add_option("--nside", f.nside, "HEALPix Nside (list)")->delimiter(',');
  cmd->add_option("--b", f.b, "equiangular bandwidth (list)")->delimiter(',');
  cmd->add_option("--level", f.level, "icosahedral subdivision level (list)")->delimiter(',');
  cmd->add_option("--n", f.n, "random sampling size (list)")->delimiter(',');
}

// Kernel width: a number or the name of a heuristic.
double resolve_width(const std::string& spec, const NeighborTable& knn) {
  if (spec == "heuristic" || spec == "half-mean-square") return heuristic_kernel_width(knn);
  if (spec == "mean-distance") return heuristic_kernel_width(knn, WidthHeuristic::mean_distance);
  return parse_double(spec);
}

WeightScheme parse_weight(const std::string& name, const std::string& t, const NeighborTable& knn) {
  if (name == "inverse" || name == "inverse-distance") return WeightScheme::inverse_distance();
  if (name == "gaussian") return WeightScheme::gaussian(resolve_width(t, knn));
  throw InvalidArgument("unknown weight scheme '" + name + "'");
}

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string out;
  for (const auto& r : opt->results()) out += (out.empty() ? "" : ",") + r;
  return out;
}

// Output target plus the provenance header shared by every command.
class Output {
 public:
  Output(const Globals& g, const CLI::App& root, const CLI::App& cmd, const std::vector<std::string>& argv) {
    if (!g.out.empty()) {
      file_.open(g.out);
      if (!file_) throw InvalidArgument("cannot open output file '" + g.out + "'");
    }
    std::ostream& os = stream();
    os << "# sphgraph " << SPHGRAPH_VERSION << "\n";
    os << "# command: " << cmd.get_name() << "\n";
    os << "# argv:";
    for (const auto& a : argv) os << ' ' << a;
    os << "\n";
    os << "# seed: " << g.seed << "\n";
    for (const CLI::App* app : {&root, &cmd}) {
      for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "version") continue;
        os << "# " << name << " = " << option_value(opt) << "\n";
      }
    }
  }

  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

  void comment(const std::string& line) { stream() << "# " << line << "\n"; }

  void finish() {
    stream().flush();
    if (!stream()) throw NumericalFailure("write failed");
  }

 private:
  std::ofstream file_;
};

Eigen::VectorXd read_signal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open input file '" + path + "'");
  return read_signal_csv(in);
}

// Signal from --input, or a random single-degree signal from --degree.
struct SignalFlags {
  std::string input;
  std::optional<int> degree;

  Eigen::VectorXd load(const Sampling& s, std::uint64_t seed) const {
    if (!input.empty() == degree.has_value()) throw InvalidArgument("give exactly one of --input and --degree");
    Eigen::VectorXd f = degree ? random_degree_signal(s, *degree, seed) : read_signal_file(input);
    if (f.size() != static_cast<Eigen::Index>(s.size())) {
      throw InvalidArgument("signal length " + std::to_string(f.size()) + " does not match sampling size " +
                            std::to_string(s.size()));
    }
    return f;
  }
};

void add_signal_flags(CLI::App* cmd, SignalFlags& f) {
  cmd->add_option("--input", f.input, "signal CSV (index,value)");
  cmd->add_option("--degree", f.degree, "random real signal of a single degree");
}

struct GraphFlags {
  int k = 8;
  std::string weight = "gaussian";
  std::string t = "heuristic";
};

void add_graph_flags(CLI::App* cmd, GraphFlags& f) {
  cmd->add_option("--k", f.k, "neighbours per vertex")->capture_default_str();
  cmd->add_option("--weight", f.weight, "gaussian | inverse")->capture_default_str();
  cmd->add_option("--t", f.t, "kernel width: number | heuristic | mean-distance")->capture_default_str();
}

std::vector<int> parse_degrees(const std::vector<int>& given, const Sampling& s) {
  return given.empty() ? default_degrees(s) : given;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Laplacians on sampled spheres"};
  app.set_version_flag("--version", SPHGRAPH_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out", g.out, "output path (default: standard output)");
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // sample
  SamplingFlags sample_s;
  auto* sample = app.add_subcommand("sample", "write sample coordinates");
  add_sampling_flags(sample, sample_s);

  // graph
  SamplingFlags graph_s;
  GraphFlags graph_g;
  auto* graph = app.add_subcommand("graph", "write the kNN adjacency as sparse triplets");
  add_sampling_flags(graph, graph_s);
  add_graph_flags(graph, graph_g);
  bool graph_laplacian = false;
  graph->add_flag("--laplacian", graph_laplacian, "write L = D - A instead of A");

  // sht
  SamplingFlags sht_s;
  SignalFlags sht_f;
  int sht_lmax = -1;
  std::string sht_coeffs;
  auto* sht = app.add_subcommand("sht", "harmonic analysis of a signal, or synthesis of coefficients");
  add_sampling_flags(sht, sht_s);
  add_signal_flags(sht, sht_f);
  sht->add_option("--lmax", sht_lmax, "band limit (default: reliable band)");
  sht->add_option("--synthesize", sht_coeffs, "coefficient CSV (l,m,re,im) to synthesize");
  bool sht_emit = false;
  sht->add_flag("--emit-signal", sht_emit, "write the --degree signal itself instead of its coefficients");

  // psd
  SamplingFlags psd_s;
  SignalFlags psd_f;
  int psd_lmax = -1;
  auto* psd = app.add_subcommand("psd", "angular power spectrum of a signal");
  add_sampling_flags(psd, psd_s);
  add_signal_flags(psd, psd_f);
  psd->add_option("--lmax", psd_lmax, "band limit (default: reliable band)");

  // equiv-sweep
  SamplingFlags sw_s;
  std::vector<int> sw_k{8, 20, 40};
  std::vector<std::string> sw_weights{"gaussian"};
  std::string sw_t = "optimal";
  std::vector<int> sw_degrees;
  EquivarianceConfig sw_cfg;
  auto* sweep = app.add_subcommand("equiv-sweep", "mean equivariance error per (resolution, k, weight, degree)");
  add_sampling_flags(sweep, sw_s);
  sweep->add_option("--k", sw_k, "neighbour counts (list)")->delimiter(',')->capture_default_str();
  sweep->add_option("--weight", sw_weights, "gaussian, inverse (list)")->delimiter(',')->capture_default_str();
  sweep->add_option("--t", sw_t, "gaussian width: optimal | heuristic | mean-distance | number")->capture_default_str();
  sweep->add_option("--degrees", sw_degrees, "degrees (list; default 1..min(15, band))")->delimiter(',');
  sweep->add_option("--signals", sw_cfg.n_signals, "random signals per degree")->capture_default_str();
  sweep->add_option("--rotations", sw_cfg.n_rotations, "random rotations per degree")->capture_default_str();
  sweep->add_option("--lmax-analysis", sw_cfg.lmax_analysis, "band limit inside R_V(g); -1 selects the default")
      ->capture_default_str();

  // opt-t
  SamplingFlags ot_s;
  std::vector<int> ot_k{8};
  std::vector<int> ot_degrees;
  EquivarianceConfig ot_cfg;
  auto* optt = app.add_subcommand("opt-t", "optimal gaussian kernel width per resolution, with a power-law fit");
  add_sampling_flags(optt, ot_s);
  optt->add_option("--k", ot_k, "neighbour counts (list)")->delimiter(',')->capture_default_str();
  optt->add_option("--degrees", ot_degrees, "degrees (list; default 1..min(15, band))")->delimiter(',');
  optt->add_option("--signals", ot_cfg.n_signals, "random signals per degree")->capture_default_str();
  optt->add_option("--rotations", ot_cfg.n_rotations, "random rotations per degree")->capture_default_str();
  optt->add_option("--lmax-analysis", ot_cfg.lmax_analysis, "band limit inside R_V(g); -1 selects the default")
      ->capture_default_str();

  // filter
  SamplingFlags fl_s;
  GraphFlags fl_g;
  SignalFlags fl_f;
  std::string fl_basis = "monomial";
  std::vector<double> fl_coeffs;
  std::string fl_lambda = "auto";
  std::string fl_file;
  auto* filter = app.add_subcommand("filter", "apply a polynomial Laplacian filter to a signal");
  add_sampling_flags(filter, fl_s);
  add_graph_flags(filter, fl_g);
  add_signal_flags(filter, fl_f);
  filter->add_option("--basis", fl_basis, "monomial | chebyshev")->capture_default_str();
  filter->add_option("--coeffs", fl_coeffs, "alpha_0..alpha_P (list)")->delimiter(',');
  filter->add_option("--lambda-max", fl_lambda, "chebyshev scale: auto | number")->capture_default_str();
  filter->add_option("--filter", fl_file, "filter CSV instead of --basis/--coeffs");

  // pool
  SamplingFlags pl_s;
  SignalFlags pl_f;
  std::string pl_mode = "average";
  bool pl_unpool = false;
  auto* poolcmd = app.add_subcommand("pool", "pool a signal to the parent level of a hierarchical sampling");
  add_sampling_flags(poolcmd, pl_s);
  add_signal_flags(poolcmd, pl_f);
  poolcmd->add_option("--mode", pl_mode, "max | average")->capture_default_str();
  poolcmd->add_flag("--unpool", pl_unpool, "copy a parent-level --input signal to the children instead");

  const std::vector<std::string> argv_text(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sample) {
      const Sampling s = sample_s.build_one(g.seed);
      Output out(g, app, *sample, argv_text);
      write_sampling_csv(out.stream(), s);
      out.finish();
    } else if (*graph) {
      const Sampling s = graph_s.build_one(g.seed);
      const NeighborTable knn = knn_edges(s, graph_g.k);
      const WeightScheme w = parse_weight(graph_g.weight, graph_g.t, knn);
      const Graph gr = build_graph(knn, w);
      Output out(g, app, *graph, argv_text);
      out.comment("n = " + std::to_string(gr.size()));
      out.comment("nnz = " + std::to_string(gr.adjacency().nonZeros()));
      if (w.kind == WeightScheme::Kind::gaussian) out.comment("t = " + format_double(w.kernel_width));
      if (graph_laplacian) {
        const SparseOperator L = laplacian(gr);
        out.comment("lambda_max = " + format_double(largest_eigenvalue(L).value));
        write_sparse_csv(out.stream(), L.matrix());
      } else {
        write_sparse_csv(out.stream(), gr.adjacency());
      }
      out.finish();
    } else if (*sht) {
      const Sampling s = sht_s.build_one(g.seed);
      if (!sht_coeffs.empty()) {
        if (!sht_f.input.empty() || sht_f.degree) throw InvalidArgument("--synthesize excludes --input and --degree");
        std::ifstream in(sht_coeffs);
        if (!in) throw InvalidArgument("cannot open input file '" + sht_coeffs + "'");
        const HarmonicCoeffs a = read_coeffs_csv(in);
        const Eigen::VectorXd f = synthesis(s, a);
        Output out(g, app, *sht, argv_text);
        write_signal_csv(out.stream(), f);
        out.finish();
      } else {
        const Eigen::VectorXd f = sht_f.load(s, g.seed);
        Output out(g, app, *sht, argv_text);
        if (sht_emit) {
          write_signal_csv(out.stream(), f);
        } else {
          const int lmax = sht_lmax >= 0 ? sht_lmax : reliable_band(s);
          write_coeffs_csv(out.stream(), analysis(s, f, lmax));
        }
        out.finish();
      }
    } else if (*psd) {
      const Sampling s = psd_s.build_one(g.seed);
      const Eigen::VectorXd f = psd_f.load(s, g.seed);
      const int lmax = psd_lmax >= 0 ? psd_lmax : reliable_band(s);
      const PowerSpectrum p = power_spectrum(analysis(s, f, lmax));
      Output out(g, app, *psd, argv_text);
      write_spectrum_csv(out.stream(), p);
      out.finish();
    } else if (*sweep) {
      sw_cfg.seed = g.seed;
      sw_cfg.threads = g.threads;
      sw_cfg.validate();
      for (const auto& w : sw_weights) {
        if (w != "gaussian" && w != "inverse" && w != "inverse-distance") {
          throw InvalidArgument("unknown weight scheme '" + w + "'");
        }
      }
      std::vector<SweepRow> rows;
      for (const Sampling& s : sw_s.build_all(g.seed)) {
        for (int k : sw_k) {
          const EquivarianceProblem problem(s, k, parse_degrees(sw_degrees, s), sw_cfg);
          for (const auto& wname : sw_weights) {
            WeightScheme w = WeightScheme::inverse_distance();
            if (wname == "gaussian") {
              w = WeightScheme::gaussian(sw_t == "optimal" ? optimize_kernel_width(problem).t_opt
                                                           : resolve_width(sw_t, problem.neighbors()));
            }
            const auto stats = problem.evaluate(w);
            for (std::size_t i = 0; i < stats.size(); ++i) {
              rows.push_back({std::string(to_string(s.scheme())), static_cast<int>(s.size()), k,
                              std::string(to_string(w.kind)), w.kernel_width, problem.degrees()[i], stats[i]});
            }
          }
        }
      }
      Output out(g, app, *sweep, argv_text);
      write_sweep_csv(out.stream(), std::move(rows));
      out.finish();
    } else if (*optt) {
      ot_cfg.seed = g.seed;
      ot_cfg.threads = g.threads;
      ot_cfg.validate();
      const auto samplings = ot_s.build_all(g.seed);
      std::map<int, std::vector<std::pair<double, double>>> per_k;
      std::ostringstream body;
      body << "scheme,n,k,t_opt,t_heuristic,err_opt,err_heuristic,multimodal\n";
      for (int k : ot_k) {
        for (const Sampling& s : samplings) {
          const EquivarianceProblem problem(s, k, parse_degrees(ot_degrees, s), ot_cfg);
          const KernelWidthResult r = optimize_kernel_width(problem);
          body << to_string(s.scheme()) << ',' << s.size() << ',' << k << ',' << format_double(r.t_opt) << ','
               << format_double(r.t_heuristic) << ',' << format_double(r.objective) << ','
               << format_double(r.objective_heuristic) << ',' << (r.multimodal ? 1 : 0) << '\n';
          per_k[k].emplace_back(static_cast<double>(s.size()), r.t_opt);
        }
      }
      Output out(g, app, *optt, argv_text);
      out.stream() << body.str();
      for (const auto& [k, pts] : per_k) {
        if (pts.size() < 3) {
          out.comment("fit k=" + std::to_string(k) + ": needs at least 3 resolutions");
          continue;
        }
        const PowerLawFit fit = fit_power_law(pts);
        out.comment("fit k=" + std::to_string(k) + ": beta = " + format_double(fit.beta) +
                    ", prefactor = " + format_double(fit.prefactor) + ", r2 = " + format_double(fit.r2));
      }
      out.finish();
    } else if (*filter) {
      const Sampling s = fl_s.build_one(g.seed);
      const NeighborTable knn = knn_edges(s, fl_g.k);
      const SparseOperator L = laplacian(build_graph(knn, parse_weight(fl_g.weight, fl_g.t, knn)));
      FilterCoeffs h;
      if (!fl_file.empty()) {
        if (!fl_coeffs.empty()) throw InvalidArgument("--filter excludes --coeffs");
        std::ifstream in(fl_file);
        if (!in) throw InvalidArgument("cannot open input file '" + fl_file + "'");
        h = read_filter_csv(in);
      } else {
        h.basis = parse_filter_basis(fl_basis);
        h.alpha = fl_coeffs;
        if (h.basis == FilterBasis::chebyshev) {
          h.lambda_max = fl_lambda == "auto" ? chebyshev_lambda_max(L) : parse_double(fl_lambda);
        }
      }
      const Eigen::VectorXd f = fl_f.load(s, g.seed);
      const Eigen::VectorXd y = filter_apply(L, h, f);
      Output out(g, app, *filter, argv_text);
      if (h.basis == FilterBasis::chebyshev) out.comment("lambda_max = " + format_double(h.lambda_max));
      write_signal_csv(out.stream(), y);
      out.finish();
    } else if (*poolcmd) {
      const Sampling s = pl_s.build_one(g.seed);
      Eigen::VectorXd y;
      if (pl_unpool) {
        if (pl_f.input.empty()) throw InvalidArgument("--unpool needs --input");
        y = unpool(s, read_signal_file(pl_f.input));
      } else {
        y = pool(s, pl_f.load(s, g.seed), parse_pool_mode(pl_mode));
      }
      Output out(g, app, *poolcmd, argv_text);
      write_signal_csv(out.stream(), y);
      out.finish();
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
