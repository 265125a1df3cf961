#include "cli.hpp"

#include "fairpca/frpca.hpp"
#include "fairpca/fspca.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace fairpca::cli {

namespace {

const std::map<std::string, Mode> kModes{
    {"fpca", Mode::fpca}, {"fspca", Mode::fspca}, {"frpca", Mode::frpca}, {"pca", Mode::pca}};
const std::map<std::string, WeightSolverKind> kSolvers{
    {"alternating", WeightSolverKind::alternating}, {"bisection", WeightSolverKind::bisection}};

std::string mode_name(Mode m) {
  for (const auto& [name, value] : kModes)
    if (value == m) return name;
  return "unknown";
}

std::string solver_name(WeightSolverKind w) {
  return w == WeightSolverKind::bisection ? "bisection" : "alternating";
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

void prepare_out_dir(const ExperimentSpec& spec) {
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + spec.out_dir.string());
}

FitConfig fit_config(const ExperimentSpec& spec, Eigen::Index r, std::uint64_t seed) {
  FitConfig cfg;
  cfg.r = r;
  cfg.epsilon = spec.epsilon;
  cfg.max_iters = spec.max_iters;
  cfg.seed = seed;
  cfg.weight_solver = spec.weight_solver;
  cfg.restarts = spec.seeds;
  return cfg;
}

/// Runs fn(0..count-1) on up to `workers` threads; rethrows the exception of
/// the lowest failing index.
template <typename Fn>
void parallel_for(int count, int workers, Fn fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(workers, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

FitResult pca_fit(const ScatterSet& s, Eigen::Index r) {
  SemiOrthogonal u = pca_baseline(s.total(), r);
  const ObjectiveValue v = fpca_objective(u.matrix(), s);
  const double tight = u.tightness();
  return FitResult{std::move(u),
                   {v.value},
                   v.per_class.transpose(),
                   Matrix::Constant(1, s.k, std::numeric_limits<double>::quiet_NaN()),
                   Weights::uniform(s.k),
                   0,
                   Termination::converged,
                   tight};
}

struct Fitted {
  FitResult result;
  double min_class_variance = 0.0;
};

Fitted fit_mode(Mode mode, const ClassedDataset& d, const ScatterSet& s, const FitConfig& cfg,
                double lambda) {
  switch (mode) {
    case Mode::fpca: {
      FitResult r = fit_fpca(s, cfg);
      const double v = r.objective_trace.back();
      return {std::move(r), v};
    }
    case Mode::fspca: {
      SparseConfig sc;
      sc.base = cfg;
      sc.lambda = lambda;
      FitResult r = fit_fspca(s, sc);
      const double v = fpca_objective(r.u.matrix(), s).value;
      return {std::move(r), v};
    }
    case Mode::frpca: {
      FitResult r = fit_frpca(d, cfg);
      const double v = fpca_objective(r.u.matrix(), s).value;
      return {std::move(r), v};
    }
    case Mode::pca: {
      FitResult r = pca_fit(s, cfg.r);
      const double v = r.objective_trace.back();
      return {std::move(r), v};
    }
  }
  throw InputError("unknown mode");
}

void write_trace(const std::filesystem::path& path, const FitResult& r) {
  std::ofstream f = open_output(path);
  const Eigen::Index k = r.class_variance_trace.cols();
  f << "iteration,objective";
  for (Eigen::Index c = 1; c <= k; ++c) f << ",class_" << c;
  for (Eigen::Index c = 1; c <= k; ++c) f << ",mu_" << c;
  f << '\n';
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    f << i << ',' << r.objective_trace[i];
    for (Eigen::Index c = 0; c < k; ++c) f << ',' << r.class_variance_trace(row, c);
    for (Eigen::Index c = 0; c < k; ++c) f << ',' << r.mu_trace(row, c);
    f << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream f = open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) f << (j ? "," : "") << m(i, j);
    f << '\n';
  }
}

void write_manifest(const ExperimentSpec& spec, const std::string& verb,
                    const std::vector<std::string>& extra = {}) {
  std::ofstream f = open_output(spec.out_dir / "manifest.txt");
  f << "verb = " << verb << '\n' << "mode = " << mode_name(spec.mode) << '\n';
  if (spec.input) {
    f << "input = " << spec.input->string() << '\n'
      << "label_column = " << spec.label_column << '\n'
      << "header = " << (spec.has_header ? "true" : "false") << '\n';
  }
  if (spec.synth) {
    f << "synth = " << spec.synth->n << ',' << spec.synth->k << ',' << spec.synth->per_class << '\n'
      << "data_seed = " << data_seed(spec) << '\n';
  }
  f << "rank = " << join(spec.ranks) << '\n'
    << "lambda = " << join(spec.lambdas) << '\n'
    << "fraction = " << spec.fraction << '\n'
    << "alpha = " << join(spec.alphas) << '\n'
    << "seeds = " << spec.seeds << '\n'
    << "master_seed = " << spec.master_seed << '\n'
    << "restart_seed = " << restart_seed(spec) << '\n'
    << "epsilon = " << spec.epsilon << '\n'
    << "max_iters = " << spec.max_iters << '\n'
    << "weight_solver = " << solver_name(spec.weight_solver) << '\n'
    << "workers = " << spec.workers << '\n'
    << "out_dir = " << spec.out_dir.string() << '\n';
  for (const std::string& line : extra) f << line << '\n';
}

ClassedDataset load_or_throw_data_error(const ExperimentSpec& spec) {
  try {
    return load_data(spec);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

std::vector<Eigen::Index> parse_ranks(const std::vector<std::string>& items) {
  std::vector<Eigen::Index> out;
  for (const std::string& item : items) {
    const auto colon = item.find(':');
    std::size_t used = 0;
    if (colon == std::string::npos) {
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw InputError("bad rank '" + item + "'");
      continue;
    }
    const std::string lo_s = item.substr(0, colon), hi_s = item.substr(colon + 1);
    const long lo = std::stol(lo_s, &used);
    if (used != lo_s.size()) throw InputError("bad rank range '" + item + "'");
    const long hi = std::stol(hi_s, &used);
    if (used != hi_s.size() || hi < lo) throw InputError("bad rank range '" + item + "'");
    for (long r = lo; r <= hi; ++r) out.push_back(r);
  }
  return out;
}

SynthSource parse_synth(const std::string& text) {
  std::vector<long> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    parts.push_back(std::stol(item, &used));
    if (used != item.size()) throw InputError("bad --synth '" + text + "'");
  }
  if (parts.size() != 3 || parts[0] < 1 || parts[1] < 1 || parts[2] < 1)
    throw InputError("--synth expects n,K,per-class with positive integers");
  return {parts[0], static_cast<int>(parts[1]), parts[2]};
}

} // namespace

void ExperimentSpec::validate() const {
  if (input.has_value() == synth.has_value())
    throw InputError("exactly one of --input and --synth is required");
  if (ranks.empty() || lambdas.empty() || alphas.empty())
    throw InputError("sweeps must be nonempty");
  for (Eigen::Index r : ranks)
    if (r < 1) throw InputError("rank must be positive");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("lambda must be finite and nonnegative");
  for (double a : alphas)
    if (!std::isfinite(a)) throw InputError("alpha must be finite");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("fraction must lie in [0, 1]");
  if (seeds < 1) throw InputError("seeds must be positive");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (max_iters < 1) throw InputError("max-iters must be positive");
  if (workers < 1) throw InputError("workers must be positive");
}

std::uint64_t data_seed(const ExperimentSpec& spec) { return detail::split_seed(spec.master_seed, 0); }
std::uint64_t restart_seed(const ExperimentSpec& spec) { return detail::split_seed(spec.master_seed, 1); }

OutlierRunSeeds outlier_run_seeds(const ExperimentSpec& spec, int run) {
  const auto base = 2 + 3 * static_cast<std::uint64_t>(run);
  return {detail::split_seed(spec.master_seed, base), detail::split_seed(spec.master_seed, base + 1),
          detail::split_seed(spec.master_seed, base + 2)};
}

ClassedDataset load_data(const ExperimentSpec& spec) {
  if (spec.input) {
    const std::string& col = spec.label_column;
    const bool numeric = !col.empty() && std::all_of(col.begin(), col.end(), ::isdigit);
    LabelColumn label = numeric ? LabelColumn(static_cast<std::size_t>(std::stoul(col))) : LabelColumn(col);
    return load_csv(*spec.input, label, spec.has_header);
  }
  if (!spec.synth) throw InputError("no data source");
  const SynthSource& s = *spec.synth;
  return synth_gaussian(s.n, std::vector<Eigen::Index>(static_cast<std::size_t>(s.k), s.per_class),
                        data_seed(spec));
}

void assert_monotone(const std::vector<double>& trace, double slack) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1] - slack * std::max(1.0, std::abs(trace[i - 1])))
      throw MonotonicityViolation("objective decreased at iteration " + std::to_string(i));
  }
}

int cmd_fit(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  spec.validate();
  if (spec.ranks.size() != 1 || spec.lambdas.size() != 1)
    throw InputError("fit takes a single --rank and --lambda");
  const ClassedDataset d = load_or_throw_data_error(spec);
  const ScatterSet s = class_scatter(d);
  const FitConfig cfg = fit_config(spec, spec.ranks.front(), restart_seed(spec));
  const Fitted f = fit_mode(spec.mode, d, s, cfg, spec.lambdas.front());
  const FitResult& r = f.result;
  assert_monotone(r.objective_trace);

  prepare_out_dir(spec);
  write_trace(spec.out_dir / "trace.csv", r);
  write_matrix(spec.out_dir / "loadings.csv", r.u.matrix());
  write_manifest(spec, "fit", {"termination = " + to_string(r.termination)});

  out << std::setprecision(12) << "objective " << r.objective_trace.back() << '\n'
      << "iterations " << r.iterations << '\n'
      << "termination " << to_string(r.termination) << '\n';
  if (spec.mode == Mode::fspca)
    out << "nonzeros " << count_nonzeros(r.u.matrix(), SparseConfig{}.zero_threshold) << '\n';
  if (r.termination == Termination::max_iters) {
    err << "warning: max-iters reached before convergence; wrote the last iterate\n";
    return kSolverDiagnostic;
  }
  return kOk;
}

int cmd_sweep_rank(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  spec.validate();
  const ClassedDataset d = load_or_throw_data_error(spec);
  const ScatterSet s = class_scatter(d);
  for (Eigen::Index r : spec.ranks)
    if (r > s.n) throw InputError("rank " + std::to_string(r) + " exceeds the dimension");

  std::vector<Mode> methods{Mode::fpca, Mode::pca};
  if (spec.mode == Mode::fspca || spec.mode == Mode::frpca) methods.push_back(spec.mode);
  const int cells = static_cast<int>(spec.ranks.size() * methods.size());
  std::vector<std::optional<Fitted>> results(static_cast<std::size_t>(cells));
  parallel_for(cells, spec.workers, [&](int i) {
    const std::size_t row = static_cast<std::size_t>(i) / methods.size();
    const Mode m = methods[static_cast<std::size_t>(i) % methods.size()];
    results[static_cast<std::size_t>(i)] =
        fit_mode(m, d, s, fit_config(spec, spec.ranks[row], restart_seed(spec)), spec.lambdas.front());
  });

  int max_iter_cells = 0;
  for (const auto& f : results) {
    if (f->result.termination == Termination::max_iters) ++max_iter_cells;
    assert_monotone(f->result.objective_trace);
  }

  prepare_out_dir(spec);
  {
    std::ofstream f = open_output(spec.out_dir / "sweep_rank.csv");
    f << "r";
    for (Mode m : methods) f << ',' << mode_name(m);
    f << '\n';
    for (std::size_t row = 0; row < spec.ranks.size(); ++row) {
      f << spec.ranks[row];
      for (std::size_t c = 0; c < methods.size(); ++c) f << ',' << results[row * methods.size() + c]->min_class_variance;
      f << '\n';
    }
  }
  write_manifest(spec, "sweep-rank", {"max_iters_cells = " + std::to_string(max_iter_cells)});
  out << "wrote " << (spec.out_dir / "sweep_rank.csv").string() << " (" << spec.ranks.size() << " rows)\n";

  bool nested_ok = true;
  for (std::size_t row = 1; row < spec.ranks.size(); ++row) {
    if (spec.ranks[row] <= spec.ranks[row - 1]) continue;
    const double prev = results[(row - 1) * methods.size()]->min_class_variance;
    const double cur = results[row * methods.size()]->min_class_variance;
    if (cur < prev - 1e-6 * std::max(1.0, std::abs(prev))) nested_ok = false;
  }
  if (!nested_ok) err << "warning: fpca objective decreased with increasing rank\n";
  if (max_iter_cells > 0) err << "warning: " << max_iter_cells << " cells reached max-iters\n";
  return (nested_ok && max_iter_cells == 0) ? kOk : kSolverDiagnostic;
}

int cmd_sweep_lambda(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  spec.validate();
  if (spec.ranks.size() != 1) throw InputError("sweep-lambda takes a single --rank");
  const ClassedDataset d = load_or_throw_data_error(spec);
  const ScatterSet s = class_scatter(d);
  const int cells = static_cast<int>(spec.lambdas.size());
  std::vector<std::optional<Fitted>> results(static_cast<std::size_t>(cells));
  parallel_for(cells, spec.workers, [&](int i) {
    results[static_cast<std::size_t>(i)] = fit_mode(Mode::fspca, d, s, fit_config(spec, spec.ranks.front(), restart_seed(spec)),
                                                    spec.lambdas[static_cast<std::size_t>(i)]);
  });

  int max_iter_cells = 0;
  for (const auto& f : results) {
    if (f->result.termination == Termination::max_iters) ++max_iter_cells;
    assert_monotone(f->result.objective_trace);
  }

  prepare_out_dir(spec);
  {
    std::ofstream f = open_output(spec.out_dir / "sweep_lambda.csv");
    f << "lambda,objective,min_class_variance,nonzeros,iterations\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const FitResult& r = results[i]->result;
      f << spec.lambdas[i] << ',' << r.objective_trace.back() << ',' << results[i]->min_class_variance << ','
        << count_nonzeros(r.u.matrix(), SparseConfig{}.zero_threshold) << ',' << r.iterations << '\n';
    }
  }
  write_manifest(spec, "sweep-lambda", {"max_iters_cells = " + std::to_string(max_iter_cells)});
  out << "wrote " << (spec.out_dir / "sweep_lambda.csv").string() << " (" << results.size() << " rows)\n";
  if (max_iter_cells > 0) {
    err << "warning: " << max_iter_cells << " cells reached max-iters\n";
    return kSolverDiagnostic;
  }
  return kOk;
}

int cmd_outlier_study(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  spec.validate();
  if (spec.ranks.size() != 1) throw InputError("outlier-study takes a single --rank");
  std::optional<ClassedDataset> fixed;
  if (spec.input) fixed = load_or_throw_data_error(spec);
  const SynthSource synth = spec.synth.value_or(SynthSource{});
  const Eigen::Index r = spec.ranks.front();
  const std::size_t n_alpha = spec.alphas.size();
  const int runs = spec.seeds;

  struct RunErrors {
    std::vector<double> fpca, frpca;
    int max_iter_fits = 0;
  };
  std::vector<RunErrors> per_run(static_cast<std::size_t>(runs));
  parallel_for(runs, spec.workers, [&](int run) {
    const OutlierRunSeeds seeds = outlier_run_seeds(spec, run);
    const ClassedDataset clean =
        fixed ? *fixed
              : synth_gaussian(synth.n, std::vector<Eigen::Index>(static_cast<std::size_t>(synth.k), synth.per_class),
                               seeds.data);
    FitConfig cfg = fit_config(spec, r, seeds.restarts);
    cfg.restarts = 1;
    const FitResult reference = fit_fpca(class_scatter(clean), cfg);
    RunErrors& e = per_run[static_cast<std::size_t>(run)];
    e.max_iter_fits += reference.termination == Termination::max_iters;
    for (double alpha : spec.alphas) {
      // same outlier positions for every alpha
      const ClassedDataset corrupt = inject_outliers(clean, spec.fraction, alpha, seeds.outliers);
      const FitResult fp = fit_fpca(class_scatter(corrupt), cfg);
      const FitResult fr = fit_frpca(corrupt, cfg, fp.u);
      assert_monotone(fp.objective_trace);
      assert_monotone(fr.objective_trace);
      e.max_iter_fits += (fp.termination == Termination::max_iters) + (fr.termination == Termination::max_iters);
      e.fpca.push_back(normalized_subspace_error(fp.u.matrix(), reference.u.matrix()));
      e.frpca.push_back(normalized_subspace_error(fr.u.matrix(), reference.u.matrix()));
    }
  });

  int max_iter_fits = 0;
  std::vector<double> fpca_mean(n_alpha, 0.0), frpca_mean(n_alpha, 0.0);
  for (const RunErrors& e : per_run) {
    max_iter_fits += e.max_iter_fits;
    for (std::size_t a = 0; a < n_alpha; ++a) {
      fpca_mean[a] += e.fpca[a] / runs;
      frpca_mean[a] += e.frpca[a] / runs;
    }
  }

  prepare_out_dir(spec);
  {
    std::ofstream f = open_output(spec.out_dir / "outlier_study.csv");
    f << "alpha,fpca,frpca\n";
    for (std::size_t a = 0; a < n_alpha; ++a)
      f << spec.alphas[a] << ',' << fpca_mean[a] << ',' << frpca_mean[a] << '\n';
  }
  std::vector<std::string> extra{"max_iters_fits = " + std::to_string(max_iter_fits)};
  for (int run = 0; run < runs; ++run) {
    const OutlierRunSeeds s = outlier_run_seeds(spec, run);
    extra.push_back("run " + std::to_string(run) + " = data " + std::to_string(s.data) + ", outliers " +
                    std::to_string(s.outliers) + ", restarts " + std::to_string(s.restarts));
  }
  write_manifest(spec, "outlier-study", extra);
  out << "wrote " << (spec.out_dir / "outlier_study.csv").string() << " (" << n_alpha << " rows)\n";
  if (max_iter_fits > 0) {
    err << "warning: " << max_iter_fits << " fits reached max-iters\n";
    return kSolverDiagnostic;
  }
  return kOk;
}

int cmd_synth(const ExperimentSpec& spec, std::ostream& out, std::ostream&) {
  if (!spec.synth || spec.input) throw InputError("synth requires --synth and no --input");
  const ClassedDataset d = load_data(spec);
  prepare_out_dir(spec);
  const std::filesystem::path path = spec.out_dir / "data.csv";
  write_csv(path, d);
  write_manifest(spec, "synth");
  out << "wrote " << path.string() << " (" << d.samples() << " samples, " << d.dim() << " features, "
      << d.k << " classes)\n";
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair PCA, fair sparse PCA and fair robust PCA by minorization-maximization"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::optional<std::string> input, synth;
  std::vector<std::string> ranks;
  bool no_header = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--mode", spec.mode, "fpca, fspca, frpca or pca")
        ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
    cmd->add_option("--input", input, "CSV file, one sample per row");
    cmd->add_option("--synth", synth, "synthetic Gaussian data: n,K,per-class");
    cmd->add_option("--label-column", spec.label_column, "label column name or zero-based index");
    cmd->add_flag("--no-header", no_header, "CSV has no header row");
    cmd->add_option("--rank", ranks, "rank, list or range a:b")->delimiter(',');
    cmd->add_option("--lambda", spec.lambdas, "sparsity weight(s)")->delimiter(',');
    cmd->add_option("--alpha", spec.alphas, "outlier magnitude(s)")->delimiter(',');
    cmd->add_option("--fraction", spec.fraction, "fraction of samples replaced by outliers");
    cmd->add_option("--epsilon", spec.epsilon, "relative change of U to stop at");
    cmd->add_option("--max-iters", spec.max_iters, "MM iteration cap");
    cmd->add_option("--seeds", spec.seeds, "random restarts, or Monte-Carlo runs for outlier-study");
    cmd->add_option("--master-seed", spec.master_seed, "master seed");
    cmd->add_option("--out-dir", spec.out_dir, "output directory");
    cmd->add_option("--weight-solver", spec.weight_solver, "alternating or bisection")
        ->transform(CLI::CheckedTransformer(kSolvers, CLI::ignore_case));
    cmd->add_option("--workers", spec.workers, "worker threads");
  };

  using Verb = int (*)(const ExperimentSpec&, std::ostream&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Verb>> verbs{
      {"fit", "fit one model and write its trace", cmd_fit},
      {"sweep-rank", "min-class variance against rank", cmd_sweep_rank},
      {"sweep-lambda", "fair sparse PCA against lambda", cmd_sweep_lambda},
      {"outlier-study", "subspace error against outlier magnitude", cmd_outlier_study},
      {"synth", "write a synthetic dataset CSV", cmd_synth},
  };
  std::vector<CLI::App*> cmds;
  for (const auto& [name, help, fn] : verbs) {
    cmds.push_back(app.add_subcommand(name, help));
    add_common(cmds.back());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInvalidArguments;
  }

  try {
    if (input) spec.input = *input;
    if (synth) spec.synth = parse_synth(*synth);
    if (!ranks.empty()) spec.ranks = parse_ranks(ranks);
    spec.has_header = !no_header;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  }

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (!cmds[i]->parsed()) continue;
    try {
      return std::get<2>(verbs[i])(spec, out, err);
    } catch (const DataError& e) {
      err << "data error: " << e.what() << '\n';
      return kDataError;
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kInvalidArguments;
    } catch (const MonotonicityViolation& e) {
      err << "solver error: " << e.what() << '\n';
      return kSolverDiagnostic;
    } catch (const std::exception& e) {
      err << "solver error: " << e.what() << '\n';
      return kSolverDiagnostic;
    }
  }
  return kInvalidArguments;
}

} // namespace fairpca::cli
