#ifndef FAIRPCA_CLI_HPP
#define FAIRPCA_CLI_HPP

#include "fairpca/fpca.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairpca::cli {

enum class Mode { fpca, fspca, frpca, pca };

enum ExitCode : int {
  kOk = 0,
  kInvalidArguments = 1,
  kDataError = 2,
  kSolverDiagnostic = 3,
};

struct SynthSource {
  Eigen::Index n = 10;
  int k = 2;
  Eigen::Index per_class = 50;
};

struct ExperimentSpec {
  Mode mode = Mode::fpca;
  std::optional<std::filesystem::path> input;
  std::optional<SynthSource> synth;
  std::string label_column = "label"; // header name, or a zero-based index
  bool has_header = true;
  std::vector<Eigen::Index> ranks{1};
  std::vector<double> lambdas{0.0};
  double fraction = 0.1;
  std::vector<double> alphas{0.0};
  int seeds = 1; // restarts for fits and sweeps, Monte-Carlo runs for outlier-study
  std::uint64_t master_seed = 0;
  double epsilon = 1e-5;
  int max_iters = 500;
  WeightSolverKind weight_solver = WeightSolverKind::alternating;
  int workers = 1;
  std::filesystem::path out_dir = ".";

  /// Throws InputError on an inconsistent spec.
  void validate() const;
};

/// Seeds split from the master seed: slot 0 generates synthetic data and
/// slot 1 seeds random restarts. Outlier-study run s uses slots 2 + 3s
/// (clean data), 3 + 3s (outlier placement) and 4 + 3s (restarts).
std::uint64_t data_seed(const ExperimentSpec& spec);
std::uint64_t restart_seed(const ExperimentSpec& spec);
struct OutlierRunSeeds {
  std::uint64_t data, outliers, restarts;
};
OutlierRunSeeds outlier_run_seeds(const ExperimentSpec& spec, int run);

/// Loads or generates the dataset. Throws DataError or InputError.
ClassedDataset load_data(const ExperimentSpec& spec);

int cmd_fit(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep_rank(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep_lambda(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_outlier_study(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_synth(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a verb. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// A fit trace that decreased between iterates.
class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws MonotonicityViolation if the trace decreases by more than
/// slack * max(1, |f|) between consecutive iterates.
void assert_monotone(const std::vector<double>& trace, double slack = 1e-9);

} // namespace fairpca::cli

#endif // FAIRPCA_CLI_HPP
