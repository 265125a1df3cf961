#ifndef FAIRPCA_DATAIO_HPP
#define FAIRPCA_DATAIO_HPP

#include "fairpca/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fairpca {

/// Malformed or unreadable data (bad cell, missing file).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Samples as columns of y (n x N), each tagged with a class id in [1, k].
struct ClassedDataset {
  Matrix y;
  std::vector<int> labels;
  int k = 0;

  Eigen::Index dim() const { return y.rows(); }
  Eigen::Index samples() const { return y.cols(); }

  /// Y_k: the columns of y belonging to class `cls` (1-based), in file order.
  Matrix class_block(int cls) const;
  std::vector<Eigen::Index> class_counts() const;

  /// Checks labels against k and the column count; every class must occur.
  void validate() const;
};

/// Per-class scatter matrices R_k = Y_k Y_k^T.
struct ScatterSet {
  std::vector<Matrix> r_k;
  Eigen::Index n = 0;
  int k = 0;
  std::vector<Eigen::Index> samples_per_class;

  Matrix total() const;
};

/// Label column selector: zero-based index or header name.
using LabelColumn = std::variant<std::size_t, std::string>;

/// Reads one sample per row. Feature columns become rows of y and the data
/// are mean-centered. Integer labels that already cover 1..K are kept;
/// anything else is mapped to dense ids in first-appearance order.
ClassedDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                        bool has_header);

/// Writes the dataset in the format load_csv reads (label column last,
/// header "x1,...,xn,label").
void write_csv(const std::filesystem::path& path, const ClassedDataset& d);

/// Subtracts the row means.
Matrix mean_center(const Matrix& y);

ScatterSet class_scatter(const ClassedDataset& d);

/// Per class k: draws an n x n Gaussian factor F_k and samples y = F_k e with
/// e ~ N(0, I). Classes are stored contiguously in order 1..K; the pooled
/// data are then globally mean-centered.
ClassedDataset synth_gaussian(Eigen::Index n, const std::vector<Eigen::Index>& per_class,
                              std::uint64_t seed);

/// Replaces floor(fraction * N) columns with draws from N(alpha * 1, I).
/// Each replacement first picks a class uniformly among those with
/// uncorrupted columns left, then a column uniformly inside it. The result
/// is not re-centered.
ClassedDataset inject_outliers(const ClassedDataset& d, double fraction, double alpha,
                               std::uint64_t seed);

} // namespace fairpca

#endif // FAIRPCA_DATAIO_HPP
