#include "fairpca/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace fairpca {

Matrix ClassedDataset::class_block(int cls) const {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (labels[j] == cls)
      cols.push_back(static_cast<Eigen::Index>(j));
  Matrix block(y.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    block.col(static_cast<Eigen::Index>(j)) = y.col(cols[j]);
  return block;
}

std::vector<Eigen::Index> ClassedDataset::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int l : labels)
    if (l >= 1 && l <= k)
      ++counts[static_cast<std::size_t>(l - 1)];
  return counts;
}

void ClassedDataset::validate() const {
  require_finite(y, "ClassedDataset");
  if (k < 1)
    throw InputError("ClassedDataset: need at least one class");
  if (static_cast<Eigen::Index>(labels.size()) != y.cols())
    throw InputError("ClassedDataset: label count does not match sample count");
  for (int l : labels)
    if (l < 1 || l > k)
      throw InputError("ClassedDataset: label " + std::to_string(l) + " outside [1, k]");
  for (Eigen::Index c : class_counts())
    if (c == 0)
      throw InputError("ClassedDataset: empty class");
}

Matrix ScatterSet::total() const {
  Matrix sum = Matrix::Zero(n, n);
  for (const Matrix& r : r_k)
    sum += r;
  return sum;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty())
    return false;
  const char* begin = cell.data();
  if (*begin == '+')
    ++begin;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& cell, long& out) {
  if (cell.empty())
    return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::vector<int> dense_labels(const std::vector<std::string>& raw, int& k) {
  std::vector<long> ints;
  ints.reserve(raw.size());
  for (const std::string& s : raw) {
    long v = 0;
    if (!parse_int(s, v))
      break;
    ints.push_back(v);
  }
  if (ints.size() == raw.size()) {
    const std::set<long> distinct(ints.begin(), ints.end());
    const long kk = static_cast<long>(distinct.size());
    if (*distinct.begin() == 1 && *distinct.rbegin() == kk) {
      k = static_cast<int>(kk);
      return {ints.begin(), ints.end()};
    }
  }
  std::map<std::string, int> ids;
  std::vector<int> labels;
  labels.reserve(raw.size());
  for (const std::string& s : raw) {
    auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()) + 1);
    labels.push_back(it->second);
  }
  k = static_cast<int>(ids.size());
  return labels;
}

} // namespace

ClassedDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                        bool has_header) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open CSV file: " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    if (has_header && header.empty()) {
      header = split_row(line);
      continue;
    }
    rows.push_back(split_row(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty())
    throw InputError("CSV file has no data rows: " + path.string());

  const std::size_t width = rows.front().size();
  std::size_t label_idx = 0;
  if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
    label_idx = *idx;
  } else {
    const std::string& name = std::get<std::string>(label_column);
    if (header.empty())
      throw InputError("label column given by name but CSV has no header");
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("label column '" + name + "' not found in header of " + path.string());
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  if (label_idx >= width)
    throw InputError("label column index " + std::to_string(label_idx) + " out of range");
  if (width < 2)
    throw DataError("CSV needs at least one feature column besides the label");

  const auto n = static_cast<Eigen::Index>(width - 1);
  const auto count = static_cast<Eigen::Index>(rows.size());
  ClassedDataset d;
  d.y.resize(n, count);
  std::vector<std::string> raw_labels;
  raw_labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cells = rows[i];
    if (cells.size() != width)
      throw DataError("row " + std::to_string(line_numbers[i]) + ": expected " +
                      std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_idx) {
        raw_labels.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cells[c], v))
        throw DataError("row " + std::to_string(line_numbers[i]) + ", column " +
                        std::to_string(c + 1) + ": non-numeric value '" + cells[c] + "'");
      d.y(feature++, static_cast<Eigen::Index>(i)) = v;
    }
  }
  d.labels = dense_labels(raw_labels, d.k);
  d.y = mean_center(d.y);
  d.validate();
  return d;
}

void write_csv(const std::filesystem::path& path, const ClassedDataset& d) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write CSV file: " + path.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < d.dim(); ++i)
    out << 'x' << (i + 1) << ',';
  out << "label\n";
  for (Eigen::Index j = 0; j < d.samples(); ++j) {
    for (Eigen::Index i = 0; i < d.dim(); ++i)
      out << d.y(i, j) << ',';
    out << d.labels[static_cast<std::size_t>(j)] << '\n';
  }
}

Matrix mean_center(const Matrix& y) {
  if (y.cols() < 1)
    throw InputError("mean_center: no samples");
  const Vector mean = y.rowwise().mean();
  return y.colwise() - mean;
}

ScatterSet class_scatter(const ClassedDataset& d) {
  d.validate();
  ScatterSet s;
  s.n = d.dim();
  s.k = d.k;
  s.samples_per_class = d.class_counts();
  s.r_k.reserve(static_cast<std::size_t>(d.k));
  for (int cls = 1; cls <= d.k; ++cls) {
    const Matrix block = d.class_block(cls);
    Matrix r = block * block.transpose();
    // exact symmetry; the product is symmetric up to summation order
    r = 0.5 * (r + r.transpose()).eval();
    s.r_k.push_back(std::move(r));
  }
  return s;
}

ClassedDataset synth_gaussian(Eigen::Index n, const std::vector<Eigen::Index>& per_class,
                              std::uint64_t seed) {
  if (n < 1)
    throw InputError("synth_gaussian: n must be positive");
  if (per_class.empty())
    throw InputError("synth_gaussian: need at least one class");
  Eigen::Index total = 0;
  for (Eigen::Index c : per_class) {
    if (c < 1)
      throw InputError("synth_gaussian: every class needs at least one sample");
    total += c;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i)
        m(i, j) = normal(rng);
    return m;
  };

  ClassedDataset d;
  d.k = static_cast<int>(per_class.size());
  d.y.resize(n, total);
  d.labels.reserve(static_cast<std::size_t>(total));
  Eigen::Index offset = 0;
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    const Matrix factor = gaussian(n, n);
    d.y.middleCols(offset, per_class[k]) = factor * gaussian(n, per_class[k]);
    d.labels.insert(d.labels.end(), static_cast<std::size_t>(per_class[k]), static_cast<int>(k) + 1);
    offset += per_class[k];
  }
  d.y = mean_center(d.y);
  return d;
}

ClassedDataset inject_outliers(const ClassedDataset& d, double fraction, double alpha,
                               std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InputError("inject_outliers: fraction must lie in [0, 1]");
  d.validate();
  ClassedDataset out = d;
  const auto count = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(d.samples())));
  if (count == 0)
    return out;

  // untouched columns per class
  std::vector<std::vector<Eigen::Index>> pool(static_cast<std::size_t>(d.k));
  for (std::size_t j = 0; j < d.labels.size(); ++j)
    pool[static_cast<std::size_t>(d.labels[j] - 1)].push_back(static_cast<Eigen::Index>(j));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(alpha, 1.0);
  for (Eigen::Index m = 0; m < count; ++m) {
    std::vector<std::size_t> eligible;
    for (std::size_t c = 0; c < pool.size(); ++c)
      if (!pool[c].empty())
        eligible.push_back(c);
    std::uniform_int_distribution<std::size_t> pick_class(0, eligible.size() - 1);
    auto& cols = pool[eligible[pick_class(rng)]];
    std::uniform_int_distribution<std::size_t> pick_col(0, cols.size() - 1);
    const std::size_t slot = pick_col(rng);
    const Eigen::Index col = cols[slot];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(slot));
    for (Eigen::Index i = 0; i < out.dim(); ++i)
      out.y(i, col) = normal(rng);
  }
  return out;
}

} // namespace fairpca
