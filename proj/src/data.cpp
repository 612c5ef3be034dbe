#include "anorand/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "anorand/errors.hpp"
#include "anorand/rng.hpp"

namespace anorand {

std::size_t Dataset::count_label(int value) const {
  if (!labels) return 0;
  return static_cast<std::size_t>(std::count(labels->begin(), labels->end(), value));
}

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features = features.select_rows(indices);
  if (labels) {
    std::vector<int> sub;
    sub.reserve(indices.size());
    for (std::size_t i : indices) sub.push_back((*labels)[i]);
    out.labels = std::move(sub);
  }
  out.feature_names = feature_names;
  out.feature_means = feature_means;
  out.feature_stds = feature_stds;
  return out;
}

Dataset Dataset::filter_by_label(int value) const {
  if (!labels) throw ValidationError("dataset has no labels to filter on");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < labels->size(); ++i)
    if ((*labels)[i] == value) keep.push_back(i);
  return select(keep);
}

void Dataset::validate() const {
  if (labels) {
    if (labels->size() != features.rows()) {
      throw ValidationError("label count " + std::to_string(labels->size()) +
                            " does not match row count " + std::to_string(features.rows()));
    }
    for (int v : *labels)
      if (v != 0 && v != 1) throw ValidationError("label value outside {0,1}: " + std::to_string(v));
  }
  if (!feature_names.empty() && feature_names.size() != features.cols()) {
    throw ValidationError("feature name count does not match column count");
  }
  if (!features.all_finite()) throw ValidationError("dataset contains non-finite values");
}

void SyntheticOptions::validate() const {
  if (n < 10) throw ArgumentError("n must be >= 10 (got " + std::to_string(n) + ")");
  if (d < 2) throw ArgumentError("d must be >= 2 (got " + std::to_string(d) + ")");
  if (!(imbalance > 0.0 && imbalance < 0.5)) {
    throw ArgumentError("imbalance must lie in (0, 0.5) (got " + std::to_string(imbalance) + ")");
  }
  if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
    throw ArgumentError("flip_fraction must lie in [0, 1] (got " + std::to_string(flip_fraction) +
                        ")");
  }
  if (!(class_sep >= 0.0) || !std::isfinite(class_sep)) {
    throw ArgumentError("class_sep must be a finite non-negative number");
  }
  if (n_informative > d) throw ArgumentError("n_informative must not exceed d");
  if (clusters_per_class == 0) throw ArgumentError("clusters_per_class must be >= 1");
  const std::size_t informative = n_informative == 0 ? d : n_informative;
  if (informative < 63 && (std::uint64_t{1} << informative) < 2 * clusters_per_class) {
    throw ArgumentError("not enough hypercube vertices for the requested clusters");
  }
}

namespace {

std::vector<std::vector<int>> pick_vertices(Rng& rng, std::size_t count, std::size_t dims) {
  std::vector<std::vector<int>> vertices;
  while (vertices.size() < count) {
    std::vector<int> v(dims);
    for (int& bit : v) bit = static_cast<int>(rng.next_u64() >> 63);
    if (std::find(vertices.begin(), vertices.end(), v) == vertices.end()) vertices.push_back(v);
  }
  return vertices;
}

}  // namespace

SyntheticData generate_synthetic_detailed(const SyntheticOptions& options) {
  options.validate();
  const std::size_t n = options.n;
  const std::size_t d = options.d;
  const std::size_t informative = options.n_informative == 0 ? d : options.n_informative;
  const std::size_t per_class = options.clusters_per_class;
  const std::size_t n_clusters = 2 * per_class;

  auto n_minority = static_cast<std::size_t>(std::llround(options.imbalance * static_cast<double>(n)));
  n_minority = std::max<std::size_t>(n_minority, 1);
  const std::size_t n_majority = n - n_minority;

  Rng rng = Rng(options.seed).split(Stream::kData);

  SyntheticData out;
  out.centroids = Matrix(n_clusters, informative);
  const auto vertices = pick_vertices(rng, n_clusters, informative);
  for (std::size_t c = 0; c < n_clusters; ++c)
    for (std::size_t j = 0; j < informative; ++j)
      out.centroids(c, j) = (vertices[c][j] != 0 ? 1.0 : -1.0) * options.class_sep;

  Matrix mixing(informative, informative);
  for (double& v : mixing.values()) v = rng.uniform(-1.0, 1.0);

  // Rows are laid out majority first, then shuffled.
  std::vector<int> classes(n, 0);
  std::fill(classes.begin() + static_cast<std::ptrdiff_t>(n_majority), classes.end(), 1);
  std::vector<std::size_t> cluster(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t within = classes[i] == 0 ? i : i - n_majority;
    cluster[i] = static_cast<std::size_t>(classes[i]) * per_class + within % per_class;
  }

  Matrix noise(n, informative);
  for (double& v : noise.values()) v = rng.normal();
  Matrix mixed = matmul(noise, mixing);

  Matrix latent(n, informative);
  Matrix features(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < informative; ++j) {
      const double centre = out.centroids(cluster[i], j);
      latent(i, j) = centre + noise(i, j);
      features(i, j) = centre + mixed(i, j);
    }
    for (std::size_t j = informative; j < d; ++j) features(i, j) = rng.normal();
  }

  // Label noise: swap labels between equal-sized random subsets of the two
  // classes, so class counts are unchanged.
  std::vector<int> labels = classes;
  const auto requested =
      static_cast<std::size_t>(std::llround(options.flip_fraction * static_cast<double>(n) / 2.0));
  const std::size_t n_swap = std::min({requested, n_minority, n_majority});
  if (n_swap > 0) {
    std::vector<std::size_t> majority(n_majority);
    std::iota(majority.begin(), majority.end(), std::size_t{0});
    std::vector<std::size_t> minority(n_minority);
    std::iota(minority.begin(), minority.end(), n_majority);
    rng.shuffle(majority);
    rng.shuffle(minority);
    for (std::size_t s = 0; s < n_swap; ++s) {
      labels[majority[s]] = 1;
      labels[minority[s]] = 0;
    }
  }

  const std::vector<std::size_t> order = rng.permutation(n);
  out.dataset.features = features.select_rows(order);
  out.cluster_coordinates = latent.select_rows(order);
  std::vector<int> shuffled_labels(n);
  out.clean_labels.resize(n);
  out.cluster_of_row.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    shuffled_labels[i] = labels[order[i]];
    out.clean_labels[i] = classes[order[i]];
    out.cluster_of_row[i] = cluster[order[i]];
  }
  out.dataset.labels = std::move(shuffled_labels);
  out.dataset.feature_names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) out.dataset.feature_names.push_back("f" + std::to_string(j));
  return out;
}

Dataset generate_synthetic(const SyntheticOptions& options) {
  return generate_synthetic_detailed(options).dataset;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path.string() + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  return split_line(line);
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path.string() + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_line(line);

  std::optional<std::size_t> label_idx;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw ValidationError("label column '" + *label_column + "' not found in '" +
                            path.string() + "'");
    }
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  Dataset ds;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) ds.feature_names.push_back(header[c]);
  const std::size_t d = ds.feature_names.size();
  if (d == 0) throw ValidationError("'" + path.string() + "' has no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(row + 1) + " (line " + std::to_string(line_no) +
                       ") has " + std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ParseError("non-numeric cell '" + cells[c] + "' at row " + std::to_string(row + 1) +
                         ", column '" + header[c] + "'");
      }
      if (c == label_idx) {
        if (v != 0.0 && v != 1.0) {
          throw ValidationError("label value '" + cells[c] + "' at row " +
                                std::to_string(row + 1) + " is outside {0,1}");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    ++row;
  }
  if (row == 0) throw ValidationError("'" + path.string() + "' has no rows");

  ds.features = Matrix(row, d, std::move(values));
  if (label_idx) ds.labels = std::move(labels);
  return ds;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::size_t d = dataset.cols();
  for (std::size_t j = 0; j < d; ++j) {
    if (j) out << ',';
    out << (dataset.feature_names.size() == d ? dataset.feature_names[j] : "f" + std::to_string(j));
  }
  if (dataset.labels) out << ',' << label_column;
  out << '\n';
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_double(dataset.features(i, j));
    }
    if (dataset.labels) out << ',' << (*dataset.labels)[i];
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Matrix apply_standardization(const Matrix& features, const std::vector<double>& means,
                             const std::vector<double>& stds) {
  if (means.size() != features.cols() || stds.size() != features.cols()) {
    throw DimensionError("standardization statistics have " + std::to_string(means.size()) +
                         " columns, data has " + std::to_string(features.cols()));
  }
  Matrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - means[c]) / stds[c];
  }
  return out;
}

StandardizedSets standardize(const Dataset& train, const std::vector<Dataset>& others) {
  const std::size_t d = train.cols();
  for (const auto& o : others) {
    if (o.cols() != d) {
      throw DimensionError("standardize: train has " + std::to_string(d) + " columns, other has " +
                           std::to_string(o.cols()));
    }
  }
  if (train.rows() == 0) throw ValidationError("standardize: empty training set");

  std::vector<double> means(d, 0.0);
  std::vector<double> stds(d, 0.0);
  const double n = static_cast<double>(train.rows());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    auto row = train.features.row(r);
    for (std::size_t c = 0; c < d; ++c) means[c] += row[c];
  }
  for (double& m : means) m /= n;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    auto row = train.features.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = row[c] - means[c];
      stds[c] += diff * diff;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    stds[c] = std::sqrt(stds[c] / n);
    if (stds[c] < 1e-12) {
      means[c] = 0.0;
      stds[c] = 1.0;
    }
  }

  auto transform = [&](const Dataset& ds) {
    Dataset out = ds;
    out.features = apply_standardization(ds.features, means, stds);
    out.feature_means = means;
    out.feature_stds = stds;
    return out;
  };
  StandardizedSets result{transform(train), {}};
  result.others.reserve(others.size());
  for (const auto& o : others) result.others.push_back(transform(o));
  return result;
}

SplitResult split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw ArgumentError("test_fraction must lie in (0, 1) (got " +
                        std::to_string(spec.test_fraction) + ")");
  }
  if (spec.stratified && !dataset.labels) {
    throw ValidationError("stratified split requires labels");
  }
  Rng rng = Rng(spec.seed).split(Stream::kSplit);

  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratified) {
    groups.resize(2);
    for (std::size_t i = 0; i < dataset.rows(); ++i)
      groups[static_cast<std::size_t>((*dataset.labels)[i])].push_back(i);
  } else {
    groups.emplace_back(dataset.rows());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }

  SplitResult result;
  for (auto& group : groups) {
    rng.shuffle(group);
    const auto n_test = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(group.size())));
    result.test_indices.insert(result.test_indices.end(), group.begin(),
                               group.begin() + static_cast<std::ptrdiff_t>(n_test));
    result.train_indices.insert(result.train_indices.end(),
                                group.begin() + static_cast<std::ptrdiff_t>(n_test), group.end());
  }
  std::sort(result.train_indices.begin(), result.train_indices.end());
  std::sort(result.test_indices.begin(), result.test_indices.end());
  result.train = dataset.select(result.train_indices);
  result.test = dataset.select(result.test_indices);
  return result;
}

}  // namespace anorand
