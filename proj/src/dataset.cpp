#include "miret/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "miret/random.hpp"

namespace miret {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i < line.size() && line[i] == '"') quoted = !quoted;
    if (i == line.size() || (line[i] == ',' && !quoted)) {
      out.push_back(trim(std::string_view(line).substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && std::isfinite(v);
}

// Largest-remainder allocation of `total` items across groups proportional to sizes.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, std::size_t total) {
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> alloc(sizes.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double exact = static_cast<double>(total) * static_cast<double>(sizes[g]) / static_cast<double>(n);
    alloc[g] = static_cast<std::size_t>(std::floor(exact));
    used += alloc[g];
    rem.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < total && r < rem.size(); ++r, ++used) alloc[rem[r].second]++;
  return alloc;
}

}  // namespace

void Dataset::validate() const {
  if (features.size() != num_rows * num_features) throw InputError("feature matrix size mismatch");
  if (labels.size() != num_rows) throw InputError("label count does not match row count");
  if (feature_names.size() != num_features) throw InputError("feature name count mismatch");
  for (double v : features) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("feature value outside [0,1]");
  }
  for (Label y : labels) {
    if (y != -1 && y != 1) throw InputError("label must be -1 or +1");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.num_rows = rows.size();
  out.num_features = num_features;
  out.feature_names = feature_names;
  out.label_names = label_names;
  out.features.reserve(rows.size() * num_features);
  for (std::size_t r : rows) {
    if (r >= num_rows) throw InputError("row index out of range");
    auto x = row(r);
    out.features.insert(out.features.end(), x.begin(), x.end());
    out.labels.push_back(labels[r]);
    out.source_rows.push_back(source_rows.empty() ? r : source_rows[r]);
  }
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& data) {
  MinMaxScaler s;
  s.lo.assign(data.num_features, 0.0);
  s.hi.assign(data.num_features, 0.0);
  for (std::size_t j = 0; j < data.num_features; ++j) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      lo = std::min(lo, data.at(i, j));
      hi = std::max(hi, data.at(i, j));
    }
    s.lo[j] = data.num_rows ? lo : 0.0;
    s.hi[j] = data.num_rows ? hi : 0.0;
  }
  return s;
}

void MinMaxScaler::transform(Dataset& data) const {
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    for (std::size_t j = 0; j < data.num_features; ++j) {
      double& v = data.features[i * data.num_features + j];
      const double range = hi[j] - lo[j];
      v = range > 0.0 ? std::clamp((v - lo[j]) / range, 0.0, 1.0) : 0.0;
    }
  }
}

void normalize(Dataset& data) { MinMaxScaler::fit(data).transform(data); }

Dataset make_dataset(std::vector<double> raw_features, std::vector<Label> labels,
                     std::vector<std::string> feature_names) {
  Dataset d;
  d.num_features = feature_names.size();
  d.num_rows = labels.size();
  d.features = std::move(raw_features);
  d.labels = std::move(labels);
  d.feature_names = std::move(feature_names);
  d.source_rows.resize(d.num_rows);
  std::iota(d.source_rows.begin(), d.source_rows.end(), std::size_t{0});
  if (d.features.size() != d.num_rows * d.num_features) throw InputError("feature matrix size mismatch");
  normalize(d);
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty dataset file: " + path.string());
  const auto header = split_fields(line);
  auto it = std::find(header.begin(), header.end(), label_column);
  if (it == header.end()) throw InputError("label column '" + label_column + "' not found");
  const std::size_t label_idx = static_cast<std::size_t>(it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) names.push_back(header[c]);
  }
  std::vector<double> raw;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_idx) {
        if (fields[c].empty()) throw InputError("line " + std::to_string(line_no) + ": missing label");
        raw_labels.push_back(fields[c]);
        continue;
      }
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw InputError("line " + std::to_string(line_no) + ": non-numeric value '" + fields[c] + "' in column " +
                         header[c]);
      }
      raw.push_back(v);
    }
  }
  if (raw_labels.empty()) throw InputError("dataset has no rows: " + path.string());
  const std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() != 2) {
    throw InputError("label column must have exactly two distinct values, found " + std::to_string(distinct.size()));
  }
  const std::string& neg = *distinct.begin();
  std::vector<Label> labels;
  labels.reserve(raw_labels.size());
  for (const auto& s : raw_labels) labels.push_back(s == neg ? -1 : 1);
  Dataset d = make_dataset(std::move(raw), std::move(labels), std::move(names));
  d.label_names = {*distinct.begin(), *distinct.rbegin()};
  return d;
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& n : data.feature_names) out << n << ',';
  out << label_column << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    for (std::size_t j = 0; j < data.num_features; ++j) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, data.at(i, j));
      out.write(buf, p - buf);
      out << ',';
    }
    out << data.labels[i] << '\n';
  }
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (data.empty()) throw InputError("cannot split an empty dataset");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InputError("train_fraction must lie strictly between 0 and 1");
  }
  const auto n_train = static_cast<std::size_t>(std::lround(spec.train_fraction * static_cast<double>(data.num_rows)));
  if (n_train == 0 || n_train >= data.num_rows) throw InputError("train_fraction leaves one side of the split empty");

  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < data.num_rows; ++i) (data.labels[i] < 0 ? neg : pos).push_back(i);
  Rng rng(derive_seed(spec.seed, 0));
  std::shuffle(neg.begin(), neg.end(), rng);
  std::shuffle(pos.begin(), pos.end(), rng);

  std::vector<std::size_t> sizes{neg.size(), pos.size()};
  auto alloc = apportion(sizes, n_train);
  // Keep both classes in train whenever the input has both.
  for (std::size_t g = 0; g < 2; ++g) {
    const std::size_t other = 1 - g;
    if (sizes[g] > 0 && alloc[g] == 0 && alloc[other] > 1) {
      alloc[g] = 1;
      alloc[other]--;
    }
  }
  std::vector<std::size_t> train_idx(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(alloc[0]));
  train_idx.insert(train_idx.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(alloc[1]));
  std::vector<std::size_t> test_idx(neg.begin() + static_cast<std::ptrdiff_t>(alloc[0]), neg.end());
  test_idx.insert(test_idx.end(), pos.begin() + static_cast<std::ptrdiff_t>(alloc[1]), pos.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {data.subset(train_idx), data.subset(test_idx)};
}

void normalize_to_train(Dataset& train, Dataset& test) {
  const auto scaler = MinMaxScaler::fit(train);
  scaler.transform(train);
  scaler.transform(test);
}

std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  if (data.num_rows < k) throw InputError("fewer rows than folds");
  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < data.num_rows; ++i) (data.labels[i] < 0 ? neg : pos).push_back(i);
  Rng rng(derive_seed(seed, 1));
  std::shuffle(neg.begin(), neg.end(), rng);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::vector<std::size_t> fold(data.num_rows, 0);
  // Deal classes round-robin; positives continue where negatives stopped to balance fold sizes.
  std::size_t next = 0;
  for (std::size_t i : neg) fold[i] = next++ % k;
  for (std::size_t i : pos) fold[i] = next++ % k;
  return fold;
}

}  // namespace miret
