#include "qdc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qdc/errors.hpp"
#include "qdc/rng.hpp"

namespace qdc {

std::vector<std::size_t> Dataset::class_sizes() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) {
    if (y < 1 || y > class_count) throw invalid_input("Dataset: label out of range");
    ++counts[static_cast<std::size_t>(y - 1)];
  }
  return counts;
}

void Dataset::validate() const {
  if (labels.size() != n_samples()) throw invalid_input("Dataset: label count mismatch");
  if (class_count < 1) throw invalid_input("Dataset: class_count < 1");
  if (!features.all_finite()) throw invalid_input("Dataset: non-finite feature");
  for (std::size_t c : class_sizes())
    if (c == 0) throw degenerate_class("Dataset: empty class");
}

namespace {

std::uint32_t read_be_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw format_error(std::string("idx: truncated header reading ") + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

constexpr std::uint32_t kIdxImageMagic = 0x00000803u;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801u;

}  // namespace

Dataset load_idx(const std::string& image_path, const std::string& label_path) {
  std::ifstream img(image_path, std::ios::binary);
  if (!img) throw format_error("idx: cannot open " + image_path);
  std::ifstream lab(label_path, std::ios::binary);
  if (!lab) throw format_error("idx: cannot open " + label_path);

  const std::uint32_t image_magic = read_be_u32(img, "image magic");
  if (image_magic != kIdxImageMagic) throw format_error("idx: bad image magic");
  const std::uint32_t n_images = read_be_u32(img, "image count");
  const std::uint32_t rows = read_be_u32(img, "rows");
  const std::uint32_t cols = read_be_u32(img, "cols");

  const std::uint32_t label_magic = read_be_u32(lab, "label magic");
  if (label_magic != kIdxLabelMagic) throw format_error("idx: bad label magic");
  const std::uint32_t n_labels = read_be_u32(lab, "label count");

  if (n_images != n_labels) throw format_error("idx: image/label count mismatch");

  const std::size_t pixels = std::size_t(rows) * std::size_t(cols);
  Dataset d;
  d.features = Matrix(n_images, pixels);
  d.labels.resize(n_images);

  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
    if (!img) throw format_error("idx: truncated image data");
    double* row = d.features.row(i);
    for (std::size_t j = 0; j < pixels; ++j) row[j] = buf[j] / 255.0;
  }
  std::vector<unsigned char> lbuf(n_labels);
  lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(n_labels));
  if (!lab) throw format_error("idx: truncated label data");

  int max_label = 0;
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    d.labels[i] = int(lbuf[i]) + 1;
    max_label = std::max(max_label, d.labels[i]);
  }
  d.class_count = std::max(max_label, 10);
  d.label_map.resize(static_cast<std::size_t>(d.class_count));
  for (int k = 0; k < d.class_count; ++k) d.label_map[static_cast<std::size_t>(k)] = k;
  return d;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw format_error("csv: non-numeric cell '" + s + "' at line " + std::to_string(line_no));
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos != s.size())
    throw format_error("csv: non-numeric cell '" + s + "' at line " + std::to_string(line_no));
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw format_error("csv: cannot open " + path);

  std::string header;
  if (!std::getline(in, header) || header.empty()) throw format_error("csv: empty file");
  const std::vector<std::string> names = split_fields(header);

  std::ptrdiff_t label_idx = -1;
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == label_column) label_idx = static_cast<std::ptrdiff_t>(j);
  if (label_idx < 0) throw format_error("csv: missing label column '" + label_column + "'");

  const std::size_t p = names.size() - 1;
  std::vector<double> values;
  std::vector<long long> raw_labels;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != names.size())
      throw format_error("csv: wrong field count at line " + std::to_string(line_no));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_double(fields[j], line_no);
      if (static_cast<std::ptrdiff_t>(j) == label_idx) {
        const long long y = static_cast<long long>(std::llround(v));
        if (std::fabs(v - static_cast<double>(y)) > 1e-9)
          throw format_error("csv: non-integer label at line " + std::to_string(line_no));
        raw_labels.push_back(y);
      } else {
        values.push_back(v);
      }
    }
  }
  const std::size_t n = raw_labels.size();
  if (n == 0) throw format_error("csv: no data rows");

  // Remap raw labels to {1..K}, ascending raw order.
  std::map<long long, int> remap;
  for (long long y : raw_labels) remap.emplace(y, 0);
  int next = 1;
  for (auto& [raw, k] : remap) k = next++;

  Dataset d;
  d.features = Matrix(n, p);
  std::copy(values.begin(), values.end(), d.features.data());
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.labels[i] = remap[raw_labels[i]];
  d.class_count = static_cast<int>(remap.size());
  d.label_map.resize(remap.size());
  for (const auto& [raw, k] : remap) d.label_map[static_cast<std::size_t>(k - 1)] = raw;
  return d;
}

Matrix load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.empty()) throw format_error("csv: empty file");
  const std::size_t p = split_fields(header).size();

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 1;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != p)
      throw format_error("csv: wrong field count at line " + std::to_string(line_no));
    for (const std::string& f : fields) values.push_back(parse_double(f, line_no));
    ++n;
  }
  if (n == 0) throw format_error("csv: no data rows");
  Matrix m(n, p);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.features = Matrix(idx.size(), d.n_features());
  out.labels.resize(idx.size());
  out.class_count = d.class_count;
  out.label_map = d.label_map;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* src = d.features.row(idx[i]);
    std::copy(src, src + d.n_features(), out.features.row(i));
    out.labels[i] = d.labels[idx[i]];
  }
  return out;
}

}  // namespace

Dataset take_prefix(const Dataset& d, std::size_t n) {
  if (n == 0 || n >= d.n_samples()) return d;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return take_rows(d, idx);
}

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw invalid_input("split: train_fraction outside (0,1)");
  const std::size_t n = d.n_samples();
  // Floor with a nudge so that fractions like 0.7 * 10 do not truncate to 6.
  std::size_t n_train =
      static_cast<std::size_t>(spec.train_fraction * static_cast<double>(n) + 1e-9);
  n_train = std::min(std::max<std::size_t>(n_train, 1), n - 1);

  Xoshiro256 rng(spec.seed, spec.repetition_index);
  const std::vector<std::size_t> perm = random_permutation(n, rng);

  std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());

  Dataset train = take_rows(d, train_idx);
  Dataset test = take_rows(d, test_idx);

  std::vector<bool> seen(static_cast<std::size_t>(d.class_count), false);
  for (int y : train.labels) seen[static_cast<std::size_t>(y - 1)] = true;
  for (bool s : seen)
    if (!s) throw degenerate_split("split: a class is absent from the training side");

  return {std::move(train), std::move(test)};
}

}  // namespace qdc
