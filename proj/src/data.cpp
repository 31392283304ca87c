#include "qsvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "qsvm/errors.hpp"
#include "qsvm/rng.hpp"

namespace qsvm {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_intensity(std::string_view field, const char* name, long line) {
  field = trim(field);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(std::string("bad ") + name + " value '" + std::string(field) + "'", line);
  if (!std::isfinite(value) || value < 0)
    throw ParseError(std::string(name) + " must be finite and non-negative, got '" + std::string(field) + "'", line);
  return value;
}

long parse_int(std::string_view field, const char* name, long line) {
  field = trim(field);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(std::string("bad ") + name + " value '" + std::string(field) + "'", line);
  return value;
}

}  // namespace

std::vector<PixelRecord> parse_pixels(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++line_no;
  std::string_view header = trim(line);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);

  char delim = ',';
  for (char d : {',', '\t', ';'})
    if (header.find(d) != std::string_view::npos) {
      delim = d;
      break;
    }
  static const std::vector<std::string_view> expected = {"patch_id", "blue", "green", "red",
                                                          "nir",      "label", "is_margin"};
  const auto columns = split_fields(header, delim);
  bool header_ok = columns.size() == expected.size();
  for (std::size_t c = 0; header_ok && c < columns.size(); ++c) header_ok = trim(columns[c]) == expected[c];
  if (!header_ok) throw ParseError(std::string("header must be '") + kPixelHeader + "'", 1);

  std::vector<PixelRecord> pixels;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_fields(row, delim);
    if (fields.size() != expected.size())
      throw ParseError("expected 7 fields, found " + std::to_string(fields.size()), line_no);

    PixelRecord p;
    p.patch_id = std::string(trim(fields[0]));
    if (p.patch_id.empty()) throw ParseError("empty patch_id", line_no);
    p.blue = parse_intensity(fields[1], "blue", line_no);
    p.green = parse_intensity(fields[2], "green", line_no);
    p.red = parse_intensity(fields[3], "red", line_no);
    p.nir = parse_intensity(fields[4], "nir", line_no);
    const long label = parse_int(fields[5], "label", line_no);
    if (label != 1 && label != -1 && label != 0)
      throw ParseError("label must be 1, -1 or 0, got " + std::to_string(label), line_no);
    p.label = label == 1 ? 1 : -1;
    const long margin = parse_int(fields[6], "is_margin", line_no);
    if (margin != 0 && margin != 1) throw ParseError("is_margin must be 0 or 1, got " + std::to_string(margin), line_no);
    p.is_margin = margin == 1;
    pixels.push_back(std::move(p));
  }
  return pixels;
}

std::vector<PixelRecord> load_pixels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pixel table '" + path.string() + "'");
  return parse_pixels(in);
}

void write_pixels(std::ostream& out, std::span<const PixelRecord> pixels) {
  const auto flags = out.flags();
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << kPixelHeader << '\n';
  for (const PixelRecord& p : pixels)
    out << p.patch_id << ',' << p.blue << ',' << p.green << ',' << p.red << ',' << p.nir << ',' << p.label << ','
        << (p.is_margin ? 1 : 0) << '\n';
  out.precision(precision);
  out.flags(flags);
}

std::vector<PatchStats> patch_stats(std::span<const PixelRecord> pixels, std::vector<std::string>* warnings) {
  struct Counts {
    long total = 0, physical = 0, cloud = 0;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Counts> counts;
  for (const PixelRecord& p : pixels) {
    auto [it, inserted] = counts.try_emplace(p.patch_id);
    if (inserted) order.push_back(p.patch_id);
    Counts& c = it->second;
    ++c.total;
    if (!p.is_margin) {
      ++c.physical;
      if (p.label == 1) ++c.cloud;
    }
  }

  std::vector<PatchStats> stats;
  for (const std::string& id : order) {
    const Counts& c = counts.at(id);
    if (c.physical == 0) {
      if (warnings) warnings->push_back("patch '" + id + "' has no physical pixels; cloudiness undefined, skipped");
      continue;
    }
    stats.push_back({id, static_cast<double>(c.cloud) / static_cast<double>(c.physical),
                     static_cast<double>(c.physical) / static_cast<double>(c.total), c.total});
  }
  return stats;
}

std::vector<std::string> select_patches(std::span<const PatchStats> stats, const PatchFilter& filter) {
  std::vector<std::string> ids;
  for (const PatchStats& s : stats)
    if (s.fill == filter.fill && s.cloudiness >= filter.min_cloudiness && s.cloudiness <= filter.max_cloudiness)
      ids.push_back(s.patch_id);
  if (ids.empty()) {
    std::ostringstream msg;
    msg << "no patch has fill = " << filter.fill << " and cloudiness in [" << filter.min_cloudiness << ", "
        << filter.max_cloudiness << "] (" << stats.size() << " patches examined); relax the patch filters";
    throw SelectionError(msg.str());
  }
  return ids;
}

std::vector<std::size_t> pixels_in_patches(std::span<const PixelRecord> pixels,
                                           std::span<const std::string> patch_ids) {
  const std::unordered_set<std::string> wanted(patch_ids.begin(), patch_ids.end());
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < pixels.size(); ++i)
    if (!pixels[i].is_margin && wanted.contains(pixels[i].patch_id)) indices.push_back(i);
  return indices;
}

namespace {

// The first `count` entries of v become a uniform random sample (partial Fisher-Yates).
void partial_shuffle(std::vector<std::size_t>& v, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count && i + 1 < v.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) { partial_shuffle(v, v.size(), rng); }

}  // namespace

SplitIndices sample_split(std::span<const PixelRecord> pixels, std::span<const std::size_t> candidates,
                          const SplitSpec& spec) {
  if (spec.n_train < 1 || spec.n_test < 1) throw SizeError("train and test sizes must be positive");
  for (std::size_t idx : candidates)
    if (idx >= pixels.size()) throw IndexError("candidate pixel index " + std::to_string(idx) + " out of range");

  Rng rng(spec.seed);
  SplitIndices split;
  const auto n_train = static_cast<std::size_t>(spec.n_train);
  const auto n_test = static_cast<std::size_t>(spec.n_test);

  if (spec.balanced) {
    if (n_train % 2 != 0 || n_test % 2 != 0)
      throw SizeError("balanced sampling needs even train and test sizes");
    std::vector<std::size_t> cloud, clear;
    for (std::size_t idx : candidates) (pixels[idx].label == 1 ? cloud : clear).push_back(idx);
    const std::size_t need = n_train / 2 + n_test / 2;
    for (const auto& [pool, name] : {std::pair{&cloud, "cloud"}, std::pair{&clear, "clear"}}) {
      if (pool->size() < need)
        throw SamplingError(std::string("need ") + std::to_string(need) + " " + name + " pixels, only " +
                            std::to_string(pool->size()) + " available (short by " +
                            std::to_string(need - pool->size()) + ")");
    }
    partial_shuffle(cloud, need, rng);
    partial_shuffle(clear, need, rng);
    for (std::size_t i = 0; i < n_train / 2; ++i) split.train.push_back(cloud[i]), split.train.push_back(clear[i]);
    for (std::size_t i = n_train / 2; i < need; ++i) split.test.push_back(cloud[i]), split.test.push_back(clear[i]);
  } else {
    std::vector<std::size_t> pool(candidates.begin(), candidates.end());
    if (pool.size() < n_train + n_test)
      throw SamplingError("need " + std::to_string(n_train + n_test) + " pixels, only " +
                          std::to_string(pool.size()) + " available");
    partial_shuffle(pool, n_train + n_test, rng);
    split.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                      pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
  }
  shuffle(split.train, rng);
  shuffle(split.test, rng);
  return split;
}

Eigen::MatrixXd band_matrix(std::span<const PixelRecord> pixels, std::span<const std::size_t> indices) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(indices.size()), 4);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const PixelRecord& p = pixels[indices[r]];
    X.row(static_cast<Eigen::Index>(r)) << p.blue, p.green, p.red, p.nir;
  }
  return X;
}

Eigen::VectorXd label_vector(std::span<const PixelRecord> pixels, std::span<const std::size_t> indices) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) y[static_cast<Eigen::Index>(r)] = pixels[indices[r]].label;
  return y;
}

MinMaxScaler fit_minmax(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() == 0) throw SizeError("min-max fit on an empty matrix");
  MinMaxScaler s{X.colwise().minCoeff().transpose(), X.colwise().maxCoeff().transpose()};
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    if (!(s.max[c] > s.min[c])) throw DegenerateError("feature " + std::to_string(c) + " is constant on the fit set");
  return s;
}

Eigen::MatrixXd apply_minmax(const MinMaxScaler& scaler, const Eigen::Ref<const Eigen::MatrixXd>& X, long* clamped) {
  if (X.cols() != scaler.min.size())
    throw ShapeError("scaler fitted on " + std::to_string(scaler.min.size()) + " features, got " +
                     std::to_string(X.cols()));
  Eigen::MatrixXd out = (X.rowwise() - scaler.min.transpose()).array().rowwise() /
                        (scaler.max - scaler.min).transpose().array();
  long count = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double& v = out.data()[i];
    if (v < 0.0) v = 0.0, ++count;
    else if (v > 1.0) v = 1.0, ++count;
  }
  if (clamped) *clamped += count;
  return out;
}

FeaturePipeline fit_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& train_bands, int k, ScalingOrder order) {
  FeaturePipeline p;
  p.order = order;
  if (order == ScalingOrder::PcaFirst) {
    p.pca = pca_fit(train_bands, k);
    p.scaler = fit_minmax(pca_transform(p.pca, train_bands));
  } else {
    p.pre_scaler = fit_minmax(train_bands);
    const Eigen::MatrixXd scaled = apply_minmax(p.pre_scaler, train_bands);
    p.pca = pca_fit(scaled, k);
    p.scaler = fit_minmax(pca_transform(p.pca, scaled));
  }
  return p;
}

Eigen::MatrixXd apply_pipeline(const FeaturePipeline& p, const Eigen::Ref<const Eigen::MatrixXd>& bands,
                               long* clamped) {
  if (p.order == ScalingOrder::PcaFirst) return apply_minmax(p.scaler, pca_transform(p.pca, bands), clamped);
  return apply_minmax(p.scaler, pca_transform(p.pca, apply_minmax(p.pre_scaler, bands, clamped)), clamped);
}

namespace {

void write_vector(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, const char* key) {
  std::string word;
  long n = 0;
  if (!(in >> word) || word != key || !(in >> n) || n < 0) throw ParseError(std::string("expected '") + key + "'");
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i)
    if (!(in >> v[i])) throw ParseError(std::string("bad value in '") + key + "'");
  return v;
}

}  // namespace

void write_pipeline(std::ostream& out, const FeaturePipeline& p) {
  const auto flags = out.flags();
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "qsvm-pipeline 1\n";
  out << "order " << (p.order == ScalingOrder::PcaFirst ? "pca-first" : "scale-first") << '\n';
  if (p.order == ScalingOrder::ScaleFirst) {
    write_vector(out, "pre_min", p.pre_scaler.min);
    write_vector(out, "pre_max", p.pre_scaler.max);
  }
  write_vector(out, "mean", p.pca.mean);
  write_vector(out, "explained_variance", p.pca.explained_variance);
  for (Eigen::Index r = 0; r < p.pca.components.rows(); ++r)
    write_vector(out, "component", p.pca.components.row(r).transpose());
  write_vector(out, "min", p.scaler.min);
  write_vector(out, "max", p.scaler.max);
  out.precision(precision);
  out.flags(flags);
}

FeaturePipeline read_pipeline(std::istream& in) {
  std::string magic, key, order;
  int version = 0;
  if (!(in >> magic >> version) || magic != "qsvm-pipeline" || version != 1)
    throw ParseError("not a qsvm-pipeline version 1 file");
  if (!(in >> key >> order) || key != "order" || (order != "pca-first" && order != "scale-first"))
    throw ParseError("bad order line");
  FeaturePipeline p;
  p.order = order == "pca-first" ? ScalingOrder::PcaFirst : ScalingOrder::ScaleFirst;
  if (p.order == ScalingOrder::ScaleFirst) {
    p.pre_scaler.min = read_vector(in, "pre_min");
    p.pre_scaler.max = read_vector(in, "pre_max");
  }
  p.pca.mean = read_vector(in, "mean");
  p.pca.explained_variance = read_vector(in, "explained_variance");
  const Eigen::Index k = p.pca.explained_variance.size();
  p.pca.components.resize(k, p.pca.mean.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::VectorXd row = read_vector(in, "component");
    if (row.size() != p.pca.mean.size()) throw ParseError("component width does not match mean");
    p.pca.components.row(r) = row.transpose();
  }
  p.scaler.min = read_vector(in, "min");
  p.scaler.max = read_vector(in, "max");
  return p;
}

PreparedSplit prepare_split(std::span<const PixelRecord> pixels, std::span<const std::size_t> candidates,
                            const SplitSpec& spec, int k, ScalingOrder order) {
  PreparedSplit out;
  out.indices = sample_split(pixels, candidates, spec);
  const Eigen::MatrixXd train_bands = band_matrix(pixels, out.indices.train);
  out.pipeline = fit_pipeline(train_bands, k, order);
  out.train_x = apply_pipeline(out.pipeline, train_bands);
  out.test_x = apply_pipeline(out.pipeline, band_matrix(pixels, out.indices.test), &out.clamped);
  out.train_y = label_vector(pixels, out.indices.train);
  out.test_y = label_vector(pixels, out.indices.test);
  return out;
}

}  // namespace qsvm
