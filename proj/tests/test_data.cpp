#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "qsvm/data.hpp"
#include "qsvm/errors.hpp"
#include "test_util.hpp"

using namespace qsvm;

namespace {

std::vector<PixelRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_pixels(in);
}

const std::string kHeader = std::string(kPixelHeader) + "\n";

// n pixels of one patch; the first `cloud` are cloud, the last `margin` are margin.
std::vector<PixelRecord> patch(const std::string& id, int n, int cloud, int margin = 0) {
  std::vector<PixelRecord> v;
  for (int i = 0; i < n; ++i) {
    PixelRecord p;
    p.patch_id = id;
    p.blue = 100 + i;
    p.green = 200 + 2 * i;
    p.red = 300 + (i * 7) % 13;
    p.nir = 400 + (i * 5) % 11;
    p.label = i < cloud ? 1 : -1;
    p.is_margin = i >= n - margin;
    v.push_back(p);
  }
  return v;
}

int line_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(ParsePixels, HeaderOnly) { EXPECT_TRUE(parse(kHeader).empty()); }

TEST(ParsePixels, SingleRow) {
  const auto v = parse(kHeader + "p7,12.5,30,40.25,1000,1,0\n");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].patch_id, "p7");
  EXPECT_EQ(v[0].blue, 12.5);
  EXPECT_EQ(v[0].green, 30.0);
  EXPECT_EQ(v[0].red, 40.25);
  EXPECT_EQ(v[0].nir, 1000.0);
  EXPECT_EQ(v[0].label, 1);
  EXPECT_FALSE(v[0].is_margin);
}

TEST(ParsePixels, ZeroLabelMeansClear) {
  const auto v = parse(kHeader + "a,1,2,3,4,0,1\na,1,2,3,4,-1,0\n");
  EXPECT_EQ(v[0].label, -1);
  EXPECT_TRUE(v[0].is_margin);
  EXPECT_EQ(v[1].label, -1);
}

TEST(ParsePixels, BadLabelNamesLine) {
  const std::string text = kHeader + "a,1,2,3,4,1,0\na,1,2,3,4,2,0\n";
  EXPECT_THROW(parse(text), ParseError);
  EXPECT_EQ(line_of(text), 3);
}

TEST(ParsePixels, MalformedRows) {
  EXPECT_EQ(line_of(kHeader + "a,1,2,3,4,1\n"), 2);
  EXPECT_EQ(line_of(kHeader + "a,x,2,3,4,1,0\n"), 2);
  EXPECT_EQ(line_of(kHeader + "a,-1,2,3,4,1,0\n"), 2);
  EXPECT_EQ(line_of(kHeader + "a,1,2,3,4,1,2\n"), 2);
  EXPECT_EQ(line_of("patch,blue\n"), 1);
  EXPECT_EQ(line_of(""), 1);
}

TEST(ParsePixels, OtherDelimitersAndBom) {
  const auto tab = parse("patch_id\tblue\tgreen\tred\tnir\tlabel\tis_margin\nq\t1\t2\t3\t4\t1\t0\n");
  ASSERT_EQ(tab.size(), 1u);
  EXPECT_EQ(tab[0].nir, 4.0);
  const auto semi = parse("\xEF\xBB\xBFpatch_id;blue;green;red;nir;label;is_margin\r\nq;1;2;3;4;-1;0\r\n");
  ASSERT_EQ(semi.size(), 1u);
  EXPECT_EQ(semi[0].label, -1);
}

TEST(ParsePixels, WriteRoundTrip) {
  auto v = patch("x", 5, 2, 1);
  v[0].blue = 0.1 + 0.2;
  std::stringstream ss;
  write_pixels(ss, v);
  EXPECT_EQ(parse_pixels(ss), v);
}

TEST(LoadPixels, MissingFile) { EXPECT_THROW(load_pixels("/nonexistent/pixels.csv"), IoError); }

TEST(PatchStats, HalfCloudFull) {
  const auto s = patch_stats(patch("a", 10, 5));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].cloudiness, 0.5);
  EXPECT_EQ(s[0].fill, 1.0);
  EXPECT_EQ(s[0].pixel_count, 10);
}

TEST(PatchStats, QuarterMargin) {
  const auto s = patch_stats(patch("a", 8, 3, 2));
  EXPECT_EQ(s[0].fill, 0.75);
  EXPECT_EQ(s[0].cloudiness, 0.5);
}

TEST(PatchStats, AllMarginExcludedWithWarning) {
  auto pixels = patch("a", 4, 2);
  const auto margin = patch("m", 3, 1, 3);
  pixels.insert(pixels.end(), margin.begin(), margin.end());
  std::vector<std::string> warnings;
  const auto s = patch_stats(pixels, &warnings);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].patch_id, "a");
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("'m'"), std::string::npos);
}

TEST(SelectPatches, Rules) {
  const std::vector<PatchStats> s = {{"ok", 0.5, 1.0, 10},
                                     {"partial", 0.5, 0.99, 10},
                                     {"clear", 0.39, 1.0, 10},
                                     {"edge", 0.40, 1.0, 10},
                                     {"top", 0.60, 1.0, 10},
                                     {"cloudy", 0.61, 1.0, 10}};
  EXPECT_EQ(select_patches(s), (std::vector<std::string>{"ok", "edge", "top"}));
}

TEST(SelectPatches, EmptySelection) {
  const std::vector<PatchStats> s = {{"clear", 0.1, 1.0, 10}};
  EXPECT_THROW(select_patches(s), SelectionError);
}

TEST(PixelsInPatches, PhysicalOnly) {
  auto pixels = patch("a", 4, 2, 1);
  const auto b = patch("b", 3, 1);
  pixels.insert(pixels.end(), b.begin(), b.end());
  const std::vector<std::string> ids = {"b", "a"};
  EXPECT_EQ(pixels_in_patches(pixels, ids), (std::vector<std::size_t>{0, 1, 2, 4, 5, 6}));
}

TEST(SampleSplit, BalancedCounts) {
  const auto pixels = patch("a", 100, 50);
  std::vector<std::size_t> cand(100);
  for (std::size_t i = 0; i < 100; ++i) cand[i] = i;
  const auto s = sample_split(pixels, cand, {4, 2, 17, true});
  ASSERT_EQ(s.train.size(), 4u);
  ASSERT_EQ(s.test.size(), 2u);
  auto count_cloud = [&](const std::vector<std::size_t>& v) {
    return std::count_if(v.begin(), v.end(), [&](std::size_t i) { return pixels[i].label == 1; });
  };
  EXPECT_EQ(count_cloud(s.train), 2);
  EXPECT_EQ(count_cloud(s.test), 1);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 6u);
}

TEST(SampleSplit, Deterministic) {
  const auto pixels = patch("a", 100, 50);
  std::vector<std::size_t> cand(100);
  for (std::size_t i = 0; i < 100; ++i) cand[i] = i;
  const auto a = sample_split(pixels, cand, {20, 10, 5, true});
  const auto b = sample_split(pixels, cand, {20, 10, 5, true});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  const auto c = sample_split(pixels, cand, {20, 10, 6, true});
  EXPECT_NE(a.train, c.train);
}

TEST(SampleSplit, ClassShortfall) {
  const auto pixels = patch("a", 20, 20);
  std::vector<std::size_t> cand(20);
  for (std::size_t i = 0; i < 20; ++i) cand[i] = i;
  EXPECT_THROW(sample_split(pixels, cand, {4, 2, 1, true}), SamplingError);
  EXPECT_THROW(sample_split(pixels, cand, {3, 2, 1, true}), SizeError);
  EXPECT_NO_THROW(sample_split(pixels, cand, {4, 2, 1, false}));
  EXPECT_THROW(sample_split(pixels, cand, {15, 6, 1, false}), SamplingError);
}

TEST(MinMax, Basics) {
  Eigen::MatrixXd fit(2, 1);
  fit << 0, 10;
  const auto s = fit_minmax(fit);
  Eigen::MatrixXd x(2, 1);
  x << 5, 12;
  long clamped = 0;
  const auto r = apply_minmax(s, x, &clamped);
  EXPECT_EQ(r(0, 0), 0.5);
  EXPECT_EQ(r(1, 0), 1.0);
  EXPECT_EQ(clamped, 1);
}

TEST(MinMax, FitSetSpansUnitInterval) {
  Rng rng(2);
  const Eigen::MatrixXd X = testutil::normal_matrix(rng, 30, 3);
  const auto r = apply_minmax(fit_minmax(X), X);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(r.col(c).minCoeff(), 0.0);
    EXPECT_EQ(r.col(c).maxCoeff(), 1.0);
  }
}

TEST(MinMax, ConstantColumn) {
  EXPECT_THROW(fit_minmax(Eigen::MatrixXd::Constant(3, 2, 1.0)), DegenerateError);
}

TEST(Pipeline, FeaturesInUnitRange) {
  Rng rng(3);
  const Eigen::MatrixXd train = testutil::normal_matrix(rng, 50, 4) * 1000.0;
  const Eigen::MatrixXd test = testutil::normal_matrix(rng, 20, 4) * 1500.0;
  for (auto order : {ScalingOrder::PcaFirst, ScalingOrder::ScaleFirst}) {
    const auto p = fit_pipeline(train, 2, order);
    const auto a = apply_pipeline(p, train);
    EXPECT_EQ(a.cols(), 2);
    EXPECT_EQ(a.minCoeff(), 0.0);
    EXPECT_EQ(a.maxCoeff(), 1.0);
    long clamped = 0;
    const auto b = apply_pipeline(p, test, &clamped);
    EXPECT_GE(b.minCoeff(), 0.0);
    EXPECT_LE(b.maxCoeff(), 1.0);
    EXPECT_GT(clamped, 0);
  }
}

TEST(Pipeline, SidecarRoundTrip) {
  Rng rng(4);
  const Eigen::MatrixXd train = testutil::normal_matrix(rng, 40, 4);
  const auto p = fit_pipeline(train, 2, ScalingOrder::ScaleFirst);
  std::stringstream ss;
  write_pipeline(ss, p);
  const auto r = read_pipeline(ss);
  EXPECT_EQ(r.order, p.order);
  EXPECT_EQ(apply_pipeline(r, train), apply_pipeline(p, train));
  std::stringstream bad("qsvm-pipeline 9\n");
  EXPECT_THROW(read_pipeline(bad), ParseError);
}

TEST(PrepareSplit, EndToEnd) {
  auto pixels = patch("a", 60, 30);
  std::vector<std::size_t> cand(60);
  for (std::size_t i = 0; i < 60; ++i) cand[i] = i;
  const auto s = prepare_split(pixels, cand, {20, 10, 9, true}, 2);
  EXPECT_EQ(s.train_x.rows(), 20);
  EXPECT_EQ(s.test_x.rows(), 10);
  EXPECT_EQ(s.train_y.sum(), 0.0);
  EXPECT_EQ(s.test_y.sum(), 0.0);
  EXPECT_EQ(s.train_x.minCoeff(), 0.0);
  EXPECT_EQ(s.train_x.maxCoeff(), 1.0);
}
