#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qsvm/pca.hpp"

namespace qsvm {

/// One row of the pixel table.
struct PixelRecord {
  std::string patch_id;
  double blue = 0, green = 0, red = 0, nir = 0;
  int label = -1;  // +1 cloud, -1 clear
  bool is_margin = false;

  friend bool operator==(const PixelRecord&, const PixelRecord&) = default;
};

inline constexpr const char* kPixelHeader = "patch_id,blue,green,red,nir,label,is_margin";

/// Parses a pixel table with header `patch_id,blue,green,red,nir,label,is_margin`.
/// The delimiter (comma, tab or semicolon) is taken from the header. Labels
/// may be 1/-1 or 1/0; 0 maps to -1.
std::vector<PixelRecord> parse_pixels(std::istream& in);
std::vector<PixelRecord> load_pixels(const std::filesystem::path& path);
void write_pixels(std::ostream& out, std::span<const PixelRecord> pixels);

/// Cloudiness is cloud / physical pixels; fill is physical / all pixels.
struct PatchStats {
  std::string patch_id;
  double cloudiness = 0.0;
  double fill = 0.0;
  long pixel_count = 0;
};

/// Per-patch statistics in order of first appearance. All-margin patches have
/// no defined cloudiness and are left out with a message in `warnings`.
std::vector<PatchStats> patch_stats(std::span<const PixelRecord> pixels, std::vector<std::string>* warnings = nullptr);

struct PatchFilter {
  double fill = 1.0;
  double min_cloudiness = 0.40;
  double max_cloudiness = 0.60;
};

/// Patches with fill == filter.fill (exactly) and cloudiness inside the
/// inclusive range. An empty result raises SelectionError.
std::vector<std::string> select_patches(std::span<const PatchStats> stats, const PatchFilter& filter = {});

/// Indices of the physical pixels that belong to the given patches.
std::vector<std::size_t> pixels_in_patches(std::span<const PixelRecord> pixels, std::span<const std::string> patch_ids);

struct SplitSpec {
  long n_train = 800;
  long n_test = 200;
  std::uint64_t seed = 0;
  bool balanced = true;
};

/// Disjoint train/test index sets into the pixel table.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Draws a train/test split from `candidates` (indices into `pixels`). When
/// balanced, each set holds n/2 pixels of each class.
SplitIndices sample_split(std::span<const PixelRecord> pixels, std::span<const std::size_t> candidates,
                          const SplitSpec& spec);

/// N x 4 band matrix (blue, green, red, nir) for the given pixels.
Eigen::MatrixXd band_matrix(std::span<const PixelRecord> pixels, std::span<const std::size_t> indices);
Eigen::VectorXd label_vector(std::span<const PixelRecord> pixels, std::span<const std::size_t> indices);

struct MinMaxScaler {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

/// Per-column range of X; a constant column raises DegenerateError.
MinMaxScaler fit_minmax(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// (x - min) / (max - min) per column, clamped to [0, 1]. The number of
/// clamped values is added to `clamped` when given.
Eigen::MatrixXd apply_minmax(const MinMaxScaler& scaler, const Eigen::Ref<const Eigen::MatrixXd>& X,
                             long* clamped = nullptr);

enum class ScalingOrder {
  PcaFirst,    // PCA on raw bands, then min-max
  ScaleFirst,  // min-max raw bands, PCA, then min-max of the components
};

/// Feature pipeline fitted on the training set.
struct FeaturePipeline {
  ScalingOrder order = ScalingOrder::PcaFirst;
  MinMaxScaler pre_scaler;  // ScaleFirst only
  PcaModel pca;
  MinMaxScaler scaler;
};

FeaturePipeline fit_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& train_bands, int k, ScalingOrder order);
Eigen::MatrixXd apply_pipeline(const FeaturePipeline& pipeline, const Eigen::Ref<const Eigen::MatrixXd>& bands,
                               long* clamped = nullptr);

/// Plain-text sidecar with the fitted PCA and scaler parameters (full precision).
void write_pipeline(std::ostream& out, const FeaturePipeline& pipeline);
FeaturePipeline read_pipeline(std::istream& in);

/// A split after the full feature pipeline: features in [0, 1].
struct PreparedSplit {
  SplitIndices indices;
  FeaturePipeline pipeline;
  Eigen::MatrixXd train_x, test_x;
  Eigen::VectorXd train_y, test_y;
  long clamped = 0;  // test values clamped into [0, 1]
};

/// select -> sample -> fit pipeline on train -> transform both sets.
PreparedSplit prepare_split(std::span<const PixelRecord> pixels, std::span<const std::size_t> candidates,
                            const SplitSpec& spec, int k, ScalingOrder order = ScalingOrder::PcaFirst);

}  // namespace qsvm
