#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qsvm/data.hpp"
#include "qsvm/errors.hpp"
#include "qsvm/featuremap.hpp"
#include "qsvm/qkernel.hpp"
#include "qsvm/spsa.hpp"
#include "qsvm/stats.hpp"
#include "qsvm/svm.hpp"

namespace qsvm {

/// Everything that determines an experiment. Per-split random streams are
/// derived from `seed`; the `seed` field inside `spsa` is ignored.
struct ExperimentConfig {
  std::string data_path;
  int n_splits = 20;
  long n_train = 800;
  long n_test = 200;
  bool balanced = true;
  PatchFilter filter;
  int depth = 2;
  int pca_components = 2;
  ScalingOrder scaling_order = ScalingOrder::PcaFirst;
  SpsaConfig spsa;
  long align_subset = 0;  // 0: alignment on the full training Gram
  bool random_theta0 = false;
  long shots = 0;  // 0: exact kernel
  double C = 1.0;
  double smo_tolerance = 1e-3;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
  FeatureMapConfig feature_map() const { return {pca_components, depth}; }
};

/// Independent random streams of one split.
struct SplitSeeds {
  std::uint64_t split, sampling, spsa, shots, subset, theta0;
};
SplitSeeds split_seeds(std::uint64_t master_seed, int split_index);

/// Wall-clock seconds per stage.
struct StageTimings {
  double prepare = 0, align = 0, hybrid = 0, classic = 0, total = 0;
};

struct SplitResult {
  int index = 0;
  double t_initial = 0;  // alignment at theta_0
  double t_final = 0;    // alignment at the optimized theta
  double hsvm_accuracy = 0;
  double svm_accuracy = 0;
  double rbf_gamma = 0;
  long clamped = 0;
  Eigen::VectorXd theta;
  StageTimings timings;  // not serialized
};

struct ColumnSummary {
  double mean = 0;
  std::optional<double> sd;  // absent for a single split
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SplitResult> splits;
  ColumnSummary t_initial, t_final, hsvm, svm;
  std::optional<WilcoxonResult> wilcoxon;  // on (hsvm, svm) accuracy pairs
  std::string wilcoxon_note;               // why the test was skipped, if it was
};

/// Loaded pixel table plus the patches passing the filter.
struct Dataset {
  std::vector<PixelRecord> pixels;
  std::vector<PatchStats> stats;
  std::vector<std::string> selected;
  std::vector<std::size_t> candidates;
  std::vector<std::string> warnings;
};

Dataset load_dataset(const std::string& path, const PatchFilter& filter);
Dataset make_dataset(std::vector<PixelRecord> pixels, const PatchFilter& filter);

/// A failure inside a split, wrapping the original exception (std::nested_exception).
class StageError : public Error {
 public:
  StageError(std::string stage, int split, const std::string& what)
      : Error("split " + std::to_string(split) + ", stage '" + stage + "': " + what),
        stage_(std::move(stage)),
        split_(split) {}
  const std::string& stage() const { return stage_; }
  int split() const { return split_; }

 private:
  std::string stage_;
  int split_;
};

/// A failed experiment; carries the splits that completed.
class ExperimentError : public Error {
 public:
  ExperimentError(const std::string& what, ExperimentReport partial) : Error(what), partial_(std::move(partial)) {}
  const ExperimentReport& partial() const { return partial_; }

 private:
  ExperimentReport partial_;
};

// Pipeline stages, shared by run_split and the single-stage CLI commands.
PreparedSplit prepare_features(const ExperimentConfig& config, const Dataset& data, int split_index);
Eigen::VectorXd initial_theta(const ExperimentConfig& config, int split_index);
KernelMode kernel_mode(const ExperimentConfig& config, int split_index);
AlignmentTrace optimize_alignment(const ExperimentConfig& config, const PreparedSplit& split, int split_index,
                                  int workers = 1);

struct FittedModel {
  SvmModel model;
  double test_accuracy = 0;
  double train_accuracy = 0;
};
FittedModel fit_hybrid(const ExperimentConfig& config, const PreparedSplit& split,
                       const Eigen::Ref<const Eigen::VectorXd>& theta, int split_index, int workers = 1);
FittedModel fit_classic(const ExperimentConfig& config, const PreparedSplit& split);

/// Full pipeline for one split. Stage failures raise StageError with the
/// original exception nested.
SplitResult run_split(const ExperimentConfig& config, const Dataset& data, int split_index, int workers = 1);

/// Runs every split, aggregates the four columns and compares the accuracy
/// pairs with the Wilcoxon test. Failures raise ExperimentError holding the
/// completed splits.
ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& data);
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Recomputes aggregates and the Wilcoxon comparison from report.splits.
void aggregate(ExperimentReport& report);

}  // namespace qsvm
