#include "qsvm/bench.hpp"

#include <chrono>
#include <exception>
#include <numbers>

#include "qsvm/alignment.hpp"
#include "qsvm/parallel.hpp"
#include "qsvm/rng.hpp"

namespace qsvm {

void ExperimentConfig::validate() const {
  if (n_splits < 1) throw SizeError("need at least one split");
  if (n_train < 2 || n_test < 1) throw SizeError("need at least two training and one test pixel");
  feature_map().validate();
  if (pca_components > 4) throw ShapeError("PCA cannot produce more than the 4 spectral bands");
  spsa.validate();
  if (align_subset < 0) throw SizeError("alignment subset size must be non-negative");
  if (shots < 0) throw SizeError("shot count must be non-negative (0 selects exact kernels)");
  if (!(C > 0.0)) throw DomainError("C must be positive");
  if (!(smo_tolerance > 0.0)) throw DomainError("SMO tolerance must be positive");
  if (workers < 1) throw SizeError("worker count must be at least 1");
}

SplitSeeds split_seeds(std::uint64_t master_seed, int split_index) {
  const std::uint64_t s = derive_seed(master_seed, {static_cast<std::uint64_t>(split_index)});
  return {s, derive_seed(s, {1}), derive_seed(s, {2}), derive_seed(s, {3}), derive_seed(s, {4}), derive_seed(s, {5})};
}

Dataset make_dataset(std::vector<PixelRecord> pixels, const PatchFilter& filter) {
  Dataset d;
  d.pixels = std::move(pixels);
  d.stats = patch_stats(d.pixels, &d.warnings);
  d.selected = select_patches(d.stats, filter);
  d.candidates = pixels_in_patches(d.pixels, d.selected);
  return d;
}

Dataset load_dataset(const std::string& path, const PatchFilter& filter) {
  return make_dataset(load_pixels(path), filter);
}

PreparedSplit prepare_features(const ExperimentConfig& config, const Dataset& data, int split_index) {
  const SplitSpec spec{config.n_train, config.n_test, split_seeds(config.seed, split_index).sampling, config.balanced};
  return prepare_split(data.pixels, data.candidates, spec, config.pca_components, config.scaling_order);
}

Eigen::VectorXd initial_theta(const ExperimentConfig& config, int split_index) {
  const int n_params = config.feature_map().n_params();
  if (!config.random_theta0) return Eigen::VectorXd::Zero(n_params);
  Rng rng(split_seeds(config.seed, split_index).theta0);
  Eigen::VectorXd theta(n_params);
  for (auto& t : theta) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return theta;
}

KernelMode kernel_mode(const ExperimentConfig& config, int split_index) {
  if (config.shots == 0) return ExactKernel{};
  return ShotKernel{config.shots, split_seeds(config.seed, split_index).shots};
}

AlignmentTrace optimize_alignment(const ExperimentConfig& config, const PreparedSplit& split, int split_index,
                                  int workers) {
  const FeatureMapConfig fm = config.feature_map();
  const SplitSeeds seeds = split_seeds(config.seed, split_index);
  const KernelMode mode = kernel_mode(config, split_index);
  const auto n = static_cast<std::size_t>(split.train_x.rows());
  const bool subsample = config.align_subset > 0 && static_cast<std::size_t>(config.align_subset) < n;

  IterativeObjective objective = [&](const Eigen::VectorXd& theta, long iteration) {
    if (!subsample || iteration < 0)
      return alignment_objective(theta, split.train_x, split.train_y, fm, mode, workers);
    // Both evaluations of an iteration see the same subset.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seeds.subset, {static_cast<std::uint64_t>(iteration)}));
    const auto m = static_cast<std::size_t>(config.align_subset);
    for (std::size_t i = 0; i < m; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), split.train_x.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      X.row(static_cast<Eigen::Index>(i)) = split.train_x.row(static_cast<Eigen::Index>(order[i]));
      y[static_cast<Eigen::Index>(i)] = split.train_y[static_cast<Eigen::Index>(order[i])];
    }
    return alignment_objective(theta, X, y, fm, mode, workers);
  };

  SpsaConfig spsa = config.spsa;
  spsa.seed = seeds.spsa;
  return spsa_maximize(objective, initial_theta(config, split_index), spsa);
}

FittedModel fit_hybrid(const ExperimentConfig& config, const PreparedSplit& split,
                       const Eigen::Ref<const Eigen::VectorXd>& theta, int split_index, int workers) {
  const FeatureMapConfig fm = config.feature_map();
  const KernelMode mode = kernel_mode(config, split_index);
  const KernelMatrix K = gram_matrix(split.train_x, theta, fm, mode, workers);
  FittedModel fit;
  fit.model = train(K, split.train_y, config.C, {config.smo_tolerance});
  fit.train_accuracy = accuracy(predict(fit.model, support_columns(fit.model, K)), split.train_y);
  // Test rows use a stream distinct from the training Gram's.
  KernelMode test_mode = mode;
  if (auto* s = std::get_if<ShotKernel>(&test_mode)) s->seed = derive_seed(s->seed, {0x7e57});
  const KernelMatrix rows = cross_gram(split.test_x, split.train_x, theta, fm, test_mode, workers);
  fit.test_accuracy = accuracy(predict(fit.model, support_columns(fit.model, rows)), split.test_y);
  return fit;
}

FittedModel fit_classic(const ExperimentConfig& config, const PreparedSplit& split) {
  const double gamma = rbf_default_gamma(split.train_x);
  FittedModel fit;
  fit.model = train_rbf(split.train_x, split.train_y, gamma, config.C, {config.smo_tolerance});
  fit.train_accuracy = accuracy(predict_rbf(fit.model, split.train_x), split.train_y);
  fit.test_accuracy = accuracy(predict_rbf(fit.model, split.test_x), split.test_y);
  return fit;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
auto run_stage(const char* stage, int split, double& elapsed, F&& body) {
  const auto start = Clock::now();
  try {
    auto result = body();
    elapsed = seconds_since(start);
    return result;
  } catch (const std::exception& e) {
    std::throw_with_nested(StageError(stage, split, e.what()));
  }
}

}  // namespace

SplitResult run_split(const ExperimentConfig& config, const Dataset& data, int split_index, int workers) {
  const auto start = Clock::now();
  SplitResult r;
  r.index = split_index;
  const PreparedSplit split =
      run_stage("prepare", split_index, r.timings.prepare, [&] { return prepare_features(config, data, split_index); });
  r.clamped = split.clamped;

  const AlignmentTrace trace = run_stage("align", split_index, r.timings.align,
                                         [&] { return optimize_alignment(config, split, split_index, workers); });
  r.t_initial = trace.initial;
  r.t_final = trace.final;
  r.theta = trace.theta;

  r.hsvm_accuracy = run_stage("hybrid-svm", split_index, r.timings.hybrid, [&] {
                      return fit_hybrid(config, split, trace.theta, split_index, workers);
                    }).test_accuracy;

  const FittedModel classic = run_stage("classic-svm", split_index, r.timings.classic,
                                        [&] { return fit_classic(config, split); });
  r.svm_accuracy = classic.test_accuracy;
  r.rbf_gamma = std::get<RbfKernel>(classic.model.kernel).gamma;
  r.timings.total = seconds_since(start);
  return r;
}

void aggregate(ExperimentReport& report) {
  std::vector<double> ti, tf, hs, sv;
  for (const SplitResult& s : report.splits) {
    ti.push_back(s.t_initial);
    tf.push_back(s.t_final);
    hs.push_back(s.hsvm_accuracy);
    sv.push_back(s.svm_accuracy);
  }
  auto column = [](const std::vector<double>& v) {
    ColumnSummary c;
    if (v.empty()) return c;
    c.mean = mean(v);
    if (v.size() >= 2) c.sd = summarize(v).sd;
    return c;
  };
  report.t_initial = column(ti);
  report.t_final = column(tf);
  report.hsvm = column(hs);
  report.svm = column(sv);

  report.wilcoxon.reset();
  report.wilcoxon_note.clear();
  if (report.splits.size() < 2) {
    report.wilcoxon_note = "skipped: fewer than two splits";
  } else {
    try {
      report.wilcoxon = wilcoxon_signed_rank(hs, sv);
    } catch (const DegenerateError&) {
      report.wilcoxon_note = "skipped: hSVM and SVM accuracies identical on every split";
    }
  }
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& data) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_splits);
  // Splits run concurrently when there are enough of them; otherwise the
  // workers go to the Gram evaluations. Results are identical either way.
  const int split_workers = n >= static_cast<std::size_t>(config.workers) ? config.workers : 1;
  const int gram_workers = split_workers == 1 ? config.workers : 1;

  std::vector<std::optional<SplitResult>> results(n);
  std::exception_ptr failure;
  try {
    parallel_for(n, split_workers, [&](std::size_t i) {
      results[i] = run_split(config, data, static_cast<int>(i), gram_workers);
    });
  } catch (...) {
    failure = std::current_exception();
  }

  ExperimentReport report;
  report.config = config;
  for (auto& r : results)
    if (r) report.splits.push_back(std::move(*r));
  aggregate(report);
  if (failure) {
    std::string what = "experiment failed";
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      what = e.what();
    }
    try {
      std::rethrow_exception(failure);
    } catch (...) {
      std::throw_with_nested(ExperimentError(what, std::move(report)));
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_dataset(config.data_path, config.filter));
}

}  // namespace qsvm
