// qsvm: command-line driver for the hybrid quantum-kernel SVM pipeline.
//
//   qsvm prep    validate a pixel table and print patch statistics
//   qsvm kernel  dump the quantum or RBF Gram matrix of one split
//   qsvm align   run the alignment optimizer on one split and print the trace
//   qsvm train   run one split end to end and write the fitted models
//   qsvm bench   run the full experiment and write the report
//
// Exit codes: 0 success, 1 internal error, 2 usage, 3 data, 4 convergence.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsvm/alignment.hpp"
#include "qsvm/bench.hpp"
#include "qsvm/matrix_io.hpp"
#include "qsvm/report.hpp"

namespace {

using namespace qsvm;
using ordered_json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kConvergence = 4 };

// Invalid flag values or configuration files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  ExperimentConfig config;
  std::string config_file;
  std::string format = "text";
  std::string out;
  std::string mode = "exact";
  std::string scaling_order = "pca-first";
  bool unbalanced = false;
  int split = 0;
};

void add_experiment_options(CLI::App& sub, Options& o) {
  ExperimentConfig& c = o.config;
  sub.add_option("--data", c.data_path, "pixel table (patch_id,blue,green,red,nir,label,is_margin)");
  sub.add_option("--config", o.config_file, "JSON config; its keys override the flags");
  sub.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
  sub.add_option("--out", o.out, "write output here instead of stdout");
  sub.add_option("--splits", c.n_splits, "number of train/test splits");
  sub.add_option("--train", c.n_train, "training pixels per split");
  sub.add_option("--test", c.n_test, "test pixels per split");
  sub.add_flag("--unbalanced", o.unbalanced, "sample without class balancing");
  sub.add_option("--fill", c.filter.fill, "required patch fill");
  sub.add_option("--min-cloudiness", c.filter.min_cloudiness);
  sub.add_option("--max-cloudiness", c.filter.max_cloudiness);
  sub.add_option("--depth", c.depth, "feature map repetitions");
  sub.add_option("--pca", c.pca_components, "PCA output dimension (= qubits)");
  sub.add_option("--scaling-order", o.scaling_order)->check(CLI::IsMember({"pca-first", "scale-first"}));
  sub.add_option("--spsa-iters,--iters", c.spsa.iterations, "SPSA iterations");
  sub.add_option("--spsa-a", c.spsa.a);
  sub.add_option("--spsa-c", c.spsa.c);
  sub.add_option("--spsa-alpha", c.spsa.alpha);
  sub.add_option("--spsa-gamma", c.spsa.gamma);
  sub.add_option("--spsa-A", c.spsa.stability);
  sub.add_option("--align-subset", c.align_subset, "per-iteration alignment subsample (0 = full set)");
  sub.add_flag("--random-theta0", c.random_theta0, "start SPSA from uniform [-pi, pi] angles");
  sub.add_option("--mode", o.mode, "kernel estimation mode")->check(CLI::IsMember({"exact", "shots"}));
  sub.add_option("--shots", c.shots, "shots per kernel entry in shots mode");
  sub.add_option("--C", c.C, "SVM regularization");
  sub.add_option("--smo-tol", c.smo_tolerance);
  sub.add_option("--workers", c.workers);
}

void add_seed(CLI::App& sub, Options& o, bool required) {
  auto* opt = sub.add_option("--seed", o.config.seed, "master seed");
  if (required) opt->required();
}

ExperimentConfig resolve(Options& o) {
  ExperimentConfig c = o.config;
  c.balanced = !o.unbalanced;
  c.scaling_order = parse_scaling_order(o.scaling_order);
  if (o.mode == "shots" && c.shots == 0) c.shots = 8192;
  if (o.mode == "exact") c.shots = 0;
  if (c.data_path.empty()) c.data_path = std::string(QSVM_FIXTURE_DIR) + "/blobs.csv";
  try {
    if (!o.config_file.empty()) {
      std::ifstream in(o.config_file);
      if (!in) throw IoError("cannot open config file '" + o.config_file + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      c = apply_config_json(ss.str(), c);
    }
    c.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(round_g12(x));
  return a;
}

int cmd_prep(Options& o, const std::string& export_path) {
  const ExperimentConfig c = resolve(o);
  std::vector<std::string> warnings;
  const auto pixels = load_pixels(c.data_path);
  const auto stats = patch_stats(pixels, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  const auto selected = select_patches(stats, c.filter);
  const auto candidates = pixels_in_patches(pixels, selected);
  long cloud = 0;
  for (std::size_t i : candidates) cloud += pixels[i].label == 1;

  Output out(o.out);
  std::ostream& os = out.stream();
  if (o.format == "json") {
    ordered_json j;
    j["pixels"] = pixels.size();
    ordered_json patches = ordered_json::array();
    for (const auto& s : stats) {
      const bool sel = std::find(selected.begin(), selected.end(), s.patch_id) != selected.end();
      patches.push_back({{"patch_id", s.patch_id},
                         {"cloudiness", round_g12(s.cloudiness)},
                         {"fill", round_g12(s.fill)},
                         {"pixel_count", s.pixel_count},
                         {"selected", sel}});
    }
    j["patches"] = patches;
    j["candidate_pixels"] = candidates.size();
    j["candidate_cloud"] = cloud;
    j["candidate_clear"] = static_cast<long>(candidates.size()) - cloud;
    os << j.dump(2) << '\n';
  } else {
    os << "pixels " << pixels.size() << '\n';
    os << "patch_id cloudiness fill pixel_count selected\n";
    for (const auto& s : stats) {
      const bool sel = std::find(selected.begin(), selected.end(), s.patch_id) != selected.end();
      os << s.patch_id << ' ' << format_g12(s.cloudiness) << ' ' << format_g12(s.fill) << ' ' << s.pixel_count << ' '
         << (sel ? "yes" : "no") << '\n';
    }
    os << "candidate pixels " << candidates.size() << " (cloud " << cloud << ", clear "
       << static_cast<long>(candidates.size()) - cloud << ")\n";
  }

  if (!export_path.empty()) {
    std::vector<PixelRecord> kept;
    for (std::size_t i : candidates) kept.push_back(pixels[i]);
    std::ofstream ex(export_path);
    if (!ex) throw IoError("cannot write '" + export_path + "'");
    write_pixels(ex, kept);
  }
  return kOk;
}

Eigen::VectorXd parse_theta(const std::string& text, int n_params) {
  Eigen::VectorXd theta(n_params);
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= n_params) throw ShapeError("--theta has more than " + std::to_string(n_params) + " values");
    try {
      theta[k++] = std::stod(item);
    } catch (const std::exception&) {
      throw ParseError("bad --theta value '" + item + "'");
    }
  }
  if (k != n_params) throw ShapeError("--theta needs " + std::to_string(n_params) + " values, got " + std::to_string(k));
  return theta;
}

int cmd_kernel(Options& o, const std::string& kind, long n, const std::string& theta_text) {
  const ExperimentConfig c = resolve(o);
  const Dataset data = load_dataset(c.data_path, c.filter);
  const PreparedSplit split = prepare_features(c, data, o.split);
  const Eigen::Index rows = n > 0 ? std::min<Eigen::Index>(n, split.train_x.rows()) : split.train_x.rows();
  const Eigen::MatrixXd X = split.train_x.topRows(rows);

  KernelMatrix K;
  if (kind == "rbf") {
    K = rbf_gram(X, rbf_default_gamma(split.train_x));
  } else {
    const Eigen::VectorXd theta =
        theta_text.empty() ? initial_theta(c, o.split) : parse_theta(theta_text, c.feature_map().n_params());
    K = gram_matrix(X, theta, c.feature_map(), kernel_mode(c, o.split), c.workers);
  }

  Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["kind"] = kind;
    j["n"] = K.rows();
    ordered_json m = ordered_json::array();
    for (Eigen::Index r = 0; r < K.rows(); ++r) m.push_back(vector_json(K.row(r).transpose()));
    j["matrix"] = m;
    out.stream() << j.dump(2) << '\n';
  } else {
    write_matrix(out.stream(), K);
  }
  return kOk;
}

int cmd_align(Options& o) {
  const ExperimentConfig c = resolve(o);
  const Dataset data = load_dataset(c.data_path, c.filter);
  const PreparedSplit split = prepare_features(c, data, o.split);
  const AlignmentTrace trace = optimize_alignment(c, split, o.split, c.workers);

  Output out(o.out);
  std::ostream& os = out.stream();
  if (o.format == "json") {
    ordered_json j;
    ordered_json t = ordered_json::array();
    for (double v : trace.values) t.push_back(round_g12(v));
    j["trace"] = t;
    j["T_i"] = round_g12(trace.initial);
    j["T_f"] = round_g12(trace.final);
    j["theta_final"] = vector_json(trace.theta);
    os << j.dump(2) << '\n';
  } else {
    os << "iter,alignment\n";
    for (std::size_t k = 0; k < trace.values.size(); ++k) os << k << ',' << format_g12(trace.values[k]) << '\n';
    ordered_json summary;
    summary["T_i"] = round_g12(trace.initial);
    summary["T_f"] = round_g12(trace.final);
    summary["theta_final"] = vector_json(trace.theta);
    os << summary.dump() << '\n';
  }
  return kOk;
}

int cmd_train(Options& o, const std::string& model_out, const std::string& rbf_model_out,
              const std::string& sidecar_out) {
  const ExperimentConfig c = resolve(o);
  const Dataset data = load_dataset(c.data_path, c.filter);
  const PreparedSplit split = prepare_features(c, data, o.split);
  const AlignmentTrace trace = optimize_alignment(c, split, o.split, c.workers);
  const FittedModel hybrid = fit_hybrid(c, split, trace.theta, o.split, c.workers);
  const FittedModel classic = fit_classic(c, split);

  auto write_to = [](const std::string& path, auto&& writer) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    writer(f);
  };
  write_to(model_out, [&](std::ostream& f) { write_model(f, hybrid.model); });
  write_to(rbf_model_out, [&](std::ostream& f) { write_model(f, classic.model); });
  write_to(sidecar_out, [&](std::ostream& f) { write_pipeline(f, split.pipeline); });

  Output out(o.out);
  std::ostream& os = out.stream();
  ordered_json j;
  j["split"] = o.split;
  j["T_i"] = round_g12(trace.initial);
  j["T_f"] = round_g12(trace.final);
  j["theta_final"] = vector_json(trace.theta);
  j["hSVM"] = round_g12(hybrid.test_accuracy);
  j["hSVM_train"] = round_g12(hybrid.train_accuracy);
  j["hSVM_support"] = hybrid.model.support.size();
  j["SVM"] = round_g12(classic.test_accuracy);
  j["SVM_train"] = round_g12(classic.train_accuracy);
  j["SVM_support"] = classic.model.support.size();
  j["rbf_gamma"] = round_g12(std::get<RbfKernel>(classic.model.kernel).gamma);
  j["clamped"] = split.clamped;
  if (o.format == "json") {
    os << j.dump(2) << '\n';
  } else {
    for (const auto& [key, value] : j.items()) os << key << ' ' << value.dump() << '\n';
  }
  return kOk;
}

int cmd_bench(Options& o) {
  const ExperimentConfig c = resolve(o);
  auto render = [&](const ExperimentReport& r) { return o.format == "json" ? report_to_json(r) : report_to_text(r); };
  try {
    const ExperimentReport report = run_experiment(c);
    Output out(o.out);
    out.stream() << render(report);
    for (const SplitResult& s : report.splits)
      std::cerr << "split " << s.index << ": " << s.timings.total << " s (prepare " << s.timings.prepare << ", align "
                << s.timings.align << ", hybrid " << s.timings.hybrid << ", classic " << s.timings.classic << ")\n";
  } catch (const ExperimentError& e) {
    const std::string path = (o.out.empty() ? std::string("qsvm-report") : o.out) + ".partial";
    std::ofstream partial(path);
    if (partial) {
      partial << render(e.partial());
      std::cerr << "partial report (" << e.partial().splits.size() << " splits) written to " << path << '\n';
    }
    throw;
  }
  return kOk;
}

// Innermost exception of a nested chain.
std::exception_ptr root_cause(std::exception_ptr ep) {
  for (;;) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::nested_exception& n) {
      if (!n.nested_ptr()) return ep;
      ep = n.nested_ptr();
    } catch (...) {
      return ep;
    }
  }
}

int exit_code_for(std::exception_ptr ep) {
  try {
    std::rethrow_exception(root_cause(ep));
  } catch (const ConvergenceError&) {
    return kConvergence;
  } catch (const IoError&) {
    return kData;
  } catch (const ParseError&) {
    return kData;
  } catch (const SelectionError&) {
    return kData;
  } catch (const SamplingError&) {
    return kData;
  } catch (const DegenerateError&) {
    return kData;
  } catch (const DomainError&) {
    return kData;
  } catch (...) {
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-kernel SVM toolkit"};
  app.require_subcommand(1);
  Options o;
  std::string export_path, kernel_kind = "quantum", theta_text, model_out, rbf_model_out, sidecar_out;
  long kernel_n = 0;

  auto* prep = app.add_subcommand("prep", "validate a pixel table and print patch statistics");
  add_experiment_options(*prep, o);
  prep->add_option("--export", export_path, "write the pixels of the selected patches here");

  auto* kernel = app.add_subcommand("kernel", "dump a Gram matrix for one split");
  add_experiment_options(*kernel, o);
  add_seed(*kernel, o, false);
  kernel->add_option("--split", o.split, "split index");
  kernel->add_option("--kind", kernel_kind)->check(CLI::IsMember({"quantum", "rbf"}));
  kernel->add_option("--n", kernel_n, "use the first n training points (0 = all)");
  kernel->add_option("--theta", theta_text, "comma-separated ansatz angles (default: theta_0)");

  auto* align = app.add_subcommand("align", "optimize kernel alignment on one split");
  add_experiment_options(*align, o);
  add_seed(*align, o, false);
  align->add_option("--split", o.split, "split index");

  auto* train = app.add_subcommand("train", "run one split and write the fitted models");
  add_experiment_options(*train, o);
  add_seed(*train, o, false);
  train->add_option("--split", o.split, "split index");
  train->add_option("--model-out", model_out, "hybrid SVM model file");
  train->add_option("--rbf-model-out", rbf_model_out, "RBF SVM model file");
  train->add_option("--sidecar-out", sidecar_out, "PCA and scaler parameters");

  auto* bench = app.add_subcommand("bench", "run the full experiment");
  add_experiment_options(*bench, o);
  add_seed(*bench, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*prep) return cmd_prep(o, export_path);
    if (*kernel) return cmd_kernel(o, kernel_kind, kernel_n, theta_text);
    if (*align) return cmd_align(o);
    if (*train) return cmd_train(o, model_out, rbf_model_out, sidecar_out);
    if (*bench) return cmd_bench(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (...) {
    const std::exception_ptr ep = std::current_exception();
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
    }
    return exit_code_for(ep);
  }
  return kUsage;
}
