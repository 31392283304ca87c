#include "qsvm/report.hpp"

#include <sstream>

#include "json.hpp"
#include "qsvm/matrix_io.hpp"

namespace qsvm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(WilcoxonMethod method) {
  return method == WilcoxonMethod::Exact ? "exact" : "normal-approx";
}

std::string_view to_string(ScalingOrder order) {
  return order == ScalingOrder::PcaFirst ? "pca-first" : "scale-first";
}

ScalingOrder parse_scaling_order(std::string_view text) {
  if (text == "pca-first") return ScalingOrder::PcaFirst;
  if (text == "scale-first") return ScalingOrder::ScaleFirst;
  throw ParseError("scaling order must be 'pca-first' or 'scale-first', got '" + std::string(text) + "'");
}

namespace {

double r12(double v) { return round_g12(v); }

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["data"] = c.data_path;
  j["splits"] = c.n_splits;
  j["train"] = c.n_train;
  j["test"] = c.n_test;
  j["balanced"] = c.balanced;
  j["fill"] = r12(c.filter.fill);
  j["min_cloudiness"] = r12(c.filter.min_cloudiness);
  j["max_cloudiness"] = r12(c.filter.max_cloudiness);
  j["depth"] = c.depth;
  j["pca"] = c.pca_components;
  j["scaling_order"] = std::string(to_string(c.scaling_order));
  j["spsa_iters"] = c.spsa.iterations;
  j["spsa_a"] = r12(c.spsa.a);
  j["spsa_c"] = r12(c.spsa.c);
  j["spsa_alpha"] = r12(c.spsa.alpha);
  j["spsa_gamma"] = r12(c.spsa.gamma);
  j["spsa_A"] = r12(c.spsa.stability);
  j["align_subset"] = c.align_subset;
  j["random_theta0"] = c.random_theta0;
  j["shots"] = c.shots;
  j["C"] = r12(c.C);
  j["smo_tol"] = r12(c.smo_tolerance);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig config_from(const json& j, ExperimentConfig c) {
  static const char* known[] = {"data",         "splits",      "train",      "test",       "balanced",
                                "fill",         "min_cloudiness", "max_cloudiness", "depth", "pca",
                                "scaling_order", "spsa_iters", "spsa_a",     "spsa_c",     "spsa_alpha",
                                "spsa_gamma",   "spsa_A",      "align_subset", "random_theta0", "shots",
                                "C",            "smo_tol",     "seed",       "workers"};
  if (!j.is_object()) throw ParseError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError("unknown configuration key '" + key + "'");
  }
  try {
    take(j, "data", c.data_path);
    take(j, "splits", c.n_splits);
    take(j, "train", c.n_train);
    take(j, "test", c.n_test);
    take(j, "balanced", c.balanced);
    take(j, "fill", c.filter.fill);
    take(j, "min_cloudiness", c.filter.min_cloudiness);
    take(j, "max_cloudiness", c.filter.max_cloudiness);
    take(j, "depth", c.depth);
    take(j, "pca", c.pca_components);
    if (j.contains("scaling_order")) c.scaling_order = parse_scaling_order(j.at("scaling_order").get<std::string>());
    take(j, "spsa_iters", c.spsa.iterations);
    take(j, "spsa_a", c.spsa.a);
    take(j, "spsa_c", c.spsa.c);
    take(j, "spsa_alpha", c.spsa.alpha);
    take(j, "spsa_gamma", c.spsa.gamma);
    take(j, "spsa_A", c.spsa.stability);
    take(j, "align_subset", c.align_subset);
    take(j, "random_theta0", c.random_theta0);
    take(j, "shots", c.shots);
    take(j, "C", c.C);
    take(j, "smo_tol", c.smo_tolerance);
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

ordered_json column_json(const ColumnSummary& c) {
  ordered_json j;
  j["mean"] = r12(c.mean);
  j["sd"] = c.sd ? ordered_json(r12(*c.sd)) : ordered_json(nullptr);
  return j;
}

ColumnSummary column_from(const json& j) {
  ColumnSummary c;
  c.mean = j.at("mean").get<double>();
  if (!j.at("sd").is_null()) c.sd = j.at("sd").get<double>();
  return c;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig apply_config_json(std::string_view text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return config_from(j, std::move(base));
}

std::string report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["format"] = "qsvm-report";
  j["version"] = 1;
  j["config"] = config_json(report.config);
  ordered_json splits = ordered_json::array();
  for (const SplitResult& s : report.splits) {
    ordered_json row;
    row["index"] = s.index;
    row["T_i"] = r12(s.t_initial);
    row["T_f"] = r12(s.t_final);
    row["hSVM"] = r12(s.hsvm_accuracy);
    row["SVM"] = r12(s.svm_accuracy);
    row["rbf_gamma"] = r12(s.rbf_gamma);
    row["clamped"] = s.clamped;
    ordered_json theta = ordered_json::array();
    for (double t : s.theta) theta.push_back(r12(t));
    row["theta_final"] = theta;
    splits.push_back(row);
  }
  j["splits"] = splits;
  ordered_json summary;
  summary["T_i"] = column_json(report.t_initial);
  summary["T_f"] = column_json(report.t_final);
  summary["hSVM"] = column_json(report.hsvm);
  summary["SVM"] = column_json(report.svm);
  j["summary"] = summary;
  if (report.wilcoxon) {
    const WilcoxonResult& w = *report.wilcoxon;
    ordered_json wj;
    wj["statistic"] = r12(w.statistic);
    wj["w_plus"] = r12(w.w_plus);
    wj["w_minus"] = r12(w.w_minus);
    wj["p_value"] = r12(w.p_value);
    wj["n_effective"] = w.n_effective;
    wj["method"] = std::string(to_string(w.method));
    wj["significant_at_0.05"] = w.p_value < 0.05;
    j["wilcoxon"] = wj;
  } else {
    j["wilcoxon"] = nullptr;
  }
  j["wilcoxon_note"] = report.wilcoxon_note;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "qsvm-report" || j.at("version") != 1) throw ParseError("not a qsvm-report version 1");
    ExperimentReport r;
    r.config = config_from(j.at("config"), ExperimentConfig{});
    for (const auto& row : j.at("splits")) {
      SplitResult s;
      s.index = row.at("index").get<int>();
      s.t_initial = row.at("T_i").get<double>();
      s.t_final = row.at("T_f").get<double>();
      s.hsvm_accuracy = row.at("hSVM").get<double>();
      s.svm_accuracy = row.at("SVM").get<double>();
      s.rbf_gamma = row.at("rbf_gamma").get<double>();
      s.clamped = row.at("clamped").get<long>();
      const auto& theta = row.at("theta_final");
      s.theta.resize(static_cast<Eigen::Index>(theta.size()));
      for (std::size_t i = 0; i < theta.size(); ++i) s.theta[static_cast<Eigen::Index>(i)] = theta[i].get<double>();
      r.splits.push_back(std::move(s));
    }
    const auto& summary = j.at("summary");
    r.t_initial = column_from(summary.at("T_i"));
    r.t_final = column_from(summary.at("T_f"));
    r.hsvm = column_from(summary.at("hSVM"));
    r.svm = column_from(summary.at("SVM"));
    if (!j.at("wilcoxon").is_null()) {
      const auto& wj = j.at("wilcoxon");
      WilcoxonResult w;
      w.statistic = wj.at("statistic").get<double>();
      w.w_plus = wj.at("w_plus").get<double>();
      w.w_minus = wj.at("w_minus").get<double>();
      w.p_value = wj.at("p_value").get<double>();
      w.n_effective = wj.at("n_effective").get<int>();
      w.method = wj.at("method") == "exact" ? WilcoxonMethod::Exact : WilcoxonMethod::NormalApprox;
      r.wilcoxon = w;
    }
    r.wilcoxon_note = j.at("wilcoxon_note").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string report_to_text(const ExperimentReport& report) {
  std::ostringstream os;
  auto pad = [](std::string s, std::size_t width) {
    return s.size() < width ? std::string(width - s.size(), ' ') + s : " " + s;
  };
  auto label = [](std::string s) { return s.size() < 20 ? s + std::string(20 - s.size(), ' ') : s + " "; };
  auto cell = [&](double v) { return pad(format_g12(v), 18); };

  os << "# qsvm experiment report\n";
  os << "# config " << config_json(report.config).dump() << "\n";
  os << label("split") << pad("T_i", 18) << pad("T_f", 18) << pad("hSVM", 18) << pad("SVM", 18)
     << pad("rbf_gamma", 18) << '\n';
  for (const SplitResult& s : report.splits)
    os << label(std::to_string(s.index)) << cell(s.t_initial) << cell(s.t_final) << cell(s.hsvm_accuracy)
       << cell(s.svm_accuracy) << cell(s.rbf_gamma) << '\n';
  if (report.splits.empty()) {
    os << label("Average") << "n/a (no completed splits)\n";
    os << label("Standard deviation") << "n/a (no completed splits)\n";
  } else {
    os << label("Average") << cell(report.t_initial.mean) << cell(report.t_final.mean) << cell(report.hsvm.mean)
       << cell(report.svm.mean) << '\n';
    if (report.t_initial.sd)
      os << label("Standard deviation") << cell(*report.t_initial.sd) << cell(*report.t_final.sd)
         << cell(*report.hsvm.sd) << cell(*report.svm.sd) << '\n';
    else
      os << label("Standard deviation") << "n/a (single split)\n";
  }
  if (report.wilcoxon) {
    const WilcoxonResult& w = *report.wilcoxon;
    os << "Wilcoxon signed-rank (hSVM vs SVM): W = " << format_g12(w.statistic) << ", W+ = " << format_g12(w.w_plus)
       << ", W- = " << format_g12(w.w_minus) << ", n = " << w.n_effective << ", p = " << format_g12(w.p_value)
       << " (" << to_string(w.method) << ") -> "
       << (w.p_value < 0.05 ? "significant difference" : "no significant difference") << " at p < 0.05\n";
  } else {
    os << "Wilcoxon signed-rank (hSVM vs SVM): " << report.wilcoxon_note << '\n';
  }
  return os.str();
}

}  // namespace qsvm
