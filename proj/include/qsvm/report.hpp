#pragma once

#include <string>
#include <string_view>

#include "qsvm/bench.hpp"

namespace qsvm {

/// JSON report. Floats carry 12 significant digits; per-stage timings are left
/// out so that identical runs give byte-identical files.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);

/// Table-shaped text report: per-split rows (T_i, T_f, hSVM, SVM), the
/// average and standard deviation rows, and the Wilcoxon comparison.
std::string report_to_text(const ExperimentReport& report);

/// Resolved configuration as JSON.
std::string config_to_json(const ExperimentConfig& config);

/// Applies the keys present in a JSON config document on top of `base`.
/// Unknown keys raise ParseError.
ExperimentConfig apply_config_json(std::string_view text, ExperimentConfig base);

std::string_view to_string(WilcoxonMethod method);
std::string_view to_string(ScalingOrder order);
ScalingOrder parse_scaling_order(std::string_view text);

}  // namespace qsvm
