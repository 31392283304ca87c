#include "qsvm/svm.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "qsvm/errors.hpp"

namespace qsvm {

double rbf_default_gamma(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.size() == 0) throw SizeError("default gamma of an empty feature matrix");
  const double mean = X.mean();
  const double variance = (X.array() - mean).square().mean();
  if (!(variance > 0.0)) throw DegenerateError("feature values have zero variance; default gamma undefined");
  return 1.0 / (static_cast<double>(X.cols()) * variance);
}

KernelMatrix rbf_cross(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::MatrixXd>& B,
                       double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("RBF gamma must be finite and positive");
  if (A.cols() != B.cols())
    throw ShapeError("RBF kernel between " + std::to_string(A.cols()) + "- and " + std::to_string(B.cols()) +
                     "-feature rows");
  KernelMatrix K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = std::exp(-gamma * (A.row(i) - B.row(j)).squaredNorm());
  return K;
}

KernelMatrix rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& X, double gamma) { return rbf_cross(X, X, gamma); }

double dual_objective(const Eigen::Ref<const Eigen::VectorXd>& alpha, const Eigen::Ref<const LabelVector>& y,
                      const Eigen::Ref<const KernelMatrix>& K) {
  const Eigen::VectorXd ay = alpha.cwiseProduct(y);
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-9;

void check_training_inputs(const Eigen::Ref<const KernelMatrix>& K, const Eigen::Ref<const LabelVector>& y,
                           double C) {
  if (K.rows() != K.cols()) throw ShapeError("training kernel must be square");
  if (K.rows() != y.size())
    throw ShapeError("kernel is " + std::to_string(K.rows()) + "x" + std::to_string(K.cols()) + " but there are " +
                     std::to_string(y.size()) + " labels");
  if (K.rows() < 2) throw SizeError("training needs at least two points");
  if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("C must be finite and positive");
  validate_labels(y);
  if ((y.array() > 0).all() || (y.array() < 0).all()) throw DegenerateError("training labels contain a single class");
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw ShapeError("training kernel is not symmetric");
}

}  // namespace

SvmModel train(const Eigen::Ref<const KernelMatrix>& K, const Eigen::Ref<const LabelVector>& y, double C,
               const SmoOptions& options) {
  check_training_inputs(K, y, C);
  const Eigen::Index n = y.size();

  // Minimization form: min 1/2 a^T Q a - e^T a, Q_ij = y_i y_j K_ij. grad = Q a - e.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  auto in_up = [&](Eigen::Index t) { return (y[t] > 0) ? alpha[t] < C : alpha[t] > 0; };
  auto in_low = [&](Eigen::Index t) { return (y[t] > 0) ? alpha[t] > 0 : alpha[t] < C; };

  const long max_iterations = options.max_passes * static_cast<long>(n);
  long iter = 0;
  double violation = 0.0;
  for (;; ++iter) {
    Eigen::Index i = -1, j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > g_max) g_max = v, i = t;
      if (in_low(t) && v < g_min) g_min = v, j = t;
    }
    violation = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (violation <= options.tolerance) break;
    if (iter >= max_iterations)
      throw ConvergenceError("SMO did not converge after " + std::to_string(iter) +
                             " iterations; KKT violation " + std::to_string(violation) + " > " +
                             std::to_string(options.tolerance));

    const double old_i = alpha[i], old_j = alpha[j];
    const double kii = K(i, i), kjj = K(j, j), kij = K(i, j);
    if (y[i] != y[j]) {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
      } else {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = C + diff;
      }
    } else {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
      } else {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = sum;
      }
    }

    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    grad.array() += y.array() * (K.col(i).array() * di + K.col(j).array() * dj);
  }

  // Offset: mean of y_t grad_t over free vectors, else the midpoint of the
  // feasible interval implied by the bounded ones. bias = -rho.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
  long n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);

  SvmModel model;
  model.kernel = PrecomputedKernel{};
  model.C = C;
  model.bias = -rho;
  model.alpha = alpha;
  model.iterations = iter;
  model.kkt_violation = violation;
  std::vector<double> coefs;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > kSupportThreshold) {
      model.support.push_back(static_cast<long>(t));
      coefs.push_back(alpha[t] * y[t]);
    }
  }
  model.dual_coefs = Eigen::Map<Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
  return model;
}

SvmModel train_rbf(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const LabelVector>& y, double gamma,
                   double C, const SmoOptions& options) {
  SvmModel model = train(rbf_gram(X, gamma), y, C, options);
  model.kernel = RbfKernel{gamma};
  model.support_vectors.resize(static_cast<Eigen::Index>(model.support.size()), X.cols());
  for (std::size_t s = 0; s < model.support.size(); ++s)
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = X.row(model.support[s]);
  return model;
}

KernelMatrix support_columns(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& test_by_train) {
  KernelMatrix rows(test_by_train.rows(), static_cast<Eigen::Index>(model.support.size()));
  for (std::size_t s = 0; s < model.support.size(); ++s) {
    if (model.support[s] >= test_by_train.cols())
      throw ShapeError("support index " + std::to_string(model.support[s]) + " beyond kernel block with " +
                       std::to_string(test_by_train.cols()) + " columns");
    rows.col(static_cast<Eigen::Index>(s)) = test_by_train.col(model.support[s]);
  }
  return rows;
}

Eigen::VectorXd decision_function(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& kernel_rows) {
  if (kernel_rows.cols() != model.dual_coefs.size())
    throw ShapeError("kernel rows have " + std::to_string(kernel_rows.cols()) + " columns, model has " +
                     std::to_string(model.dual_coefs.size()) + " support vectors");
  return (kernel_rows * model.dual_coefs).array() + model.bias;
}

LabelVector predict(const SvmModel& model, const Eigen::Ref<const KernelMatrix>& kernel_rows) {
  return decision_function(model, kernel_rows).unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

LabelVector predict_rbf(const SvmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const auto* rbf = std::get_if<RbfKernel>(&model.kernel);
  if (!rbf) throw ShapeError("predict_rbf needs a model trained with an RBF kernel");
  if (model.support_vectors.rows() == 0) return predict(model, KernelMatrix(X.rows(), 0));
  return predict(model, rbf_cross(X, model.support_vectors, rbf->gamma));
}

double accuracy(const Eigen::Ref<const LabelVector>& predicted, const Eigen::Ref<const LabelVector>& actual) {
  if (predicted.size() != actual.size())
    throw ShapeError(std::to_string(predicted.size()) + " predictions for " + std::to_string(actual.size()) +
                     " labels");
  if (actual.size() == 0) throw SizeError("accuracy of an empty label vector");
  return static_cast<double>((predicted.array() == actual.array()).count()) / static_cast<double>(actual.size());
}

void write_model(std::ostream& os, const SvmModel& model) {
  const auto flags = os.flags();
  const auto precision = os.precision(12);
  os << "qsvm-model 1\n";
  os << "C " << model.C << '\n';
  if (const auto* rbf = std::get_if<RbfKernel>(&model.kernel))
    os << "kernel rbf " << rbf->gamma << '\n';
  else
    os << "kernel precomputed\n";
  os << "bias " << model.bias << '\n';
  const bool with_vectors = std::holds_alternative<RbfKernel>(model.kernel);
  os << "support " << model.support.size() << ' ' << (with_vectors ? model.support_vectors.cols() : 0) << '\n';
  for (std::size_t s = 0; s < model.support.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    os << model.support[s] << ' ' << model.dual_coefs[r];
    if (with_vectors)
      for (Eigen::Index c = 0; c < model.support_vectors.cols(); ++c) os << ' ' << model.support_vectors(r, c);
    os << '\n';
  }
  os.precision(precision);
  os.flags(flags);
}

SvmModel read_model(std::istream& is) {
  long line_no = 0;
  auto next_line = [&](const char* expected) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(std::string("missing ") + expected, line_no + 1);
    ++line_no;
    return std::istringstream(line);
  };
  auto expect_key = [&](std::istringstream& ls, const char* key) {
    std::string word;
    if (!(ls >> word) || word != key) throw ParseError(std::string("expected '") + key + "'", line_no);
  };

  SvmModel model;
  {
    auto ls = next_line("header");
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "qsvm-model" || version != 1)
      throw ParseError("not a qsvm-model version 1 file", line_no);
  }
  {
    auto ls = next_line("C");
    expect_key(ls, "C");
    if (!(ls >> model.C)) throw ParseError("bad C value", line_no);
  }
  {
    auto ls = next_line("kernel");
    expect_key(ls, "kernel");
    std::string kind;
    ls >> kind;
    if (kind == "precomputed") {
      model.kernel = PrecomputedKernel{};
    } else if (kind == "rbf") {
      double gamma = 0;
      if (!(ls >> gamma)) throw ParseError("bad RBF gamma", line_no);
      model.kernel = RbfKernel{gamma};
    } else {
      throw ParseError("unknown kernel '" + kind + "'", line_no);
    }
  }
  {
    auto ls = next_line("bias");
    expect_key(ls, "bias");
    if (!(ls >> model.bias)) throw ParseError("bad bias value", line_no);
  }
  long count = 0, width = 0;
  {
    auto ls = next_line("support");
    expect_key(ls, "support");
    if (!(ls >> count >> width) || count < 0 || width < 0) throw ParseError("bad support header", line_no);
  }
  model.dual_coefs.resize(count);
  model.support_vectors.resize(width > 0 ? count : 0, width);
  for (long s = 0; s < count; ++s) {
    auto ls = next_line("support vector");
    long index = 0;
    if (!(ls >> index >> model.dual_coefs[s])) throw ParseError("bad support vector entry", line_no);
    model.support.push_back(index);
    for (long c = 0; c < width; ++c)
      if (!(ls >> model.support_vectors(s, c))) throw ParseError("bad support vector feature", line_no);
  }
  return model;
}

}  // namespace qsvm
