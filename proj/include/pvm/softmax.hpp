#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pvm/errors.hpp"
#include "pvm/features.hpp"

namespace pvm {

/// Multinomial logistic regression with stored z-score normalization.
/// weights are row-major [classes x feature_dim]; norm_std entries are
/// pre-sanitized (zero-variance dimensions stored as 1).
struct SoftmaxModel {
  std::vector<std::string> class_labels;
  int feature_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<double> norm_mean;
  std::vector<double> norm_std;

  int num_classes() const { return static_cast<int>(class_labels.size()); }

  friend bool operator==(const SoftmaxModel& a, const SoftmaxModel& b) {
    return a.class_labels == b.class_labels && a.feature_dim == b.feature_dim &&
           a.weights == b.weights && a.bias == b.bias && a.norm_mean == b.norm_mean &&
           a.norm_std == b.norm_std;
  }
};

struct TrainConfig {
  std::array<int, 3> split = {60, 20, 20};  // train, test, validation percentages
  int batch_size = 32;
  int epochs = 30;
  double initial_lr = 0.01;
  double reduced_lr = 0.001;
  int lr_drop_epoch = 20;  // epochs [0, drop) use initial_lr, the rest reduced_lr
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  void validate() const {
    if (split[0] + split[1] + split[2] != 100) {
      throw InvalidArgument("TrainConfig: split percentages must sum to 100");
    }
    if (split[0] <= 0) throw InvalidArgument("TrainConfig: train split must be positive");
    if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
    if (epochs < 1) throw InvalidArgument("TrainConfig: epochs must be >= 1");
    if (initial_lr <= 0 || reduced_lr <= 0) throw InvalidArgument("TrainConfig: learning rates must be positive");
    if (l2 < 0) throw InvalidArgument("TrainConfig: l2 must be nonnegative");
  }

  double lr_at(int epoch) const { return epoch < lr_drop_epoch ? initial_lr : reduced_lr; }
};

/// Feature vectors with integer labels into `class_labels`.
struct LabeledFeatures {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  std::vector<std::string> class_labels;

  std::size_t size() const { return features.size(); }
};

struct Prediction {
  int label_index = 0;
  std::string label;
  std::vector<double> probabilities;
};

struct ParamGradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

namespace detail {

inline std::vector<double> normalize_input(const SoftmaxModel& model, const FeatureVector& x) {
  if (static_cast<int>(x.size()) != model.feature_dim) {
    throw InvalidArgument("feature dimension " + std::to_string(x.size()) +
                          " does not match model dimension " + std::to_string(model.feature_dim));
  }
  std::vector<double> z(x.values.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = (x.values[j] - model.norm_mean[j]) / model.norm_std[j];
  }
  return z;
}

inline std::vector<double> softmax_probs(const SoftmaxModel& model, const std::vector<double>& z) {
  const int k_classes = model.num_classes();
  std::vector<double> logits(static_cast<std::size_t>(k_classes));
  for (int k = 0; k < k_classes; ++k) {
    const double* w = model.weights.data() + static_cast<std::size_t>(k) * model.feature_dim;
    double acc = model.bias[static_cast<std::size_t>(k)];
    for (int j = 0; j < model.feature_dim; ++j) acc += w[j] * z[static_cast<std::size_t>(j)];
    logits[static_cast<std::size_t>(k)] = acc;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double& v : logits) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (double& v : logits) v /= denom;
  return logits;
}

/// Deterministic Fisher-Yates; avoids std::shuffle's unspecified draws.
inline void deterministic_shuffle(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

/// Softmax probabilities plus the argmax label (lowest index wins ties).
inline Prediction predict(const SoftmaxModel& model, const FeatureVector& x) {
  const std::vector<double> z = detail::normalize_input(model, x);
  Prediction p;
  p.probabilities = detail::softmax_probs(model, z);
  p.label_index = 0;
  for (int k = 1; k < model.num_classes(); ++k) {
    if (p.probabilities[static_cast<std::size_t>(k)] >
        p.probabilities[static_cast<std::size_t>(p.label_index)]) {
      p.label_index = k;
    }
  }
  p.label = model.class_labels[static_cast<std::size_t>(p.label_index)];
  return p;
}

/// Exact gradient of mean cross-entropy plus the L2 term (weights only).
inline ParamGradient gradient(const SoftmaxModel& model, const std::vector<FeatureVector>& batch_x,
                              const std::vector<int>& batch_y, double l2) {
  if (batch_x.empty() || batch_x.size() != batch_y.size()) {
    throw InvalidArgument("gradient: batch must be non-empty with matching labels");
  }
  const int k_classes = model.num_classes();
  const int dim = model.feature_dim;
  ParamGradient g;
  g.weights.assign(static_cast<std::size_t>(k_classes) * dim, 0.0);
  g.bias.assign(static_cast<std::size_t>(k_classes), 0.0);

  for (std::size_t i = 0; i < batch_x.size(); ++i) {
    const std::vector<double> z = detail::normalize_input(model, batch_x[i]);
    const std::vector<double> p = detail::softmax_probs(model, z);
    for (int k = 0; k < k_classes; ++k) {
      const double delta = p[static_cast<std::size_t>(k)] - (batch_y[i] == k ? 1.0 : 0.0);
      g.bias[static_cast<std::size_t>(k)] += delta;
      double* gw = g.weights.data() + static_cast<std::size_t>(k) * dim;
      for (int j = 0; j < dim; ++j) gw[j] += delta * z[static_cast<std::size_t>(j)];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(batch_x.size());
  for (double& v : g.bias) v *= inv_n;
  for (std::size_t i = 0; i < g.weights.size(); ++i) {
    g.weights[i] = g.weights[i] * inv_n + l2 * model.weights[i];
  }
  return g;
}

/// Mean cross-entropy plus 0.5 * l2 * ||W||^2 over a labeled set.
inline double loss(const SoftmaxModel& model, const std::vector<FeatureVector>& xs,
                   const std::vector<int>& ys, double l2) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw InvalidArgument("loss: set must be non-empty with matching labels");
  }
  double ce = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::vector<double> p = detail::softmax_probs(model, detail::normalize_input(model, xs[i]));
    ce -= std::log(std::max(p[static_cast<std::size_t>(ys[i])], 1e-300));
  }
  double l2_term = 0.0;
  for (double w : model.weights) l2_term += w * w;
  return ce / static_cast<double>(xs.size()) + 0.5 * l2 * l2_term;
}

struct TrainResult {
  SoftmaxModel model;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  std::vector<int> validation_indices;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
};

/// Mini-batch gradient descent on the train portion of a seeded 60-20-20
/// split. Deterministic: same data, seed and config give bit-identical
/// parameters. The validation portion is only ever evaluated, never fit.
inline TrainResult train(const LabeledFeatures& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.class_labels.size() < 2) {
    throw InvalidArgument("train: need at least 2 classes");
  }
  if (dataset.features.size() != dataset.labels.size() || dataset.features.empty()) {
    throw InvalidArgument("train: features and labels must be non-empty and aligned");
  }
  std::vector<std::size_t> per_class(dataset.class_labels.size(), 0);
  for (int y : dataset.labels) {
    if (y < 0 || y >= static_cast<int>(dataset.class_labels.size())) {
      throw InvalidArgument("train: label index out of range");
    }
    ++per_class[static_cast<std::size_t>(y)];
  }
  std::size_t classes_present = 0;
  for (std::size_t c : per_class) classes_present += c > 0 ? 1 : 0;
  if (classes_present < 2) {
    throw InvalidArgument("train: dataset is degenerate (fewer than 2 classes present)");
  }

  const int dim = static_cast<int>(dataset.features.front().size());
  for (const auto& f : dataset.features) {
    if (static_cast<int>(f.size()) != dim) throw InvalidArgument("train: ragged feature vectors");
  }

  std::mt19937_64 rng(config.seed);
  const std::size_t n = dataset.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  detail::deterministic_shuffle(order, rng);

  TrainResult result;
  const std::size_t n_train = std::max<std::size_t>(1, n * static_cast<std::size_t>(config.split[0]) / 100);
  const std::size_t n_test = n * static_cast<std::size_t>(config.split[1]) / 100;
  result.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  result.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                             order.begin() + static_cast<std::ptrdiff_t>(std::min(n, n_train + n_test)));
  result.validation_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n, n_train + n_test)),
                                   order.end());

  std::vector<FeatureVector> train_x, val_x;
  std::vector<int> train_y, val_y;
  for (int i : result.train_indices) {
    train_x.push_back(dataset.features[static_cast<std::size_t>(i)]);
    train_y.push_back(dataset.labels[static_cast<std::size_t>(i)]);
  }
  for (int i : result.validation_indices) {
    val_x.push_back(dataset.features[static_cast<std::size_t>(i)]);
    val_y.push_back(dataset.labels[static_cast<std::size_t>(i)]);
  }

  SoftmaxModel& model = result.model;
  model.class_labels = dataset.class_labels;
  model.feature_dim = dim;
  model.weights.assign(dataset.class_labels.size() * static_cast<std::size_t>(dim), 0.0);
  model.bias.assign(dataset.class_labels.size(), 0.0);
  model.norm_mean.assign(static_cast<std::size_t>(dim), 0.0);
  model.norm_std.assign(static_cast<std::size_t>(dim), 1.0);

  for (const auto& x : train_x) {
    for (int j = 0; j < dim; ++j) model.norm_mean[static_cast<std::size_t>(j)] += x.values[static_cast<std::size_t>(j)];
  }
  for (double& m : model.norm_mean) m /= static_cast<double>(train_x.size());
  std::vector<double> var(static_cast<std::size_t>(dim), 0.0);
  for (const auto& x : train_x) {
    for (int j = 0; j < dim; ++j) {
      const double d = x.values[static_cast<std::size_t>(j)] - model.norm_mean[static_cast<std::size_t>(j)];
      var[static_cast<std::size_t>(j)] += d * d;
    }
  }
  for (int j = 0; j < dim; ++j) {
    const double sd = std::sqrt(var[static_cast<std::size_t>(j)] / static_cast<double>(train_x.size()));
    model.norm_std[static_cast<std::size_t>(j)] = sd > 0.0 ? sd : 1.0;
  }

  result.initial_train_loss = loss(model, train_x, train_y, config.l2);

  std::vector<int> batch_order(train_x.size());
  for (std::size_t i = 0; i < batch_order.size(); ++i) batch_order[i] = static_cast<int>(i);
  std::vector<FeatureVector> bx;
  std::vector<int> by;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    detail::deterministic_shuffle(batch_order, rng);
    const double lr = config.lr_at(epoch);
    for (std::size_t start = 0; start < batch_order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(batch_order.size(), start + static_cast<std::size_t>(config.batch_size));
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < stop; ++i) {
        bx.push_back(train_x[static_cast<std::size_t>(batch_order[i])]);
        by.push_back(train_y[static_cast<std::size_t>(batch_order[i])]);
      }
      const ParamGradient g = gradient(model, bx, by, config.l2);
      for (std::size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= lr * g.weights[i];
      for (std::size_t i = 0; i < model.bias.size(); ++i) model.bias[i] -= lr * g.bias[i];
    }
  }

  result.final_train_loss = loss(model, train_x, train_y, config.l2);
  result.final_validation_loss = val_x.empty() ? 0.0 : loss(model, val_x, val_y, config.l2);
  return result;
}

/// Accuracy in percent, per-class precision/recall as fractions, and the
/// full confusion matrix (rows = true class, columns = predicted).
struct EvalReport {
  std::vector<std::string> class_labels;
  std::vector<std::vector<int>> confusion;
  int total = 0;
  double accuracy_pct = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
};

inline EvalReport evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                       const std::vector<std::string>& class_labels) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw InvalidArgument("evaluate_predictions: need non-empty, aligned label sequences");
  }
  const std::size_t k_classes = class_labels.size();
  EvalReport report;
  report.class_labels = class_labels;
  report.confusion.assign(k_classes, std::vector<int>(k_classes, 0));
  report.total = static_cast<int>(truth.size());

  int correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 0 || p < 0 || t >= static_cast<int>(k_classes) || p >= static_cast<int>(k_classes)) {
      throw InvalidArgument("evaluate_predictions: label index out of range");
    }
    ++report.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    if (t == p) ++correct;
  }
  report.accuracy_pct = 100.0 * correct / static_cast<double>(report.total);

  report.precision.assign(k_classes, 0.0);
  report.recall.assign(k_classes, 0.0);
  for (std::size_t k = 0; k < k_classes; ++k) {
    int col = 0, row = 0;
    for (std::size_t i = 0; i < k_classes; ++i) {
      col += report.confusion[i][k];
      row += report.confusion[k][i];
    }
    report.precision[k] = col > 0 ? static_cast<double>(report.confusion[k][k]) / col : 0.0;
    report.recall[k] = row > 0 ? static_cast<double>(report.confusion[k][k]) / row : 0.0;
  }
  return report;
}

inline EvalReport evaluate(const SoftmaxModel& model, const std::vector<FeatureVector>& xs,
                           const std::vector<int>& ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw InvalidArgument("evaluate: test set must be non-empty with matching labels");
  }
  std::vector<int> predicted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) predicted[i] = predict(model, xs[i]).label_index;
  return evaluate_predictions(ys, predicted, model.class_labels);
}

/// Per-class precision/recall rows followed by an accuracy summary.
inline std::string render_report(const EvalReport& report, const std::string& title = "") {
  std::ostringstream out;
  if (!title.empty()) out << title << "\n";
  out << std::left << std::setw(10) << "Class" << std::right << std::setw(11) << "Precision"
      << std::setw(9) << "Recall" << "\n";
  for (std::size_t k = 0; k < report.class_labels.size(); ++k) {
    out << std::left << std::setw(10) << report.class_labels[k] << std::right << std::fixed
        << std::setprecision(2) << std::setw(11) << report.precision[k] << std::setw(9)
        << report.recall[k] << "\n";
  }
  out << "Accuracy " << std::fixed << std::setprecision(2) << report.accuracy_pct << "\n";
  return out.str();
}

/// Side-by-side per-emotion precision for the two gender-dependent emotion
/// classifiers (one row per emotion, one column per classifier).
inline std::string render_emotion_precision_table(const EvalReport& male_report,
                                                  const EvalReport& female_report) {
  if (male_report.class_labels != female_report.class_labels) {
    throw InvalidArgument("render_emotion_precision_table: class label sets differ");
  }
  std::ostringstream out;
  out << std::left << std::setw(10) << "Emotions" << std::right << std::setw(10) << "Male-Emo"
      << std::setw(12) << "Female-Emo" << "\n";
  for (std::size_t k = 0; k < male_report.class_labels.size(); ++k) {
    out << std::left << std::setw(10) << male_report.class_labels[k] << std::right << std::fixed
        << std::setprecision(2) << std::setw(10) << male_report.precision[k] << std::setw(12)
        << female_report.precision[k] << "\n";
  }
  return out.str();
}

/// Accuracy summary with one row per named classifier.
inline std::string render_accuracy_table(
    const std::vector<std::pair<std::string, double>>& classifier_accuracy) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "Classifier" << std::right << std::setw(9) << "Accuracy"
      << "\n";
  for (const auto& [name, accuracy] : classifier_accuracy) {
    out << std::left << std::setw(16) << name << std::right << std::fixed << std::setprecision(2)
        << std::setw(9) << accuracy << "\n";
  }
  return out.str();
}

inline std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "class,precision,recall\n";
  for (std::size_t k = 0; k < report.class_labels.size(); ++k) {
    out << report.class_labels[k] << "," << std::fixed << std::setprecision(4)
        << report.precision[k] << "," << report.recall[k] << "\n";
  }
  out << "accuracy," << std::fixed << std::setprecision(2) << report.accuracy_pct << ",\n";
  return out.str();
}

// --- model container -------------------------------------------------------
//
// Little-endian layout, magic "PVM-SMX1":
//   char[8]  magic
//   u32      class count K
//   u32      feature dim D
//   K x (u32 length, bytes)  class labels
//   D x f64  normalization means
//   D x f64  normalization stds (pre-sanitized)
//   K*D x f64  weights, row-major
//   K x f64  biases

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void put_f64_le(std::ostream& out, double v) {
  std::uint64_t raw;
  std::memcpy(&raw, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((raw >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline std::uint32_t take_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ModelFormatError("model file truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline double take_f64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw ModelFormatError("model file truncated");
  std::uint64_t raw = 0;
  for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &raw, 8);
  return v;
}

}  // namespace detail

inline constexpr char kModelMagic[8] = {'P', 'V', 'M', '-', 'S', 'M', 'X', '1'};

inline void save_model(const std::filesystem::path& path, const SoftmaxModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFormatError("cannot write '" + path.string() + "'");
  out.write(kModelMagic, 8);
  detail::put_u32_le(out, static_cast<std::uint32_t>(model.num_classes()));
  detail::put_u32_le(out, static_cast<std::uint32_t>(model.feature_dim));
  for (const auto& label : model.class_labels) {
    detail::put_u32_le(out, static_cast<std::uint32_t>(label.size()));
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
  }
  for (double v : model.norm_mean) detail::put_f64_le(out, v);
  for (double v : model.norm_std) detail::put_f64_le(out, v);
  for (double v : model.weights) detail::put_f64_le(out, v);
  for (double v : model.bias) detail::put_f64_le(out, v);
  if (!out) throw ModelFormatError("short write to '" + path.string() + "'");
}

inline SoftmaxModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open '" + path.string() + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kModelMagic, 8) != 0) {
    throw ModelFormatError("'" + path.string() + "' is not a PVM-SMX1 model file");
  }
  SoftmaxModel model;
  const std::uint32_t k_classes = detail::take_u32_le(in);
  const std::uint32_t dim = detail::take_u32_le(in);
  if (k_classes == 0 || dim == 0 || k_classes > 4096 || dim > (1u << 20)) {
    throw ModelFormatError("'" + path.string() + "' has implausible dimensions");
  }
  model.feature_dim = static_cast<int>(dim);
  model.class_labels.resize(k_classes);
  for (auto& label : model.class_labels) {
    const std::uint32_t len = detail::take_u32_le(in);
    if (len > 4096) throw ModelFormatError("'" + path.string() + "' has an implausible label length");
    label.resize(len);
    in.read(label.data(), static_cast<std::streamsize>(len));
    if (!in) throw ModelFormatError("model file truncated");
  }
  auto read_block = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    for (double& x : v) x = detail::take_f64_le(in);
  };
  read_block(model.norm_mean, dim);
  read_block(model.norm_std, dim);
  read_block(model.weights, static_cast<std::size_t>(k_classes) * dim);
  read_block(model.bias, k_classes);
  return model;
}

}  // namespace pvm
