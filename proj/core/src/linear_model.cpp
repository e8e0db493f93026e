#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"
#include "mespot/stfeatures.hpp"

namespace mespot {

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    fail(ErrorKind::Argument,
         fmt::format("feature length {} does not match model length {}", x.size(), weights.size()));
  }
  double s = bias;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
  return s;
}

namespace {

struct Problem {
  std::vector<std::vector<double>> samples;  // standardised copy when requested
  std::span<const int> labels;
  std::vector<double> sample_weight;  // class balancing, sums to N
  std::vector<double> mean;
  std::vector<double> scale;
};

double objective(const std::vector<double>& w, double b, const Problem& p, double lambda) {
  double reg = 0.0;
  for (const double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * p.samples[i][j];
    hinge += p.sample_weight[i] * std::max(0.0, 1.0 - p.labels[i] * s);
  }
  return 0.5 * lambda * reg + hinge / static_cast<double>(p.samples.size());
}

Problem make_problem(std::span<const std::vector<double>> samples, std::span<const int> labels, bool balance,
                     bool standardize) {
  if (samples.size() != labels.size()) fail(ErrorKind::Argument, "sample and label counts differ");
  std::size_t pos = 0, neg = 0;
  for (const int l : labels) {
    if (l == 1) {
      ++pos;
    } else if (l == -1) {
      ++neg;
    } else {
      fail(ErrorKind::Argument, "labels must be +1 or -1");
    }
  }
  if (pos == 0 || neg == 0) fail(ErrorKind::Training, "both classes need at least one sample");
  const std::size_t dim = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != dim) fail(ErrorKind::Argument, "samples differ in feature length");
  }
  Problem p{std::vector<std::vector<double>>(samples.begin(), samples.end()), labels,
            std::vector<double>(samples.size(), 1.0), std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  if (standardize) {
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples) {
      for (std::size_t j = 0; j < dim; ++j) p.mean[j] += s[j] / n;
    }
    for (std::size_t j = 0; j < dim; ++j) {
      double var = 0.0;
      for (const auto& s : samples) var += (s[j] - p.mean[j]) * (s[j] - p.mean[j]) / n;
      p.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    for (auto& s : p.samples) {
      for (std::size_t j = 0; j < dim; ++j) s[j] = (s[j] - p.mean[j]) / p.scale[j];
    }
  }
  if (balance) {
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      p.sample_weight[i] = n / (2.0 * static_cast<double>(labels[i] == 1 ? pos : neg));
    }
  }
  return p;
}

void reject_conflicting_duplicates(std::span<const std::vector<double>> samples, std::span<const int> labels) {
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (samples[order[i]] == samples[order[i - 1]] && labels[order[i]] != labels[order[i - 1]]) {
      fail(ErrorKind::Training, "an identical feature vector carries both labels; no separating margin exists");
    }
  }
}

}  // namespace

double hinge_objective(const LinearModel& model, std::span<const std::vector<double>> samples,
                       std::span<const int> labels, const TrainConfig& cfg) {
  const Problem p = make_problem(samples, labels, cfg.balance_classes, cfg.standardize);
  if (model.weights.size() != p.mean.size()) fail(ErrorKind::Argument, "model and samples differ in length");
  // raw-space model -> standardised space
  std::vector<double> w(model.weights.size());
  double b = model.bias;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = model.weights[j] * p.scale[j];
    b += model.weights[j] * p.mean[j];
  }
  return objective(w, b, p, cfg.lambda);
}

TrainResult train_linear(std::span<const std::vector<double>> samples, std::span<const int> labels,
                         const TrainConfig& cfg, const StFeatureConfig& features) {
  if (samples.empty()) fail(ErrorKind::Training, "no training samples");
  if (!(cfg.lambda > 0.0) || cfg.epochs < 1 || !(cfg.initial_step > 0.0)) {
    fail(ErrorKind::Configuration, "training needs lambda > 0, epochs >= 1 and a positive step");
  }
  const Problem p = make_problem(samples, labels, cfg.balance_classes, cfg.standardize);
  reject_conflicting_duplicates(samples, labels);

  const std::size_t dim = samples.front().size();
  const double n = static_cast<double>(samples.size());
  std::vector<double> w(dim, 0.0), grad(dim), trial(dim);
  double b = 0.0;
  double step = cfg.initial_step;
  double loss = objective(w, b, p, cfg.lambda);

  TrainResult result;
  result.loss_trace.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t j = 0; j < dim; ++j) grad[j] = cfg.lambda * w[j];
    double grad_b = 0.0;
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
      double s = b;
      for (std::size_t j = 0; j < dim; ++j) s += w[j] * p.samples[i][j];
      if (p.labels[i] * s < 1.0) {
        const double c = p.sample_weight[i] * p.labels[i] / n;
        for (std::size_t j = 0; j < dim; ++j) grad[j] -= c * p.samples[i][j];
        grad_b -= c;
      }
    }
    // Halve the step until the objective does not increase; keep the iterate
    // if no step within the budget helps.
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = w[j] - step * grad[j];
      const double trial_b = b - step * grad_b;
      const double trial_loss = objective(trial, trial_b, p, cfg.lambda);
      if (trial_loss <= loss) {
        w.swap(trial);
        b = trial_b;
        loss = trial_loss;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    result.loss_trace.push_back(loss);
  }
  result.model.features = features;
  for (std::size_t j = 0; j < dim; ++j) {
    w[j] /= p.scale[j];
    b -= w[j] * p.mean[j];
  }
  result.model.weights = std::move(w);
  result.model.bias = b;
  return result;
}

std::string write_linear_model_text(const LinearModel& model) {
  const auto& f = model.features;
  std::string out = fmt::format("{}\n", kLinearModelMagic);
  out += fmt::format("kind {}\n", to_string(f.kind));
  out += fmt::format("dims {} {} {}\n", f.blocks_x, f.blocks_y, f.blocks_t);
  out += fmt::format("overlap {}\n", f.overlap);
  out += fmt::format("bins {}\n", f.bins);
  out += fmt::format("L {}\n", f.window_length);
  out += "scales";
  for (const double s : f.scales) out += fmt::format(" {}", s);
  out += fmt::format("\nweights {}\n", model.weights.size());
  for (const double v : model.weights) out += fmt::format("{}\n", v);
  out += fmt::format("bias {}\n", model.bias);
  return out;
}

LinearModel parse_linear_model_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [](const std::string& msg) { fail(ErrorKind::Parse, "model file: " + msg); };
  if (!std::getline(in, line) || trim(line) != kLinearModelMagic) bad("missing MESPOT-LINEAR v1 magic");

  LinearModel m;
  auto expect = [&](const char* key) -> std::istringstream {
    if (!std::getline(in, line)) bad(std::string("missing ") + key);
    std::istringstream row(line);
    std::string k;
    row >> k;
    if (k != key) bad(fmt::format("expected '{}' but found '{}'", key, k));
    return row;
  };
  {
    auto row = expect("kind");
    std::string kind;
    row >> kind;
    m.features.kind = parse_st_feature_kind(kind);
  }
  {
    auto row = expect("dims");
    if (!(row >> m.features.blocks_x >> m.features.blocks_y >> m.features.blocks_t)) bad("bad dims");
  }
  {
    auto row = expect("overlap");
    std::string v;
    row >> v;
    const auto o = parse_real(v);
    if (!o) bad("bad overlap");
    m.features.overlap = *o;
  }
  if (!(expect("bins") >> m.features.bins)) bad("bad bins");
  if (!(expect("L") >> m.features.window_length)) bad("bad L");
  {
    auto row = expect("scales");
    m.features.scales.clear();
    std::string v;
    while (row >> v) {
      const auto s = parse_real(v);
      if (!s) bad("bad scale");
      m.features.scales.push_back(*s);
    }
  }
  std::size_t count = 0;
  if (!(expect("weights") >> count)) bad("bad weight count");
  m.weights.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) bad("truncated weights");
    const auto v = parse_real(line);
    if (!v || !std::isfinite(*v)) bad(fmt::format("bad weight on entry {}", i));
    m.weights.push_back(*v);
  }
  {
    auto row = expect("bias");
    std::string v;
    row >> v;
    const auto b = parse_real(v);
    if (!b || !std::isfinite(*b)) bad("bad bias");
    m.bias = *b;
  }
  m.features.validate();
  if (m.weights.size() != m.features.feature_length()) {
    fail(ErrorKind::Validation, fmt::format("model has {} weights but its extractor produces {}",
                                            m.weights.size(), m.features.feature_length()));
  }
  return m;
}

void write_linear_model(const LinearModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, write_linear_model_text(model));
}

LinearModel read_linear_model(const std::filesystem::path& path) {
  return parse_linear_model_text(read_text_file(path));
}

}  // namespace mespot
