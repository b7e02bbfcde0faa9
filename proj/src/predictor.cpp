#include "oscmc/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oscmc/rng.hpp"

namespace oscmc {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> normalized_inputs(const PredictorModel& m, std::span<const double> raw) {
  std::vector<double> x(raw.size());
  std::transform(raw.begin(), raw.end(), x.begin(), [&](double v) { return m.norm.forward(v); });
  return x;
}

}  // namespace

PredictorModel PredictorModel::make(const PredictorConfig& c) {
  if (c.window == 0 || c.hidden == 0) throw std::invalid_argument("predictor shape must be non-empty");
  PredictorModel m;
  m.window = c.window;
  m.hidden = c.hidden;
  m.learning_rate = c.learning_rate;
  m.seed = c.seed;
  m.w1.assign(c.hidden * c.window, 0.0);
  m.b1.assign(c.hidden, 0.0);
  m.w2.assign(c.hidden, 0.0);
  if (!c.zero_init) {
    std::mt19937_64 rng(stream_seed(c.seed, "predictor-init"));
    const double r1 = 1.0 / std::sqrt(static_cast<double>(c.window));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(c.hidden));
    std::uniform_real_distribution<double> d1(-r1, r1);
    std::uniform_real_distribution<double> d2(-r2, r2);
    for (double& w : m.w1) w = d1(rng);
    for (double& w : m.w2) w = d2(rng);
  }
  return m;
}

double& PredictorModel::parameter(std::size_t i) {
  if (i < w1.size()) return w1[i];
  i -= w1.size();
  if (i < b1.size()) return b1[i];
  i -= b1.size();
  if (i < w2.size()) return w2[i];
  i -= w2.size();
  if (i == 0) return b2;
  throw std::out_of_range("parameter index");
}

double PredictorModel::parameter(std::size_t i) const {
  return const_cast<PredictorModel&>(*this).parameter(i);
}

bool PredictorModel::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(w1.begin(), w1.end(), ok) && std::all_of(b1.begin(), b1.end(), ok) &&
         std::all_of(w2.begin(), w2.end(), ok) && std::isfinite(b2);
}

std::vector<WindowSample> make_windows(std::span<const double> series, std::size_t window) {
  if (window == 0 || series.size() < window + 1) throw InsufficientHistory();
  std::vector<WindowSample> out;
  out.reserve(series.size() - window);
  for (std::size_t i = 0; i + window < series.size(); ++i) {
    out.push_back({std::vector<double>(series.begin() + i, series.begin() + i + window), series[i + window]});
  }
  return out;
}

double forward_normalized(const PredictorModel& m, std::span<const double> x) {
  double y = m.b2;
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double z = m.b1[h];
    const double* row = &m.w1[h * m.window];
    for (std::size_t j = 0; j < m.window; ++j) z += row[j] * x[j];
    y += m.w2[h] * sigmoid(z);
  }
  return y;
}

double loss_and_gradient(const PredictorModel& m, std::span<const double> x, double target,
                         std::vector<double>& grad) {
  grad.assign(m.parameter_count(), 0.0);
  std::vector<double> act(m.hidden);
  double y = m.b2;
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double z = m.b1[h];
    const double* row = &m.w1[h * m.window];
    for (std::size_t j = 0; j < m.window; ++j) z += row[j] * x[j];
    act[h] = sigmoid(z);
    y += m.w2[h] * act[h];
  }
  const double err = y - target;
  const std::size_t b1_off = m.w1.size();
  const std::size_t w2_off = b1_off + m.b1.size();
  for (std::size_t h = 0; h < m.hidden; ++h) {
    grad[w2_off + h] = err * act[h];
    const double dz = err * m.w2[h] * act[h] * (1.0 - act[h]);
    grad[b1_off + h] = dz;
    for (std::size_t j = 0; j < m.window; ++j) grad[h * m.window + j] = dz * x[j];
  }
  grad.back() = err;
  return 0.5 * err * err;
}

TrainResult train(PredictorModel model, std::span<const WindowSample> samples, int epochs) {
  if (samples.empty()) throw InsufficientHistory();
  for (const auto& s : samples) {
    if (s.inputs.size() != model.window) throw std::invalid_argument("sample width does not match window");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : samples) {
    for (double v : s.inputs) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    lo = std::min(lo, s.target);
    hi = std::max(hi, s.target);
  }
  model.norm = {lo, hi};

  std::vector<std::vector<double>> xs;
  std::vector<double> ts;
  xs.reserve(samples.size());
  for (const auto& s : samples) {
    xs.push_back(normalized_inputs(model, s.inputs));
    ts.push_back(model.norm.forward(s.target));
  }

  TrainResult result;
  result.loss_trace.reserve(static_cast<std::size_t>(std::max(epochs, 0)));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  for (int e = 0; e < epochs; ++e) {
    std::mt19937_64 rng(stream_seed(model.seed, "predictor-epoch", model.epochs_run));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      total += loss_and_gradient(model, xs[idx], ts[idx], grad);
      for (std::size_t p = 0; p < grad.size(); ++p) model.parameter(p) -= model.learning_rate * grad[p];
    }
    result.loss_trace.push_back(total / static_cast<double>(order.size()));
    ++model.epochs_run;
  }
  result.model = std::move(model);
  return result;
}

TrainResult train(PredictorModel model, std::span<const double> series, int epochs) {
  const auto windows = make_windows(series, model.window);
  return train(std::move(model), windows, epochs);
}

double predict(const PredictorModel& model, std::span<const double> recent) {
  if (recent.size() != model.window) {
    throw std::invalid_argument("predict: expected window of " + std::to_string(model.window) + " values, got " +
                                std::to_string(recent.size()));
  }
  const auto x = normalized_inputs(model, recent);
  return std::max(0.0, model.norm.inverse(forward_normalized(model, x)));
}

double gradient_check(const PredictorModel& model, const WindowSample& sample, double step) {
  if (sample.inputs.size() != model.window) throw std::invalid_argument("sample width does not match window");
  const auto x = normalized_inputs(model, sample.inputs);
  const double t = model.norm.forward(sample.target);
  std::vector<double> analytic;
  loss_and_gradient(model, x, t, analytic);

  PredictorModel probe = model;
  std::vector<double> scratch;
  double worst = 0.0;
  for (std::size_t p = 0; p < probe.parameter_count(); ++p) {
    const double orig = probe.parameter(p);
    probe.parameter(p) = orig + step;
    const double up = loss_and_gradient(probe, x, t, scratch);
    probe.parameter(p) = orig - step;
    const double down = loss_and_gradient(probe, x, t, scratch);
    probe.parameter(p) = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / denom);
  }
  return worst;
}

ResourceForecaster ResourceForecaster::make(const PredictorConfig& config) {
  ResourceForecaster f;
  PredictorConfig c = config;
  f.cpu = PredictorModel::make(c);
  c.seed = stream_seed(config.seed, "mem");
  f.mem = PredictorModel::make(c);
  c.seed = stream_seed(config.seed, "bw");
  f.bw = PredictorModel::make(c);
  return f;
}

ResourceVector ResourceForecaster::predict(std::span<const double> cpu_window, std::span<const double> mem_window,
                                           std::span<const double> bw_window) const {
  return {oscmc::predict(cpu, cpu_window), oscmc::predict(mem, mem_window), oscmc::predict(bw, bw_window)};
}

CongestionState detect_congestion(double observed_traffic, double predicted_traffic, double delta_t,
                                  const CongestionThresholds& thresholds) {
  if (!(delta_t > 0.0)) throw std::invalid_argument("detect_congestion: delta_t must be positive");
  CongestionState s;
  s.deviation = observed_traffic - predicted_traffic;
  s.thresholds = thresholds;
  const double weighted = s.deviation * delta_t;
  if (weighted > thresholds.traffic * thresholds.period) {
    s.value = CongestionValue::Congested;
  } else if (weighted < 0.0) {
    s.value = CongestionValue::Underload;
  } else {
    s.value = CongestionValue::Normal;
  }
  return s;
}

}  // namespace oscmc
