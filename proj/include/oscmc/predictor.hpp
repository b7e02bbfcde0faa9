#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "oscmc/dc_model.hpp"

namespace oscmc {

class InsufficientHistory : public std::invalid_argument {
 public:
  InsufficientHistory() : std::invalid_argument("insufficient history") {}
};

struct PredictorConfig {
  std::size_t window = 6;
  std::size_t hidden = 8;
  double learning_rate = 0.05;
  int epochs = 200;
  std::uint64_t seed = 0x05c3c;
  bool zero_init = false;
};

/// Min-max bounds of the training data. A degenerate range keeps unit scale
/// and only shifts by `lo`.
struct Normalization {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double scale() const { return hi > lo ? hi - lo : 1.0; }
  [[nodiscard]] double forward(double x) const { return (x - lo) / scale(); }
  [[nodiscard]] double inverse(double y) const { return y * scale() + lo; }
};

/// One-hidden-layer feed-forward regressor: window -> sigmoid hidden -> linear.
struct PredictorModel {
  std::size_t window = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x window, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  double learning_rate = 0.05;
  Normalization norm;
  std::uint64_t seed = 0;
  std::uint64_t epochs_run = 0;

  static PredictorModel make(const PredictorConfig& config);

  [[nodiscard]] std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }
  [[nodiscard]] double& parameter(std::size_t i);
  [[nodiscard]] double parameter(std::size_t i) const;
  [[nodiscard]] bool finite() const;
};

/// A training pair in raw (unnormalized) units.
struct WindowSample {
  std::vector<double> inputs;
  double target = 0.0;
};

/// Sliding windows of `window` inputs followed by the next value.
std::vector<WindowSample> make_windows(std::span<const double> series, std::size_t window);

/// Output on already-normalized inputs.
double forward_normalized(const PredictorModel& model, std::span<const double> x);

/// Squared loss 0.5*(y-t)^2 on normalized data and its analytic gradient in
/// parameter() order.
double loss_and_gradient(const PredictorModel& model, std::span<const double> x, double target,
                         std::vector<double>& grad);

struct TrainResult {
  PredictorModel model;
  std::vector<double> loss_trace;  // mean normalized loss per epoch
};

/// Refits normalization to the samples and runs `epochs` passes of per-sample
/// gradient descent in a seeded shuffled order. Weights carry over from the
/// input model.
TrainResult train(PredictorModel model, std::span<const WindowSample> samples, int epochs);
TrainResult train(PredictorModel model, std::span<const double> series, int epochs);

/// One-step-ahead forecast from the last `window` raw values, clamped at 0.
double predict(const PredictorModel& model, std::span<const double> recent);

/// Max relative error between analytic and central-difference gradients.
double gradient_check(const PredictorModel& model, const WindowSample& sample, double step = 1e-4);

/// One PredictorModel per resource dimension.
struct ResourceForecaster {
  PredictorModel cpu;
  PredictorModel mem;
  PredictorModel bw;

  static ResourceForecaster make(const PredictorConfig& config);
  [[nodiscard]] ResourceVector predict(std::span<const double> cpu_window, std::span<const double> mem_window,
                                       std::span<const double> bw_window) const;
};

enum class CongestionValue : int { Underload = -1, Normal = 0, Congested = 1 };

struct CongestionThresholds {
  double traffic = 0.0;     // deviation threshold, bandwidth units
  double period = 1.0;      // time-period threshold, intervals
};

struct CongestionState {
  CongestionValue value = CongestionValue::Normal;
  double deviation = 0.0;
  CongestionThresholds thresholds;
};

/// Three-way classification of observed minus predicted aggregate traffic.
CongestionState detect_congestion(double observed_traffic, double predicted_traffic, double delta_t,
                                  const CongestionThresholds& thresholds);

}  // namespace oscmc
