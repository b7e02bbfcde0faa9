#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "oscmc/predictor.hpp"

using namespace oscmc;

namespace {

std::vector<double> sine_series(std::size_t n, double base = 500.0, double amp = 200.0) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = base + amp * std::sin(0.4 * static_cast<double>(i));
  return s;
}

PredictorModel model_of(std::size_t window, std::size_t hidden, std::uint64_t seed = 3) {
  PredictorConfig c;
  c.window = window;
  c.hidden = hidden;
  c.seed = seed;
  return PredictorModel::make(c);
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::max({std::abs(a[i]), std::abs(b[i]), 1e-7});
    worst = std::max(worst, std::abs(a[i] - b[i]) / d);
  }
  return worst;
}

}  // namespace

TEST_CASE("forward pass matches the reference evaluation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{6, 8}, {1, 1}, {3, 5}, {12, 16}}) {
    auto m = model_of(w, h);
    for (std::size_t p = 0; p < m.parameter_count(); ++p) m.parameter(p) = u(rng);
    std::vector<double> x(w);
    for (double& v : x) v = u(rng);
    CHECK(forward_normalized(m, x) == doctest::Approx(oracle::reference_output(m, x)).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{6, 8}, {1, 1}, {4, 3}, {12, 16}}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto m = model_of(w, h, trial);
      for (std::size_t p = 0; p < m.parameter_count(); ++p) m.parameter(p) = u(rng);
      std::vector<double> x(w);
      for (double& v : x) v = u(rng);
      const double target = u(rng);
      std::vector<double> g;
      loss_and_gradient(m, x, target, g);
      CHECK(max_rel_diff(g, oracle::numeric_gradient(m, x, target)) < 1e-3);
    }
  }
}

TEST_CASE("library gradient check agrees") {
  auto m = model_of(6, 8);
  const auto series = sine_series(40);
  m = train(m, series, 5).model;
  const auto windows = make_windows(series, 6);
  CHECK(gradient_check(m, windows.front()) < 1e-3);
  CHECK(gradient_check(m, windows.back()) < 1e-3);
}

TEST_CASE("loss is driven down on a periodic series") {
  const auto series = sine_series(120);
  const auto r = train(model_of(6, 8), series, 200);
  REQUIRE(r.loss_trace.size() == 200);
  CHECK(r.loss_trace.back() < 0.5 * r.loss_trace.front());
  CHECK(r.model.finite());
  CHECK(r.model.epochs_run == 200);

  const std::vector<double> recent(series.end() - 6, series.end());
  const double next = 500.0 + 200.0 * std::sin(0.4 * 120.0);
  CHECK(std::abs(predict(r.model, recent) - next) < 60.0);
}

TEST_CASE("same seed gives bit-identical training") {
  const auto series = sine_series(60);
  const auto a = train(model_of(6, 8, 9), series, 30);
  const auto b = train(model_of(6, 8, 9), series, 30);
  CHECK(a.loss_trace == b.loss_trace);
  CHECK(a.model.w1 == b.model.w1);
  CHECK(a.model.b2 == b.model.b2);
  const auto c = train(model_of(6, 8, 10), series, 30);
  CHECK(c.model.w1 != a.model.w1);
}

TEST_CASE("training continues from incoming weights") {
  const auto series = sine_series(60);
  const auto once = train(model_of(6, 8), series, 20);
  const auto twice = train(once.model, series, 20);
  CHECK(twice.model.epochs_run == 40);
  CHECK(twice.loss_trace.front() <= once.loss_trace.front());
}

TEST_CASE("windows need more history than the window") {
  const std::vector<double> five{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(make_windows(five, 5), InsufficientHistory);
  CHECK_THROWS_WITH(train(model_of(6, 8), five, 1), "insufficient history");
  const auto w = make_windows(five, 2);
  REQUIRE(w.size() == 3);
  CHECK(w[0].inputs == std::vector<double>{1, 2});
  CHECK(w[0].target == 3);
  CHECK(w[2].target == 5);
}

TEST_CASE("predict rejects a window of the wrong width") {
  const auto m = model_of(6, 8);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_WITH_AS(predict(m, three), "predict: expected window of 6 values, got 3", std::invalid_argument);
}

TEST_CASE("constant series stays finite and predicts the constant") {
  const std::vector<double> flat(30, 400.0);
  const auto r = train(model_of(6, 8), flat, 200);
  CHECK(r.model.finite());
  CHECK(r.model.norm.scale() == 1.0);
  const std::vector<double> recent(6, 400.0);
  CHECK(predict(r.model, recent) == doctest::Approx(400.0).epsilon(1e-3));
}

TEST_CASE("forecasts are never negative") {
  auto m = model_of(3, 2);
  m.b2 = -100.0;
  const std::vector<double> recent{0.0, 0.0, 0.0};
  CHECK(predict(m, recent) == 0.0);
}

TEST_CASE("zero initialisation yields a zero forward pass") {
  PredictorConfig c;
  c.zero_init = true;
  const auto m = PredictorModel::make(c);
  const std::vector<double> x(6, 0.3);
  CHECK(forward_normalized(m, x) == 0.0);
  CHECK(m.parameter_count() == 6 * 8 + 8 + 8 + 1);
  CHECK_THROWS_AS(static_cast<void>(m.parameter(m.parameter_count())), std::out_of_range);
}

TEST_CASE("empty shapes are rejected") {
  PredictorConfig c;
  c.window = 0;
  CHECK_THROWS_AS(PredictorModel::make(c), std::invalid_argument);
}

TEST_CASE("normalization round trips") {
  const Normalization n{100.0, 300.0};
  for (double x : {100.0, 150.0, 300.0, 17.5}) CHECK(n.inverse(n.forward(x)) == doctest::Approx(x));
  CHECK(n.forward(300.0) == 1.0);
  const Normalization flat{5.0, 5.0};
  CHECK(flat.forward(6.0) == 1.0);
}

TEST_CASE("resource forecaster keeps independent models") {
  auto f = ResourceForecaster::make(PredictorConfig{});
  CHECK(f.cpu.w1 != f.mem.w1);
  CHECK(f.mem.w1 != f.bw.w1);
  const std::vector<double> w(6, 0.5);
  const auto p = f.predict(w, w, w);
  CHECK(p.non_negative());
}

TEST_CASE("congestion classification") {
  const CongestionThresholds th{100.0, 1.0};
  CHECK(detect_congestion(1000, 850, 1.0, th).value == CongestionValue::Congested);
  CHECK(detect_congestion(1000, 900, 1.0, th).value == CongestionValue::Normal);
  CHECK(detect_congestion(1000, 950, 1.0, th).value == CongestionValue::Normal);
  CHECK(detect_congestion(900, 1000, 1.0, th).value == CongestionValue::Underload);
  CHECK(detect_congestion(1000, 1000, 1.0, th).value == CongestionValue::Normal);
  const auto s = detect_congestion(1200, 1000, 1.0, th);
  CHECK(s.deviation == 200.0);
  CHECK_THROWS_AS(detect_congestion(1, 1, 0.0, th), std::invalid_argument);
}
