#include "tvsaddle/metrics.hpp"

#include <cmath>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

double distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("distance_sq: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double gap_of(const SaddleProblem& problem, std::span<const double> z) {
  if (!problem.has_gap_oracle()) throw UnsupportedMetricError("gap_of: problem has no gap oracle");
  return problem.gap(z);
}

double consensus_error(const NodeStates& states) {
  if (states.node_count() == 0) return 0.0;
  const Vector mean = states.mean();
  double s = 0.0;
  for (std::size_t m = 0; m < states.node_count(); ++m) s += distance_sq(states.row(m), mean);
  return s / static_cast<double>(states.node_count());
}

namespace {

double ls_slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("rate fit: abscissae are all equal");
  return sxy / sxx;
}

template <typename TransformX>
double fit_tail(const Series& series, TransformX tx, const char* who) {
  if (series.size() < 10) throw ValidationError(std::string(who) + ": needs at least 10 points");
  std::vector<double> xs, ys;
  for (std::size_t i = series.size() / 2; i < series.size(); ++i) {
    const auto [x, v] = series[i];
    if (!(v > 0.0)) throw ValidationError(std::string(who) + ": values must be positive");
    xs.push_back(tx(x));
    ys.push_back(std::log(v));
  }
  return ls_slope(xs, ys);
}

}  // namespace

double fit_linear_rate(const Series& series) {
  return fit_tail(series, [](double x) { return x; }, "fit_linear_rate");
}

double fit_sublinear_rate(const Series& series) {
  for (const auto& [x, v] : series)
    if (!(x > 0.0)) throw ValidationError("fit_sublinear_rate: abscissae must be positive");
  return fit_tail(series, [](double x) { return std::log(x); }, "fit_sublinear_rate");
}

double fit_loglog_window(const Series& series, double x_lo, double x_hi) {
  std::vector<double> xs, ys;
  for (const auto& [x, v] : series) {
    if (x < x_lo || x > x_hi) continue;
    if (!(x > 0.0) || !(v > 0.0))
      throw ValidationError("fit_loglog_window: values must be positive");
    xs.push_back(std::log(x));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 2) throw ValidationError("fit_loglog_window: fewer than two points in window");
  return ls_slope(xs, ys);
}

}  // namespace tvsaddle
