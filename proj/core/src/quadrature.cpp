#include "kgreedy/quadrature.hpp"

#include "kgreedy/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

namespace kgreedy {
namespace {

// Kronrod 15-point abscissae (positive half) and weights, with the embedded 7-point
// Gauss weights on the odd abscissae.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  friend bool operator<(const Segment& x, const Segment& y) { return x.error < y.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return Segment{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tolerance > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  if (!(truncation > 0.0)) throw InvalidArgument("quadrature truncation radius must be positive");
  if (max_subdivisions < 1) throw InvalidArgument("quadrature subdivision budget must be at least 1");
  if (initial_intervals < 1) throw InvalidArgument("quadrature needs at least one initial interval");
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec, std::span<const double> breakpoints) {
  spec.validate();
  if (!(b > a)) return {};

  std::vector<double> cuts{a};
  std::vector<double> inner;
  for (double p : breakpoints) {
    if (p > a && p < b) inner.push_back(p);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(b);

  std::priority_queue<Segment> heap;
  double value = 0.0;
  double error = 0.0;
  std::size_t segments = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double step = (cuts[c + 1] - cuts[c]) / static_cast<double>(spec.initial_intervals);
    for (std::size_t i = 0; i < spec.initial_intervals; ++i) {
      const double lo = cuts[c] + step * static_cast<double>(i);
      const double hi = i + 1 == spec.initial_intervals ? cuts[c + 1] : lo + step;
      Segment s = kronrod15(f, lo, hi);
      value += s.value;
      error += s.error;
      heap.push(s);
      ++segments;
    }
  }

  while (error > spec.abs_tolerance) {
    if (segments >= spec.max_subdivisions) {
      throw AccuracyError("adaptive quadrature exhausted " + std::to_string(spec.max_subdivisions) +
                              " subdivisions (error estimate " + std::to_string(error) + ")",
                          value, error);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw AccuracyError("adaptive quadrature reached machine resolution", value, error);
    }
    Segment left = kronrod15(f, worst.a, mid);
    Segment right = kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }

  // Re-sum to drop the accumulated rounding of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{value, error, segments * 15};
}

QuadratureResult line_integral(const std::function<double(double)>& f, const QuadratureSpec& spec,
                               std::span<const double> breakpoints) {
  return integrate(f, -spec.truncation, spec.truncation, spec, breakpoints);
}

QuadratureResult double_line_integral(const std::function<double(double, double)>& g,
                                      const QuadratureSpec& spec, std::span<const double> outer_breakpoints,
                                      const std::function<std::vector<double>(double)>& inner_breakpoints) {
  QuadratureSpec inner_spec = spec;
  inner_spec.abs_tolerance = spec.abs_tolerance / 10.0;
  double worst_inner_error = 0.0;
  std::size_t evaluations = 0;
  auto outer = [&](double s) {
    std::vector<double> breaks;
    if (inner_breakpoints) breaks = inner_breakpoints(s);
    const QuadratureResult r = line_integral([&](double t) { return g(s, t); }, inner_spec, breaks);
    worst_inner_error = std::max(worst_inner_error, r.error_estimate);
    evaluations += r.evaluations;
    return r.value;
  };
  QuadratureResult result = line_integral(outer, spec, outer_breakpoints);
  result.error_estimate += 2.0 * spec.truncation * worst_inner_error;
  result.evaluations = evaluations;
  return result;
}

double gaussian_truncation_radius(double slowest_rate) {
  if (!(slowest_rate > 0.0)) throw InvalidArgument("decay rate must be positive");
  return std::sqrt(37.0 / slowest_rate);
}

}  // namespace kgreedy
