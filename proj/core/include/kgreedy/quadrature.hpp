#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kgreedy {

struct QuadratureSpec {
  double abs_tolerance = 1e-11;
  /// Integrals over R are truncated to [-truncation, truncation].
  double truncation = 8.0;
  std::size_t max_subdivisions = 20000;
  /// Uniform pieces per breakpoint-delimited segment before adaptive refinement.
  std::size_t initial_intervals = 16;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b], split additionally at the
/// interior breakpoints. Throws AccuracyError when the subdivision budget is exhausted
/// before the summed error estimate reaches spec.abs_tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec, std::span<const double> breakpoints = {});

/// integrate over [-spec.truncation, spec.truncation].
QuadratureResult line_integral(const std::function<double(double)>& f, const QuadratureSpec& spec,
                               std::span<const double> breakpoints = {});

/// Nested line_integral; the inner integral runs at tolerance abs_tolerance / 10.
/// inner_breakpoints(s) may supply breakpoints for the inner integral at outer parameter s.
QuadratureResult double_line_integral(
    const std::function<double(double, double)>& g, const QuadratureSpec& spec,
    std::span<const double> outer_breakpoints = {},
    const std::function<std::vector<double>(double)>& inner_breakpoints = {});

/// Truncation radius making the tail of exp(-rate s^2) negligible (below 1e-16).
double gaussian_truncation_radius(double slowest_rate);

}  // namespace kgreedy
