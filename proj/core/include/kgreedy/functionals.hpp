#pragma once

#include "kgreedy/kernels.hpp"

#include <compare>
#include <cstddef>
#include <string>
#include <variant>

namespace kgreedy {

/// delta_x: f -> f(x).
struct PointEval {
  Point x;
};

/// Line integral over {r n(theta) + s t(theta) : s in R} with n = (cos, sin) and
/// t = (-sin, cos). theta is kept in [0, pi).
struct RadonLine {
  double r;
  double theta;
};

enum class FunctionalKind { Point, Radon };

/// A continuous linear functional on the native space. Value type.
class Functional {
 public:
  static Functional point(const Point& x);
  /// Normalizes theta into [0, pi); shifting by an odd multiple of pi flips the sign of r.
  static Functional radon(double r, double theta);

  FunctionalKind kind() const noexcept {
    return std::holds_alternative<PointEval>(value_) ? FunctionalKind::Point : FunctionalKind::Radon;
  }
  bool is_point() const noexcept { return kind() == FunctionalKind::Point; }
  bool is_radon() const noexcept { return kind() == FunctionalKind::Radon; }

  const PointEval& as_point() const;
  const RadonLine& as_radon() const;

  /// Strict total order used for canonical pair keys: kind first, then parameters.
  friend bool operator<(const Functional& a, const Functional& b) noexcept;
  friend bool operator==(const Functional& a, const Functional& b) noexcept;

  std::size_t hash() const noexcept;
  std::string describe() const;

 private:
  explicit Functional(std::variant<PointEval, RadonLine> v) : value_(std::move(v)) {}

  std::variant<PointEval, RadonLine> value_;
};

struct FunctionalHash {
  std::size_t operator()(const Functional& f) const noexcept { return f.hash(); }
};

/// Point on the integration line at arc parameter s.
Point line_point(const Functional& line, double s);
Point line_point(const RadonLine& line, double s);

/// Metric on the parameter space of the candidate functionals. For Radon lines:
/// sqrt(dr^2 + (angle_scale * dtheta)^2) with dtheta taken modulo pi. For point
/// evaluations: Euclidean distance of the points.
class ParameterMetric {
 public:
  explicit ParameterMetric(double angle_scale = 1.0);

  double angle_scale() const noexcept { return angle_scale_; }
  double operator()(const Functional& a, const Functional& b) const;

 private:
  double angle_scale_;
};

double parameter_distance(const ParameterMetric& metric, const Functional& a, const Functional& b);

}  // namespace kgreedy
