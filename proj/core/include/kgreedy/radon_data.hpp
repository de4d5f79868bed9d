#pragma once

#include "kgreedy/interpolator.hpp"
#include "kgreedy/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace kgreedy {

struct Ellipse {
  Point center = make_point(0.0, 0.0);
  double semi_x = 1.0;    ///< semi-axis along the rotated x direction
  double semi_y = 1.0;
  double rotation = 0.0;  ///< radians, counter clockwise
  double intensity = 1.0;

  bool contains(const Point& x) const;
  /// Intensity times the chord length of the line {x : <x, n(theta)> = r}.
  double radon(double r, double theta) const;
};

/// Piecewise constant image: sum of the intensities of the ellipses containing x.
class EllipsePhantom {
 public:
  EllipsePhantom() = default;
  explicit EllipsePhantom(std::vector<Ellipse> ellipses);

  const std::vector<Ellipse>& ellipses() const noexcept { return ellipses_; }
  double operator()(const Point& x) const;
  double evaluate(const Point& x) const { return (*this)(x); }
  double radon(double r, double theta) const;

  /// Values at the G x G cell centers of [-1, 1]^2, row major with y decreasing.
  Eigen::MatrixXd rasterize(int grid) const;

 private:
  std::vector<Ellipse> ellipses_;
};

/// The 10-ellipse Shepp-Logan head phantom; `modified` selects the high contrast
/// intensities (1, -0.8, -0.2, ...) instead of (2, -0.98, -0.02, ...).
EllipsePhantom shepp_logan(bool modified = false);

/// Cell center coordinate i of a G-point grid on [-1, 1].
inline double grid_coordinate(int i, int grid) { return -1.0 + (2.0 * i + 1.0) / grid; }

struct SamplingOptions {
  bool positive_radii_only = false;
  double radius_bound = 1.4142135623730951;  ///< sqrt(2)
};

/// N uniform draws (r, theta) in [-sqrt 2, sqrt 2] x [0, pi), samples from the exact
/// Radon transform of the phantom. Deterministic per seed.
CandidateSet sample_functionals(const EllipsePhantom& phantom, std::size_t count, std::uint64_t seed,
                                const SamplingOptions& options = {});

/// Binary 8-bit PGM (P5); values mapped linearly from [lo, hi] and clamped.
void write_pgm(std::ostream& out, const Eigen::MatrixXd& image, double lo, double hi);

}  // namespace kgreedy
