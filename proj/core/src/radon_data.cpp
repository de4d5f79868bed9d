#include "kgreedy/radon_data.hpp"

#include "kgreedy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace kgreedy {

bool Ellipse::contains(const Point& x) const {
  const double dx = x[0] - center[0];
  const double dy = x[1] - center[1];
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double u = (c * dx + s * dy) / semi_x;
  const double v = (-s * dx + c * dy) / semi_y;
  return u * u + v * v <= 1.0;
}

// Shift the line to the ellipse center, rotate into its frame; the chord of the
// axis-aligned ellipse at distance p along normal angle phi is
// 2 a b sqrt(w^2 - p^2) / w^2 with w^2 = a^2 cos^2 phi + b^2 sin^2 phi.
double Ellipse::radon(double r, double theta) const {
  const double p = r - (center[0] * std::cos(theta) + center[1] * std::sin(theta));
  const double phi = theta - rotation;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double w2 = semi_x * semi_x * c * c + semi_y * semi_y * s * s;
  const double gap = w2 - p * p;
  if (gap <= 0.0) return 0.0;
  return intensity * 2.0 * semi_x * semi_y * std::sqrt(gap) / w2;
}

EllipsePhantom::EllipsePhantom(std::vector<Ellipse> ellipses) : ellipses_(std::move(ellipses)) {
  for (const Ellipse& e : ellipses_) {
    if (!(e.semi_x > 0.0 && e.semi_y > 0.0)) throw InvalidArgument("ellipse semi-axes must be positive");
    if (e.center.size() != 2) throw InvalidArgument("ellipse center must be two dimensional");
  }
}

double EllipsePhantom::operator()(const Point& x) const {
  if (x.size() != 2) throw InvalidArgument("phantom is evaluated on two dimensional points");
  double v = 0.0;
  for (const Ellipse& e : ellipses_) {
    if (e.contains(x)) v += e.intensity;
  }
  return v;
}

double EllipsePhantom::radon(double r, double theta) const {
  double v = 0.0;
  for (const Ellipse& e : ellipses_) v += e.radon(r, theta);
  return v;
}

Eigen::MatrixXd EllipsePhantom::rasterize(int grid) const {
  if (grid < 1) throw InvalidArgument("grid size must be positive");
  Eigen::MatrixXd img(grid, grid);
  for (int row = 0; row < grid; ++row) {
    const double y = grid_coordinate(grid - 1 - row, grid);
    for (int col = 0; col < grid; ++col) img(row, col) = (*this)(make_point(grid_coordinate(col, grid), y));
  }
  return img;
}

EllipsePhantom shepp_logan(bool modified) {
  // Shepp & Logan (1974), in the parameterization used by MATLAB's phantom():
  // intensity, semi-axis x, semi-axis y, center x, center y, rotation (degrees).
  struct Row {
    double original;
    double modified;
    double a, b, x0, y0, phi;
  };
  static constexpr Row kTable[] = {
      {2.00, 1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
      {-0.98, -0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
      {-0.02, -0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
      {-0.02, -0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
      {0.01, 0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
      {0.01, 0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
      {0.01, 0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
      {0.01, 0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
      {0.01, 0.1, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
      {0.01, 0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
  };
  std::vector<Ellipse> ellipses;
  for (const Row& row : kTable) {
    ellipses.push_back(Ellipse{make_point(row.x0, row.y0), row.a, row.b, row.phi * std::numbers::pi / 180.0,
                               modified ? row.modified : row.original});
  }
  return EllipsePhantom(std::move(ellipses));
}

CandidateSet sample_functionals(const EllipsePhantom& phantom, std::size_t count, std::uint64_t seed,
                                const SamplingOptions& options) {
  if (count < 1) throw InvalidArgument("need at least one sample");
  if (!(options.radius_bound > 0.0)) throw InvalidArgument("radius bound must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(options.positive_radii_only ? 0.0 : -options.radius_bound,
                                                options.radius_bound);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::vector<Functional> functionals;
  std::vector<double> samples;
  functionals.reserve(count);
  samples.reserve(count);
  while (functionals.size() < count) {
    const double r = radius(rng);
    const double theta = angle(rng);
    if (options.positive_radii_only && r == 0.0) continue;
    functionals.push_back(Functional::radon(r, theta));
    samples.push_back(phantom.radon(r, theta));
  }
  return CandidateSet(std::move(functionals), std::move(samples));
}

void write_pgm(std::ostream& out, const Eigen::MatrixXd& image, double lo, double hi) {
  if (!(hi > lo)) hi = lo + 1.0;
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < image.rows(); ++i) {
    for (Eigen::Index j = 0; j < image.cols(); ++j) {
      const double t = std::clamp((image(i, j) - lo) / (hi - lo), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
  }
}

}  // namespace kgreedy
