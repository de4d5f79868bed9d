#include "kgreedy/dual_algebra.hpp"

#include "kgreedy/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

namespace kgreedy {
namespace {

constexpr double kPi = std::numbers::pi;

// Constants of the weighted Gaussian K_w(x, y) = exp(-b|x|^2 - a0|x - y|^2 - b|y|^2)
// after integrating along a line: a = a0 + b is the decay across the line, gamma the
// decay along it.
struct LineGaussian {
  double alpha;
  double a;
  double gamma;

  explicit LineGaussian(const Kernel& k)
      : alpha(k.alpha()),
        a(k.alpha() + k.weight()->beta()),
        gamma(k.weight()->beta() * (2.0 * k.alpha() + k.weight()->beta()) / (k.alpha() + k.weight()->beta())) {}

  // g(x) = int K_w(x, r n + s t) ds, with u = <x, n>, v = <x, t>.
  double representer(const RadonLine& line, const Point& x) const {
    const double c = std::cos(line.theta);
    const double s = std::sin(line.theta);
    const double u = x[0] * c + x[1] * s;
    const double v = -x[0] * s + x[1] * c;
    const double du = u - alpha * line.r / a;
    return std::sqrt(kPi / a) * std::exp(-a * du * du - gamma * (line.r * line.r + v * v));
  }

  // int int K_w(l1(s), l2(t)) ds dt.
  double pairing(const RadonLine& l1, const RadonLine& l2) const {
    const double delta = l1.theta - l2.theta;
    const double sd = std::sin(delta);
    const double cd = std::cos(delta);
    const double sh = std::sin(0.5 * delta);
    const double q = a * sd * sd + gamma * cd * cd;
    const double dr = l1.r - l2.r;
    const double rr = l1.r * l2.r;
    // r1^2 + r2^2 - 2 (alpha / a) r1 r2 cos(delta), arranged to stay accurate for
    // nearly identical lines.
    const double spread = dr * dr + 4.0 * rr * sh * sh + 2.0 * ((a - alpha) / a) * rr * cd;
    return kPi / std::sqrt(a * q) * std::exp(-gamma * a * spread / q);
  }
};

}  // namespace

PairingEngine::PairingEngine(Kernel kernel, PairingMode mode)
    : PairingEngine(kernel, mode, default_quadrature(kernel)) {}

PairingEngine::PairingEngine(Kernel kernel, PairingMode mode, QuadratureSpec quadrature)
    : kernel_(std::move(kernel)), mode_(mode), quadrature_(quadrature), cache_(std::make_unique<Cache>()) {
  quadrature_.validate();
}

PairingEngine::PairingEngine(const PairingEngine& other)
    : kernel_(other.kernel_),
      mode_(other.mode_),
      quadrature_(other.quadrature_),
      cache_enabled_(other.cache_enabled_),
      cache_(std::make_unique<Cache>()) {}

PairingEngine& PairingEngine::operator=(const PairingEngine& other) {
  if (this != &other) {
    kernel_ = other.kernel_;
    mode_ = other.mode_;
    quadrature_ = other.quadrature_;
    cache_enabled_ = other.cache_enabled_;
    cache_ = std::make_unique<Cache>();
  }
  return *this;
}

QuadratureSpec PairingEngine::default_quadrature(const Kernel& kernel) {
  QuadratureSpec spec;
  spec.abs_tolerance = 1e-11;
  // Along a line the integrand is bounded by the weight exp(-beta s^2).
  spec.truncation = kernel.weight() ? gaussian_truncation_radius(kernel.weight()->beta()) : 8.0;
  spec.max_subdivisions = 20000;
  spec.initial_intervals = 16;
  return spec;
}

bool PairingEngine::supports(const Functional& f) const noexcept {
  if (f.is_point()) return f.as_point().x.size() == kernel_.dimension();
  return kernel_.supports_radon();
}

void PairingEngine::require_supported(const Functional& f) const {
  if (supports(f)) return;
  if (f.is_point()) {
    throw InvalidArgument("point functional dimension does not match the kernel: " + f.describe());
  }
  throw UnsupportedPairing("Radon functionals are not bounded on the native space of the " +
                           to_string(kernel_.family()) + (kernel_.weight() ? " (weighted)" : " (unweighted)") +
                           " kernel; use a weighted Gaussian kernel in two dimensions");
}

double PairingEngine::representer(const Functional& f, const Point& x) const {
  require_supported(f);
  kernel_.check_dimension(x);
  return mode_ == PairingMode::Analytic ? analytic_representer(f, x) : quadrature_representer(f, x);
}

double PairingEngine::analytic_representer(const Functional& f, const Point& x) const {
  if (f.is_point()) return kernel_(x, f.as_point().x);
  return LineGaussian(kernel_).representer(f.as_radon(), x);
}

double PairingEngine::quadrature_representer(const Functional& f, const Point& x) const {
  if (f.is_point()) return kernel_(x, f.as_point().x);
  const RadonLine& line = f.as_radon();
  const double foot = -x[0] * std::sin(line.theta) + x[1] * std::cos(line.theta);
  const double breaks[] = {foot};
  return line_integral([&](double s) { return kernel_(x, line_point(line, s)); }, quadrature_, breaks).value;
}

double PairingEngine::pairing(const Functional& a, const Functional& b) const {
  if (!cache_enabled_) return pairing_uncached(a, b);
  const bool swap = b < a;
  PairKey key{swap ? b : a, swap ? a : b};
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  const double value = pairing_uncached(a, b);
  std::unique_lock lock(cache_->mutex);
  cache_->values.emplace(std::move(key), value);
  return value;
}

double PairingEngine::pairing_uncached(const Functional& a, const Functional& b) const {
  require_supported(a);
  require_supported(b);
  // Canonical order makes the result exactly symmetric.
  const bool swap = b < a;
  const Functional& lo = swap ? b : a;
  const Functional& hi = swap ? a : b;
  return mode_ == PairingMode::Analytic ? analytic_pairing(lo, hi) : quadrature_pairing(lo, hi);
}

// Kinds are ordered Point < Radon, so a mixed pair always arrives as (point, line).
double PairingEngine::analytic_pairing(const Functional& a, const Functional& b) const {
  if (a.is_point() && b.is_point()) return kernel_(a.as_point().x, b.as_point().x);
  if (a.is_point()) return analytic_representer(b, a.as_point().x);
  return LineGaussian(kernel_).pairing(a.as_radon(), b.as_radon());
}

double PairingEngine::quadrature_pairing(const Functional& a, const Functional& b) const {
  if (a.is_point() && b.is_point()) return kernel_(a.as_point().x, b.as_point().x);
  if (a.is_point()) return quadrature_representer(b, a.as_point().x);

  const RadonLine& l1 = a.as_radon();
  const RadonLine& l2 = b.as_radon();
  const double c2 = std::cos(l2.theta);
  const double s2 = std::sin(l2.theta);
  std::vector<double> outer_breaks{0.0};
  const double sd = std::sin(l1.theta - l2.theta);
  if (std::abs(sd) > 1e-12) {
    // Parameter of the intersection point on the first line.
    const double s_cross = (l1.r * std::cos(l1.theta - l2.theta) - l2.r) / sd;
    if (std::isfinite(s_cross)) outer_breaks.push_back(s_cross);
  }
  auto inner_breaks = [&](double s) {
    const Point p = line_point(l1, s);
    return std::vector<double>{-p[0] * s2 + p[1] * c2};
  };
  auto integrand = [&](double s, double t) { return kernel_(line_point(l1, s), line_point(l2, t)); };
  return double_line_integral(integrand, quadrature_, outer_breaks, inner_breaks).value;
}

double PairingEngine::dual_distance(const Functional& a, const Functional& b) const {
  if (a == b) return 0.0;
  const double d2 = pairing(a, a) - 2.0 * pairing(a, b) + pairing(b, b);
  return std::sqrt(std::max(0.0, d2));
}

std::size_t PairingEngine::cache_size() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->values.size();
}

void PairingEngine::clear_cache() {
  std::unique_lock lock(cache_->mutex);
  cache_->values.clear();
}

std::size_t PairingEngine::PairKeyHash::operator()(const PairKey& k) const noexcept {
  const std::size_t h = k.lo.hash();
  return h ^ (k.hi.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

GramMatrix gram(const PairingEngine& engine, std::span<const Functional> functionals) {
  const auto n = static_cast<Eigen::Index>(functionals.size());
  GramMatrix g{Eigen::MatrixXd(n, n), std::vector<Functional>(functionals.begin(), functionals.end())};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = engine.pairing(functionals[i], functionals[j]);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  return g;
}

bool GramMatrix::is_positive_definite() const {
  if (entries.rows() == 0) return true;
  Eigen::LLT<Eigen::MatrixXd> llt(entries);
  return llt.info() == Eigen::Success;
}

void GramMatrix::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << entries.rows() << '\n';
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) out << (j ? "," : "") << entries(i, j);
    out << '\n';
  }
  out.precision(old);
}

double condition_number(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw InvalidArgument("condition number needs a square matrix");
  if (symmetric.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return kInfiniteCondition;
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-14 * hi) return kInfiniteCondition;
  return hi / lo;
}

}  // namespace kgreedy
