#include "kgreedy/functionals.hpp"

#include "kgreedy/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

namespace kgreedy {
namespace {

std::size_t mix(std::size_t seed, double v) noexcept {
  // +0.0 and -0.0 compare equal, so they must hash equal.
  const std::uint64_t bits = v == 0.0 ? 0 : std::bit_cast<std::uint64_t>(v);
  return seed ^ (std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Functional Functional::point(const Point& x) {
  if (x.size() < 1 || x.size() > 2) throw InvalidArgument("point functional needs dimension 1 or 2");
  if (!x.allFinite()) throw InvalidArgument("point functional needs finite coordinates");
  return Functional(PointEval{x});
}

Functional Functional::radon(double r, double theta) {
  if (!std::isfinite(r) || !std::isfinite(theta)) {
    throw InvalidArgument("radon functional needs finite parameters");
  }
  constexpr double pi = std::numbers::pi;
  const double turns = std::floor(theta / pi);
  double t = theta - turns * pi;
  if (t >= pi) t -= pi;
  if (t < 0.0) t = 0.0;
  const bool odd = std::fmod(std::abs(turns), 2.0) == 1.0;
  return Functional(RadonLine{odd ? -r : r, t});
}

const PointEval& Functional::as_point() const {
  if (const auto* p = std::get_if<PointEval>(&value_)) return *p;
  throw InvalidArgument("functional is not a point evaluation");
}

const RadonLine& Functional::as_radon() const {
  if (const auto* p = std::get_if<RadonLine>(&value_)) return *p;
  throw InvalidArgument("functional is not a Radon line");
}

bool operator<(const Functional& a, const Functional& b) noexcept {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  if (a.is_radon()) {
    const auto& la = std::get<RadonLine>(a.value_);
    const auto& lb = std::get<RadonLine>(b.value_);
    if (la.r != lb.r) return la.r < lb.r;
    return la.theta < lb.theta;
  }
  const auto& pa = std::get<PointEval>(a.value_).x;
  const auto& pb = std::get<PointEval>(b.value_).x;
  if (pa.size() != pb.size()) return pa.size() < pb.size();
  for (Eigen::Index i = 0; i < pa.size(); ++i) {
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  }
  return false;
}

bool operator==(const Functional& a, const Functional& b) noexcept {
  if (a.kind() != b.kind()) return false;
  if (a.is_radon()) {
    const auto& la = std::get<RadonLine>(a.value_);
    const auto& lb = std::get<RadonLine>(b.value_);
    return la.r == lb.r && la.theta == lb.theta;
  }
  const auto& pa = std::get<PointEval>(a.value_).x;
  const auto& pb = std::get<PointEval>(b.value_).x;
  return pa.size() == pb.size() && pa == pb;
}

std::size_t Functional::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(kind());
  if (const auto* l = std::get_if<RadonLine>(&value_)) {
    h = mix(h, l->r);
    return mix(h, l->theta);
  }
  const auto& x = std::get<PointEval>(value_).x;
  for (Eigen::Index i = 0; i < x.size(); ++i) h = mix(h, x[i]);
  return h;
}

std::string Functional::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* l = std::get_if<RadonLine>(&value_)) {
    os << "radon(r=" << l->r << ", theta=" << l->theta << ")";
  } else {
    const auto& x = std::get<PointEval>(value_).x;
    os << "point(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
  }
  return os.str();
}

Point line_point(const RadonLine& line, double s) {
  const double c = std::cos(line.theta);
  const double sn = std::sin(line.theta);
  return make_point(line.r * c - s * sn, line.r * sn + s * c);
}

Point line_point(const Functional& line, double s) {
  return line_point(line.as_radon(), s);
}

ParameterMetric::ParameterMetric(double angle_scale) : angle_scale_(angle_scale) {
  if (!(angle_scale >= 0.0) || !std::isfinite(angle_scale)) {
    throw InvalidArgument("angle scale must be finite and nonnegative");
  }
}

double ParameterMetric::operator()(const Functional& a, const Functional& b) const {
  if (a.kind() != b.kind()) throw InvalidArgument("parameter distance between different functional kinds");
  if (a.is_point()) {
    const auto& x = a.as_point().x;
    const auto& y = b.as_point().x;
    if (x.size() != y.size()) throw InvalidArgument("parameter distance between points of different dimension");
    return (x - y).norm();
  }
  const auto& la = a.as_radon();
  const auto& lb = b.as_radon();
  const double dr = la.r - lb.r;
  double dtheta = std::abs(la.theta - lb.theta);
  dtheta = std::min(dtheta, std::numbers::pi - dtheta);
  return std::hypot(dr, angle_scale_ * dtheta);
}

double parameter_distance(const ParameterMetric& metric, const Functional& a, const Functional& b) {
  return metric(a, b);
}

}  // namespace kgreedy
