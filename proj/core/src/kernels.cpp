#include "kgreedy/kernels.hpp"

#include "kgreedy/errors.hpp"

#include <cmath>

namespace kgreedy {

Point make_point(double x) {
  Point p(1);
  p << x;
  return p;
}

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::Exponential:
      return "exponential";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "exponential") return KernelFamily::Exponential;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

GaussianWeight::GaussianWeight(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("weight shape parameter must be positive and finite");
  }
}

Kernel::Kernel(KernelFamily family, double alpha, int dimension, std::optional<GaussianWeight> weight)
    : family_(family), alpha_(alpha), dimension_(dimension), weight_(weight) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("kernel shape parameter must be positive and finite");
  }
  if (dimension != 1 && dimension != 2) {
    throw InvalidArgument("kernel dimension must be 1 or 2");
  }
}

Kernel Kernel::gaussian(double alpha, int dimension) {
  return Kernel(KernelFamily::Gaussian, alpha, dimension);
}

Kernel Kernel::weighted_gaussian(double alpha, double weight_beta, int dimension) {
  return Kernel(KernelFamily::Gaussian, alpha, dimension, GaussianWeight(weight_beta));
}

Kernel Kernel::exponential(double alpha, int dimension) {
  return Kernel(KernelFamily::Exponential, alpha, dimension);
}

void Kernel::check_dimension(const Point& x) const {
  if (x.size() != dimension_) {
    throw InvalidArgument("point dimension " + std::to_string(x.size()) + " does not match kernel dimension " +
                          std::to_string(dimension_));
  }
}

double Kernel::unweighted(const Point& x, const Point& y) const {
  check_dimension(x);
  check_dimension(y);
  const double d2 = (x - y).squaredNorm();
  switch (family_) {
    case KernelFamily::Gaussian:
      return std::exp(-alpha_ * d2);
    case KernelFamily::Exponential:
      return std::exp(-alpha_ * std::sqrt(d2));
  }
  return 0.0;
}

double Kernel::weight_at(const Point& x) const {
  return weight_ ? (*weight_)(x) : 1.0;
}

double Kernel::operator()(const Point& x, const Point& y) const {
  const double k = unweighted(x, y);
  if (!weight_) return k;
  return ((*weight_)(x) * (*weight_)(y)) * k;
}

}  // namespace kgreedy
