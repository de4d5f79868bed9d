#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>

namespace kgreedy {

/// A point in R^d, d in {1, 2}. Fixed maximum size so it never allocates.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

Point make_point(double x);
Point make_point(double x, double y);

enum class KernelFamily {
  Gaussian,     ///< exp(-alpha |x-y|^2)
  Exponential,  ///< exp(-alpha |x-y|), the rough family
};

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

/// w(x) = exp(-beta |x|^2).
class GaussianWeight {
 public:
  explicit GaussianWeight(double beta);

  double beta() const noexcept { return beta_; }
  double operator()(const Point& x) const noexcept { return std::exp(-beta_ * x.squaredNorm()); }

 private:
  double beta_;
};

/// Symmetric positive definite kernel on R^d, optionally wrapped as
/// K_w(x, y) = w(x) K(x, y) w(y).
class Kernel {
 public:
  Kernel(KernelFamily family, double alpha, int dimension,
         std::optional<GaussianWeight> weight = std::nullopt);

  static Kernel gaussian(double alpha, int dimension = 2);
  static Kernel weighted_gaussian(double alpha, double weight_beta, int dimension = 2);
  static Kernel exponential(double alpha, int dimension = 2);

  KernelFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  int dimension() const noexcept { return dimension_; }
  const std::optional<GaussianWeight>& weight() const noexcept { return weight_; }

  /// K(x, y) including the weight. Throws InvalidArgument on dimension mismatch.
  double operator()(const Point& x, const Point& y) const;
  double evaluate(const Point& x, const Point& y) const { return (*this)(x, y); }

  /// The standard kernel without the weight factors.
  double unweighted(const Point& x, const Point& y) const;

  /// w(x), or 1 when unweighted.
  double weight_at(const Point& x) const;

  // Capability flags for closed-form dual pairings.
  bool has_closed_form_point_pairings() const noexcept { return true; }
  bool has_closed_form_radon_pairings() const noexcept {
    return family_ == KernelFamily::Gaussian && weight_.has_value() && dimension_ == 2;
  }
  /// Radon functionals are bounded on the native space only for the weighted Gaussian.
  bool supports_radon() const noexcept { return has_closed_form_radon_pairings(); }

  /// sup_x sqrt(K(x, x)).
  double sup_sqrt_diagonal() const noexcept { return 1.0; }

  void check_dimension(const Point& x) const;

 private:
  KernelFamily family_;
  double alpha_;
  int dimension_;
  std::optional<GaussianWeight> weight_;
};

}  // namespace kgreedy
