#pragma once

#include "kgreedy/functionals.hpp"
#include "kgreedy/kernels.hpp"
#include "kgreedy/quadrature.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <limits>
#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace kgreedy {

enum class PairingMode {
  Analytic,    ///< closed forms (weighted Gaussian) or direct kernel evaluation
  Quadrature,  ///< nested adaptive quadrature of the kernel along the lines
};

/// Computes Riesz representers g_lambda(x) = lambda^y K(x, y) and dual pairings
/// <lambda, mu> = lambda^x mu^y K(x, y).
///
/// Pairings are evaluated on the canonically ordered pair, so
/// pairing(a, b) == pairing(b, a) bit for bit. The optional cache is thread safe
/// (shared reads, exclusive inserts) and never changes results.
class PairingEngine {
 public:
  explicit PairingEngine(Kernel kernel, PairingMode mode = PairingMode::Analytic);
  PairingEngine(Kernel kernel, PairingMode mode, QuadratureSpec quadrature);

  PairingEngine(const PairingEngine& other);
  PairingEngine& operator=(const PairingEngine& other);
  PairingEngine(PairingEngine&&) noexcept = default;
  PairingEngine& operator=(PairingEngine&&) noexcept = default;
  ~PairingEngine() = default;

  const Kernel& kernel() const noexcept { return kernel_; }
  PairingMode mode() const noexcept { return mode_; }
  const QuadratureSpec& quadrature() const noexcept { return quadrature_; }

  bool supports(const Functional& f) const noexcept;
  void require_supported(const Functional& f) const;

  double representer(const Functional& f, const Point& x) const;
  double pairing(const Functional& a, const Functional& b) const;
  double pairing_uncached(const Functional& a, const Functional& b) const;
  double norm_squared(const Functional& f) const { return pairing(f, f); }
  double dual_distance(const Functional& a, const Functional& b) const;

  void set_cache_enabled(bool enabled) noexcept { cache_enabled_ = enabled; }
  bool cache_enabled() const noexcept { return cache_enabled_; }
  std::size_t cache_size() const;
  void clear_cache();

  /// Default quadrature settings for a kernel: eps 1e-11, truncation from the weight decay.
  static QuadratureSpec default_quadrature(const Kernel& kernel);

 private:
  struct PairKey {
    Functional lo;
    Functional hi;
    friend bool operator==(const PairKey&, const PairKey&) = default;
  };
  struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept;
  };
  struct Cache {
    mutable std::shared_mutex mutex;
    std::unordered_map<PairKey, double, PairKeyHash> values;
  };

  double analytic_pairing(const Functional& a, const Functional& b) const;
  double quadrature_pairing(const Functional& a, const Functional& b) const;
  double analytic_representer(const Functional& f, const Point& x) const;
  double quadrature_representer(const Functional& f, const Point& x) const;

  Kernel kernel_;
  PairingMode mode_;
  QuadratureSpec quadrature_;
  bool cache_enabled_ = true;
  std::unique_ptr<Cache> cache_;
};

/// G_ij = <lambda_i, lambda_j>.
struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<Functional> functionals;

  Eigen::Index size() const noexcept { return entries.rows(); }
  bool is_positive_definite() const;
  /// First line `n`, then n comma separated rows.
  void write_csv(std::ostream& out) const;
};

GramMatrix gram(const PairingEngine& engine, std::span<const Functional> functionals);

/// Spectral condition number of a symmetric matrix; +inf when the smallest
/// eigenvalue is at most 1e-14 times the largest.
double condition_number(const Eigen::MatrixXd& symmetric);
inline double condition_number(const GramMatrix& g) { return condition_number(g.entries); }

inline constexpr double kInfiniteCondition = std::numeric_limits<double>::infinity();

}  // namespace kgreedy
