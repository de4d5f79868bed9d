#pragma once

#include "kgreedy/dual_algebra.hpp"
#include "kgreedy/functionals.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace kgreedy {

/// Finite candidate set Gamma with the target samples lambda_i(f).
class CandidateSet {
 public:
  CandidateSet() = default;
  /// Validates N >= 1, finite samples, equal lengths and pairwise distinct functionals.
  CandidateSet(std::vector<Functional> functionals, std::vector<double> samples);

  std::size_t size() const noexcept { return functionals_.size(); }
  bool empty() const noexcept { return functionals_.empty(); }
  const std::vector<Functional>& functionals() const noexcept { return functionals_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const Functional& functional(std::size_t i) const { return functionals_.at(i); }
  double sample(std::size_t i) const { return samples_.at(i); }
  double max_abs_sample() const noexcept;

  /// Same functionals, samples multiplied by factor.
  CandidateSet scaled(double factor) const;

 private:
  std::vector<Functional> functionals_;
  std::vector<double> samples_;
};

/// Incremental generalized interpolant in the orthonormal Newton basis.
///
/// The basis v_1..v_n of span{g_1..g_n} satisfies <v_i, v_j> = delta_ij and is stored
/// through a lower triangular matrix: v_j = sum_{i<=j} newton(j, i) g_i. The interpolant
/// is s_n = sum_j c_j v_j. When a candidate set is attached, the model keeps for every
/// candidate lambda_k the values lambda_k(v_j), the squared power P^2 and the residual,
/// updated in O(N n) per extension.
class NewtonModel {
 public:
  /// Model without candidate cache. breakdown_tolerance is tau_P (not squared).
  NewtonModel(const PairingEngine& engine, double breakdown_tolerance);
  /// Model with a candidate cache over Gamma. Without an explicit tolerance,
  /// tau_P = 1e-7 sqrt(max_k <lambda_k, lambda_k>).
  NewtonModel(const PairingEngine& engine, const CandidateSet& candidates,
              std::optional<double> breakdown_tolerance = std::nullopt);

  static constexpr double kRelativeBreakdown = 1e-7;

  const PairingEngine& engine() const noexcept { return *engine_; }
  std::size_t size() const noexcept { return selected_.size(); }
  bool empty() const noexcept { return selected_.empty(); }
  double breakdown_tolerance() const noexcept { return breakdown_tol_; }

  const std::vector<Functional>& selected() const noexcept { return selected_; }
  const std::vector<double>& selected_samples() const noexcept { return selected_samples_; }
  /// Candidate indices in selection order (only for extend_candidate).
  const std::vector<std::size_t>& selected_indices() const noexcept { return selected_indices_; }

  /// Appends lambda_new with sample. Throws NearDependence when P^2(lambda_new) <= tau_P^2.
  void extend(const Functional& lambda_new, double sample);
  /// Appends candidate `index` of the attached set, reusing its cached basis values.
  void extend_candidate(std::size_t index);

  double power_squared(const Functional& lambda) const;
  double power(const Functional& lambda) const;
  double residual(const Functional& lambda, double sample) const;
  /// lambda(s_n).
  double apply(const Functional& lambda) const;
  /// (lambda(v_1), ..., lambda(v_n)).
  Eigen::VectorXd basis_values(const Functional& lambda) const;

  /// s_n(x).
  double evaluate(const Point& x) const;

  /// c_1..c_n.
  Eigen::Map<const Eigen::VectorXd> newton_coefficients() const;
  /// Lower triangular n x n matrix with v_j = sum_i newton_matrix(j, i) g_i.
  Eigen::MatrixXd newton_matrix() const;
  /// Weights b with s_n = sum_i b_i g_i.
  Eigen::Map<const Eigen::VectorXd> representer_coefficients() const;
  /// ||s_n||^2 = sum c_j^2.
  double norm_squared() const noexcept { return norm_sq_; }

  // Candidate cache. All of these require an attached candidate set.
  bool has_candidates() const noexcept { return candidates_ != nullptr; }
  const CandidateSet& candidates() const;
  double candidate_power_squared(std::size_t k) const { return cand_power_sq_.at(k); }
  double candidate_power(std::size_t k) const { return std::sqrt(cand_power_sq_.at(k)); }
  double candidate_residual(std::size_t k) const { return cand_residual_.at(k); }
  double candidate_norm_squared(std::size_t k) const { return cand_diag_.at(k); }
  std::span<const double> candidate_powers_squared() const noexcept { return cand_power_sq_; }
  std::span<const double> candidate_residuals() const noexcept { return cand_residual_; }
  /// <lambda_k, lambda_last> for every candidate k, from the most recent extension.
  std::span<const double> last_pairings() const noexcept { return last_pairings_; }
  double max_abs_candidate_residual() const noexcept;
  /// Number of cached powers recomputed from the normal equations after drift.
  std::size_t drift_recomputations() const noexcept { return drift_recomputations_; }

  /// Rebuilds a model from stored Newton data (used for snapshot replay).
  static NewtonModel from_snapshot(const PairingEngine& engine, std::vector<Functional> selected,
                                   std::vector<double> samples, const Eigen::MatrixXd& newton,
                                   const Eigen::VectorXd& coefficients, double breakdown_tolerance);

 private:
  void append(const Functional& lambda_new, double sample, const Eigen::VectorXd& new_basis_values,
              double power_sq, std::optional<std::size_t> candidate_index);
  void ensure_capacity(std::size_t n);
  double normal_equations_power_squared(std::size_t k) const;

  const PairingEngine* engine_;
  const CandidateSet* candidates_ = nullptr;
  double breakdown_tol_;

  std::vector<Functional> selected_;
  std::vector<double> selected_samples_;
  std::vector<std::size_t> selected_indices_;

  std::size_t capacity_ = 0;
  Eigen::MatrixXd newton_;          // capacity x capacity, lower triangle of the leading n x n block
  Eigen::VectorXd coeffs_;          // capacity
  Eigen::VectorXd rep_coeffs_;      // capacity
  double norm_sq_ = 0.0;

  Eigen::MatrixXd cand_basis_;      // N x capacity, column j holds lambda_k(v_j)
  std::vector<double> cand_diag_;
  std::vector<double> cand_power_sq_;
  std::vector<double> cand_residual_;
  std::vector<double> last_pairings_;
  std::size_t drift_recomputations_ = 0;
};

/// Solves G b = samples by Cholesky. Throws NearDependence if G is not numerically SPD.
Eigen::VectorXd direct_solve(const PairingEngine& engine, std::span<const Functional> functionals,
                             std::span<const double> samples);

/// sum_i coeffs_i g_i(x).
double evaluate_expansion(const PairingEngine& engine, std::span<const Functional> functionals,
                          const Eigen::VectorXd& coeffs, const Point& x);

enum class DistanceSpace { Dual, Parameter };

/// max over Gamma of the min distance to Lambda.
double fill_distance(const PairingEngine& engine, std::span<const Functional> selected,
                     const CandidateSet& candidates, DistanceSpace space,
                     const ParameterMetric& metric = ParameterMetric{});

}  // namespace kgreedy
