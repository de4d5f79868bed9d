#include "kgreedy/interpolator.hpp"

#include "kgreedy/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kgreedy {

CandidateSet::CandidateSet(std::vector<Functional> functionals, std::vector<double> samples)
    : functionals_(std::move(functionals)), samples_(std::move(samples)) {
  if (functionals_.empty()) throw InvalidArgument("candidate set must not be empty");
  if (functionals_.size() != samples_.size()) {
    throw InvalidArgument("candidate set needs one sample per functional");
  }
  for (double s : samples_) {
    if (!std::isfinite(s)) throw InvalidArgument("candidate samples must be finite");
  }
  std::vector<std::size_t> order(functionals_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return functionals_[i] < functionals_[j]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (functionals_[order[i - 1]] == functionals_[order[i]]) {
      throw InvalidArgument("duplicate functional in candidate set: " + functionals_[order[i]].describe());
    }
  }
}

double CandidateSet::max_abs_sample() const noexcept {
  double m = 0.0;
  for (double s : samples_) m = std::max(m, std::abs(s));
  return m;
}

CandidateSet CandidateSet::scaled(double factor) const {
  std::vector<double> s = samples_;
  for (double& v : s) v *= factor;
  return CandidateSet(functionals_, std::move(s));
}

NewtonModel::NewtonModel(const PairingEngine& engine, double breakdown_tolerance)
    : engine_(&engine), breakdown_tol_(breakdown_tolerance) {
  if (!(breakdown_tolerance >= 0.0)) throw InvalidArgument("breakdown tolerance must be nonnegative");
}

NewtonModel::NewtonModel(const PairingEngine& engine, const CandidateSet& candidates,
                         std::optional<double> breakdown_tolerance)
    : engine_(&engine), candidates_(&candidates), breakdown_tol_(0.0) {
  if (candidates.empty()) throw InvalidArgument("candidate set must not be empty");
  const std::size_t n = candidates.size();
  cand_diag_.resize(n);
  double max_diag = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    engine.require_supported(candidates.functional(k));
    cand_diag_[k] = engine.pairing(candidates.functional(k), candidates.functional(k));
    max_diag = std::max(max_diag, cand_diag_[k]);
  }
  cand_power_sq_ = cand_diag_;
  cand_residual_ = candidates.samples();
  last_pairings_.assign(n, 0.0);
  breakdown_tol_ = breakdown_tolerance.value_or(kRelativeBreakdown * std::sqrt(max_diag));
  if (!(breakdown_tol_ >= 0.0)) throw InvalidArgument("breakdown tolerance must be nonnegative");
  cand_basis_.resize(static_cast<Eigen::Index>(n), 0);
}

const CandidateSet& NewtonModel::candidates() const {
  if (!candidates_) throw InvalidArgument("model has no candidate set attached");
  return *candidates_;
}

void NewtonModel::ensure_capacity(std::size_t n) {
  if (n <= capacity_) return;
  const std::size_t cap = std::max({n, 2 * capacity_, std::size_t{16}});
  const auto c = static_cast<Eigen::Index>(cap);
  newton_.conservativeResize(c, c);
  coeffs_.conservativeResize(c);
  rep_coeffs_.conservativeResize(c);
  if (candidates_) cand_basis_.conservativeResize(cand_basis_.rows(), c);
  capacity_ = cap;
}

Eigen::VectorXd NewtonModel::basis_values(const Functional& lambda) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = engine_->pairing(lambda, selected_[i]);
  if (n == 0) return p;
  return newton_.topLeftCorner(n, n).triangularView<Eigen::Lower>() * p;
}

double NewtonModel::power_squared(const Functional& lambda) const {
  engine_->require_supported(lambda);
  const double diag = engine_->pairing(lambda, lambda);
  return std::max(0.0, diag - basis_values(lambda).squaredNorm());
}

double NewtonModel::power(const Functional& lambda) const {
  return std::sqrt(power_squared(lambda));
}

double NewtonModel::apply(const Functional& lambda) const {
  if (empty()) return 0.0;
  return basis_values(lambda).dot(newton_coefficients());
}

double NewtonModel::residual(const Functional& lambda, double sample) const {
  return sample - apply(lambda);
}

double NewtonModel::evaluate(const Point& x) const {
  engine_->kernel().check_dimension(x);
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    s += rep_coeffs_[static_cast<Eigen::Index>(i)] * engine_->representer(selected_[i], x);
  }
  return s;
}

Eigen::Map<const Eigen::VectorXd> NewtonModel::newton_coefficients() const {
  return {coeffs_.data(), static_cast<Eigen::Index>(size())};
}

Eigen::Map<const Eigen::VectorXd> NewtonModel::representer_coefficients() const {
  return {rep_coeffs_.data(), static_cast<Eigen::Index>(size())};
}

Eigen::MatrixXd NewtonModel::newton_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  return newton_.topLeftCorner(n, n).triangularView<Eigen::Lower>();
}

double NewtonModel::max_abs_candidate_residual() const noexcept {
  double m = 0.0;
  for (double r : cand_residual_) m = std::max(m, std::abs(r));
  return m;
}

void NewtonModel::extend(const Functional& lambda_new, double sample) {
  engine_->require_supported(lambda_new);
  if (!std::isfinite(sample)) throw InvalidArgument("sample must be finite");
  const Eigen::VectorXd b = basis_values(lambda_new);
  const double diag = engine_->pairing(lambda_new, lambda_new);
  const double power_sq = diag - b.squaredNorm();
  if (power_sq <= breakdown_tol_ * breakdown_tol_) {
    throw NearDependence("functional is numerically dependent on the selected set: " + lambda_new.describe(),
                         lambda_new.describe(), power_sq);
  }
  append(lambda_new, sample, b, power_sq, std::nullopt);
}

void NewtonModel::extend_candidate(std::size_t index) {
  const CandidateSet& cands = candidates();
  if (index >= cands.size()) throw InvalidArgument("candidate index out of range");
  const auto n = static_cast<Eigen::Index>(size());
  const double power_sq = cand_power_sq_[index];
  const Functional& lambda_new = cands.functional(index);
  if (power_sq <= breakdown_tol_ * breakdown_tol_) {
    throw NearDependence("candidate " + std::to_string(index) + " is numerically dependent on the selected set: " +
                             lambda_new.describe(),
                         lambda_new.describe(), power_sq);
  }
  const Eigen::VectorXd b = cand_basis_.row(static_cast<Eigen::Index>(index)).head(n).transpose();
  append(lambda_new, cands.sample(index), b, power_sq, index);
}

// Newton step: v_{n+1} = (g_new - sum_j lambda_new(v_j) v_j) / P(lambda_new).
void NewtonModel::append(const Functional& lambda_new, double sample, const Eigen::VectorXd& b,
                         double power_sq, std::optional<std::size_t> candidate_index) {
  const auto n = static_cast<Eigen::Index>(size());
  ensure_capacity(size() + 1);
  const double p = std::sqrt(power_sq);

  if (n > 0) {
    const Eigen::RowVectorXd row =
        b.transpose() * newton_.topLeftCorner(n, n).triangularView<Eigen::Lower>();
    newton_.row(n).head(n) = -row / p;
  }
  newton_(n, n) = 1.0 / p;

  const double applied = n > 0 ? b.dot(coeffs_.head(n)) : 0.0;
  const double c_new = (sample - applied) / p;
  coeffs_[n] = c_new;
  rep_coeffs_[n] = 0.0;
  rep_coeffs_.head(n + 1) += c_new * newton_.row(n).head(n + 1).transpose();
  norm_sq_ += c_new * c_new;

  selected_.push_back(lambda_new);
  selected_samples_.push_back(sample);
  if (candidate_index) selected_indices_.push_back(*candidate_index);

  if (!candidates_) return;

  const std::size_t count = candidates_->size();
  Eigen::VectorXd pairings(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    pairings[static_cast<Eigen::Index>(k)] =
        candidate_index && *candidate_index == k ? cand_diag_[k]
                                                 : engine_->pairing(candidates_->functional(k), lambda_new);
  }
  std::copy(pairings.data(), pairings.data() + count, last_pairings_.begin());

  auto column = cand_basis_.col(n);
  if (n > 0) {
    column.noalias() = pairings - cand_basis_.leftCols(n) * b;
    column /= p;
  } else {
    column = pairings / p;
  }

  for (std::size_t k = 0; k < count; ++k) {
    const double value = column[static_cast<Eigen::Index>(k)];
    double updated = cand_power_sq_[k] - value * value;
    if (updated < -1e-8 * cand_diag_[k]) {
      updated = normal_equations_power_squared(k);
      ++drift_recomputations_;
    }
    cand_power_sq_[k] = std::max(0.0, updated);
    cand_residual_[k] -= c_new * value;
  }
  if (candidate_index) cand_power_sq_[*candidate_index] = 0.0;
}

double NewtonModel::normal_equations_power_squared(std::size_t k) const {
  const GramMatrix g = gram(*engine_, selected_);
  const auto n = g.size();
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs[i] = engine_->pairing(candidates_->functional(k), selected_[i]);
  Eigen::LLT<Eigen::MatrixXd> llt(g.entries);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::VectorXd y = llt.matrixL().solve(rhs);
  return std::max(0.0, cand_diag_[k] - y.squaredNorm());
}

NewtonModel NewtonModel::from_snapshot(const PairingEngine& engine, std::vector<Functional> selected,
                                       std::vector<double> samples, const Eigen::MatrixXd& newton,
                                       const Eigen::VectorXd& coefficients, double breakdown_tolerance) {
  const auto n = static_cast<Eigen::Index>(selected.size());
  if (newton.rows() != n || newton.cols() != n || coefficients.size() != n ||
      static_cast<Eigen::Index>(samples.size()) != n) {
    throw InvalidArgument("inconsistent model snapshot dimensions");
  }
  NewtonModel model(engine, breakdown_tolerance);
  for (const Functional& f : selected) engine.require_supported(f);
  model.ensure_capacity(selected.size());
  model.newton_.topLeftCorner(n, n) = newton.triangularView<Eigen::Lower>();
  model.coeffs_.head(n) = coefficients;
  model.rep_coeffs_.head(n) = model.newton_.topLeftCorner(n, n).triangularView<Eigen::Lower>().transpose() *
                              coefficients;
  model.norm_sq_ = coefficients.squaredNorm();
  model.selected_ = std::move(selected);
  model.selected_samples_ = std::move(samples);
  return model;
}

Eigen::VectorXd direct_solve(const PairingEngine& engine, std::span<const Functional> functionals,
                             std::span<const double> samples) {
  if (functionals.size() != samples.size()) throw InvalidArgument("direct solve needs one sample per functional");
  const GramMatrix g = gram(engine, functionals);
  Eigen::LLT<Eigen::MatrixXd> llt(g.entries);
  if (llt.info() != Eigen::Success) {
    throw NearDependence("Gram matrix is not numerically positive definite", "", 0.0);
  }
  // An exactly singular Gram can still factor with pivots at rounding level.
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal().array().square();
  const double floor = std::numeric_limits<double>::epsilon() * g.entries.diagonal().maxCoeff();
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (pivots[i] <= floor) {
      throw NearDependence("Gram matrix is numerically singular", functionals[i].describe(), pivots[i]);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return llt.solve(rhs);
}

double evaluate_expansion(const PairingEngine& engine, std::span<const Functional> functionals,
                          const Eigen::VectorXd& coeffs, const Point& x) {
  if (static_cast<Eigen::Index>(functionals.size()) != coeffs.size()) {
    throw InvalidArgument("expansion needs one coefficient per functional");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < functionals.size(); ++i) {
    s += coeffs[static_cast<Eigen::Index>(i)] * engine.representer(functionals[i], x);
  }
  return s;
}

double fill_distance(const PairingEngine& engine, std::span<const Functional> selected,
                     const CandidateSet& candidates, DistanceSpace space, const ParameterMetric& metric) {
  if (selected.empty()) throw InvalidArgument("fill distance needs a nonempty selection");
  double fill = 0.0;
  for (const Functional& lambda : candidates.functionals()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Functional& mu : selected) {
      const double d = space == DistanceSpace::Dual ? engine.dual_distance(lambda, mu) : metric(lambda, mu);
      nearest = std::min(nearest, d);
    }
    fill = std::max(fill, nearest);
  }
  return fill;
}

}  // namespace kgreedy
