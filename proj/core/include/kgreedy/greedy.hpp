#pragma once

#include "kgreedy/functionals.hpp"
#include "kgreedy/interpolator.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace kgreedy {

inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

/// eta(lambda) = |residual|^beta * P^(1 - beta), with 0^0 := 1 and beta = inf giving
/// |residual| / P. Callers must exclude candidates with P <= tau_P beforehand.
double beta_indicator(double beta, double residual_abs, double power);

struct SelectionRule {
  enum class Kind { Beta, Geometric, Random };

  Kind kind = Kind::Beta;
  double beta = 0.0;
  DistanceSpace space = DistanceSpace::Dual;
  ParameterMetric metric{};
  std::uint64_t seed = 0;
  /// Accept any candidate within weak_gamma of the best indicator (lowest index wins).
  double weak_gamma = 1.0;

  static SelectionRule beta_greedy(double beta);
  static SelectionRule p_greedy() { return beta_greedy(0.0); }
  static SelectionRule f_greedy() { return beta_greedy(1.0); }
  static SelectionRule psr_greedy() { return beta_greedy(0.5); }
  static SelectionRule fp_greedy() { return beta_greedy(kBetaInfinity); }
  static SelectionRule geometric(DistanceSpace space = DistanceSpace::Dual,
                                 ParameterMetric metric = ParameterMetric{});
  static SelectionRule random(std::uint64_t seed);

  /// p, f, psr, fp, h, h:param, beta:<value>|beta:inf, random[:seed].
  /// The default_seed is used for `random` without an explicit seed.
  static SelectionRule parse(const std::string& name, std::uint64_t default_seed = 0);

  void validate() const;
  std::string name() const;
};

/// Mutable bookkeeping for one greedy run: which candidates are selected or
/// permanently excluded, running min distances to the selection and the RNG.
class SelectionState {
 public:
  SelectionState(const CandidateSet& candidates, const SelectionRule& rule);

  bool selected(std::size_t k) const { return selected_.at(k); }
  bool excluded(std::size_t k) const { return excluded_.at(k); }
  bool available(std::size_t k) const { return !selected_[k] && !excluded_[k]; }
  std::size_t size() const noexcept { return selected_.size(); }

  void mark_selected(std::size_t k);
  void exclude(std::size_t k);

  /// Updates min dual distances with the last extension of the model (O(N)).
  void update_dual_distances(const NewtonModel& model);
  /// Updates min parameter distances with the newly selected candidate (O(N)).
  void update_parameter_distances(const CandidateSet& candidates, std::size_t newly_selected);

  bool tracks_parameter_distances() const noexcept { return tracks_param_; }
  double min_dual_distance(std::size_t k) const { return min_dual_.at(k); }
  double min_parameter_distance(std::size_t k) const { return min_param_.at(k); }
  /// Fill distances over Gamma (selected candidates contribute 0).
  double dual_fill_distance() const;
  double parameter_fill_distance() const;

  std::mt19937_64& rng() noexcept { return rng_; }

 private:
  std::vector<char> selected_;
  std::vector<char> excluded_;
  std::vector<double> min_dual_;
  std::vector<double> min_param_;
  bool tracks_param_ = false;
  ParameterMetric metric_;
  std::mt19937_64 rng_;
};

struct Selection {
  std::size_t index;
  double indicator;
};

/// Picks the next candidate, or nullopt when no admissible candidate is left.
std::optional<Selection> select_next(const SelectionRule& rule, const NewtonModel& model,
                                     SelectionState& state);

struct StopCriteria {
  /// tau_P; default is the model's relative rule.
  std::optional<double> breakdown_tolerance;
  /// Stop once max |residual| over Gamma is at most this (0 disables).
  double residual_tolerance = 0.0;
  /// Stop once the dual fill distance is at most this (0 disables).
  double fill_tolerance = 0.0;
};

struct TraceRecord {
  std::size_t iteration = 0;
  std::size_t index = 0;
  double indicator = 0.0;
  double power = 0.0;
  double residual = 0.0;
  double fill_dual = 0.0;
  double fill_param = std::numeric_limits<double>::quiet_NaN();
  double norm_squared = 0.0;
  double max_residual = 0.0;
  double milliseconds = 0.0;
};

struct GreedyTrace {
  std::vector<TraceRecord> records;
  /// Candidates dropped after a near-dependence failure, in order of occurrence.
  std::vector<std::size_t> excluded;
  std::string stop_reason;

  std::size_t size() const noexcept { return records.size(); }
  /// iter,index,indicator,power,residual,fill_dual,fill_param,norm_sq,ms
  void write_csv(std::ostream& out) const;
  std::vector<std::size_t> selected_indices() const;
};

struct GreedyOptions {
  /// Record wall time per iteration. Off by default so traces are reproducible bit for bit.
  bool record_timings = false;
};

struct GreedyResult {
  NewtonModel model;
  GreedyTrace trace;
};

/// Runs select_next + extend for at most max_iterations steps. The engine and the
/// candidate set must outlive the returned model.
GreedyResult run_greedy(const SelectionRule& rule, const PairingEngine& engine,
                        const CandidateSet& candidates, std::size_t max_iterations,
                        const StopCriteria& stop = {}, const GreedyOptions& options = {});

}  // namespace kgreedy
