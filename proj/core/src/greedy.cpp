#include "kgreedy/greedy.hpp"

#include "kgreedy/errors.hpp"
#include "kgreedy/io.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace kgreedy {

double beta_indicator(double beta, double residual_abs, double power) {
  if (std::isinf(beta)) return residual_abs / power;
  if (beta == 0.0) return power;
  if (beta == 1.0) return residual_abs;
  if (beta < 1.0) return std::pow(residual_abs, beta) * std::pow(power, 1.0 - beta);
  return std::pow(residual_abs, beta) / std::pow(power, beta - 1.0);
}

SelectionRule SelectionRule::beta_greedy(double beta) {
  SelectionRule rule;
  rule.kind = Kind::Beta;
  rule.beta = beta;
  rule.validate();
  return rule;
}

SelectionRule SelectionRule::geometric(DistanceSpace space, ParameterMetric metric) {
  SelectionRule rule;
  rule.kind = Kind::Geometric;
  rule.space = space;
  rule.metric = metric;
  return rule;
}

SelectionRule SelectionRule::random(std::uint64_t seed) {
  SelectionRule rule;
  rule.kind = Kind::Random;
  rule.seed = seed;
  return rule;
}

SelectionRule SelectionRule::parse(const std::string& name, std::uint64_t default_seed) {
  if (name == "p") return p_greedy();
  if (name == "f") return f_greedy();
  if (name == "psr") return psr_greedy();
  if (name == "fp") return fp_greedy();
  if (name == "h") return geometric(DistanceSpace::Dual);
  if (name == "h:param") return geometric(DistanceSpace::Parameter);
  if (name == "random") return random(default_seed);
  if (name.rfind("random:", 0) == 0) {
    try {
      return random(std::stoull(name.substr(7)));
    } catch (const std::exception&) {
      throw InvalidArgument("bad random seed in method '" + name + "'");
    }
  }
  if (name.rfind("beta:", 0) == 0) {
    const std::string value = name.substr(5);
    if (value == "inf") return fp_greedy();
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw InvalidArgument("bad beta in method '" + name + "'");
    return beta_greedy(beta);
  }
  throw InvalidArgument("unknown selection method '" + name + "'");
}

void SelectionRule::validate() const {
  if (kind == Kind::Beta && !(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative or inf");
  if (!(weak_gamma > 0.0 && weak_gamma <= 1.0)) throw InvalidArgument("weak_gamma must lie in (0, 1]");
}

std::string SelectionRule::name() const {
  switch (kind) {
    case Kind::Beta:
      if (std::isinf(beta)) return "beta:inf";
      return "beta:" + format_double(beta);
    case Kind::Geometric:
      return space == DistanceSpace::Dual ? "h" : "h:param";
    case Kind::Random:
      return "random:" + std::to_string(seed);
  }
  return "unknown";
}

SelectionState::SelectionState(const CandidateSet& candidates, const SelectionRule& rule)
    : selected_(candidates.size(), 0),
      excluded_(candidates.size(), 0),
      min_dual_(candidates.size(), std::numeric_limits<double>::infinity()),
      metric_(rule.metric),
      rng_(rule.seed) {
  const auto& fs = candidates.functionals();
  tracks_param_ = !fs.empty();
  for (const Functional& f : fs) {
    if (f.kind() != fs.front().kind()) tracks_param_ = false;
  }
  if (tracks_param_) min_param_.assign(candidates.size(), std::numeric_limits<double>::infinity());
}

void SelectionState::mark_selected(std::size_t k) {
  selected_.at(k) = 1;
  min_dual_[k] = 0.0;
  if (tracks_param_) min_param_[k] = 0.0;
}

void SelectionState::exclude(std::size_t k) { excluded_.at(k) = 1; }

void SelectionState::update_dual_distances(const NewtonModel& model) {
  const auto pairings = model.last_pairings();
  const std::size_t last = model.selected_indices().back();
  const double last_diag = model.candidate_norm_squared(last);
  for (std::size_t k = 0; k < selected_.size(); ++k) {
    if (selected_[k]) continue;
    const double d2 = model.candidate_norm_squared(k) - 2.0 * pairings[k] + last_diag;
    const double d = std::sqrt(std::max(0.0, d2));
    if (d < min_dual_[k]) min_dual_[k] = d;
  }
}

void SelectionState::update_parameter_distances(const CandidateSet& candidates, std::size_t newly_selected) {
  if (!tracks_param_) return;
  const Functional& chosen = candidates.functional(newly_selected);
  for (std::size_t k = 0; k < selected_.size(); ++k) {
    if (selected_[k]) continue;
    const double d = metric_(candidates.functional(k), chosen);
    if (d < min_param_[k]) min_param_[k] = d;
  }
}

double SelectionState::dual_fill_distance() const {
  double fill = 0.0;
  for (double d : min_dual_) fill = std::max(fill, d);
  return fill;
}

double SelectionState::parameter_fill_distance() const {
  if (!tracks_param_) return std::numeric_limits<double>::quiet_NaN();
  double fill = 0.0;
  for (double d : min_param_) fill = std::max(fill, d);
  return fill;
}

namespace {

// Lowest index among the maximizers (or among indices within weak_gamma of the maximum).
template <typename Score>
std::optional<Selection> argmax(std::size_t count, double weak_gamma, Score&& score) {
  double best = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_index;
  std::vector<double> values(count, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < count; ++k) {
    const std::optional<double> v = score(k);
    if (!v) continue;
    values[k] = *v;
    if (!best_index || *v > best) {
      best = *v;
      best_index = k;
    }
  }
  if (!best_index) return std::nullopt;
  if (weak_gamma < 1.0) {
    for (std::size_t k = 0; k < *best_index; ++k) {
      if (!std::isnan(values[k]) && values[k] >= weak_gamma * best) return Selection{k, values[k]};
    }
  }
  return Selection{*best_index, best};
}

}  // namespace

std::optional<Selection> select_next(const SelectionRule& rule, const NewtonModel& model, SelectionState& state) {
  if (!model.has_candidates()) throw InvalidArgument("selection needs a model with a candidate set");
  const std::size_t count = model.candidates().size();
  switch (rule.kind) {
    case SelectionRule::Kind::Beta: {
      const double tau_sq = model.breakdown_tolerance() * model.breakdown_tolerance();
      return argmax(count, rule.weak_gamma, [&](std::size_t k) -> std::optional<double> {
        if (!state.available(k)) return std::nullopt;
        const double p_sq = model.candidate_power_squared(k);
        if (p_sq <= tau_sq) return std::nullopt;
        return beta_indicator(rule.beta, std::abs(model.candidate_residual(k)), std::sqrt(p_sq));
      });
    }
    case SelectionRule::Kind::Geometric: {
      if (rule.space == DistanceSpace::Parameter && !state.tracks_parameter_distances()) {
        throw InvalidArgument("parameter-space selection needs candidates of a single kind");
      }
      return argmax(count, rule.weak_gamma, [&](std::size_t k) -> std::optional<double> {
        if (!state.available(k)) return std::nullopt;
        return rule.space == DistanceSpace::Dual ? state.min_dual_distance(k) : state.min_parameter_distance(k);
      });
    }
    case SelectionRule::Kind::Random: {
      std::vector<std::size_t> open;
      for (std::size_t k = 0; k < count; ++k) {
        if (state.available(k)) open.push_back(k);
      }
      if (open.empty()) return std::nullopt;
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      return Selection{open[pick(state.rng())], 0.0};
    }
  }
  return std::nullopt;
}

void GreedyTrace::write_csv(std::ostream& out) const {
  out << "iter,index,indicator,power,residual,fill_dual,fill_param,norm_sq,ms\n";
  for (const TraceRecord& r : records) {
    out << r.iteration << ',' << r.index << ',' << format_double(r.indicator) << ',' << format_double(r.power)
        << ',' << format_double(r.residual) << ',' << format_double(r.fill_dual) << ','
        << (std::isnan(r.fill_param) ? std::string() : format_double(r.fill_param)) << ','
        << format_double(r.norm_squared) << ',' << format_double(r.milliseconds) << '\n';
  }
}

std::vector<std::size_t> GreedyTrace::selected_indices() const {
  std::vector<std::size_t> out;
  out.reserve(records.size());
  for (const TraceRecord& r : records) out.push_back(r.index);
  return out;
}

GreedyResult run_greedy(const SelectionRule& rule, const PairingEngine& engine, const CandidateSet& candidates,
                        std::size_t max_iterations, const StopCriteria& stop, const GreedyOptions& options) {
  rule.validate();
  if (candidates.empty()) throw InvalidArgument("greedy run needs a nonempty candidate set");
  if (max_iterations < 1) throw InvalidArgument("greedy run needs at least one iteration");

  GreedyResult result{NewtonModel(engine, candidates, stop.breakdown_tolerance), GreedyTrace{}};
  NewtonModel& model = result.model;
  GreedyTrace& trace = result.trace;
  SelectionState state(candidates, rule);
  trace.stop_reason = "max_iterations";

  using clock = std::chrono::steady_clock;
  while (trace.records.size() < max_iterations) {
    const auto start = clock::now();
    const std::optional<Selection> next = select_next(rule, model, state);
    if (!next) {
      trace.stop_reason = "exhausted";
      break;
    }
    const std::size_t k = next->index;
    TraceRecord rec;
    rec.iteration = trace.records.size() + 1;
    rec.index = k;
    rec.indicator = next->indicator;
    rec.power = model.candidate_power(k);
    rec.residual = model.candidate_residual(k);
    try {
      model.extend_candidate(k);
    } catch (const NearDependence&) {
      state.exclude(k);
      trace.excluded.push_back(k);
      continue;
    }
    state.mark_selected(k);
    state.update_dual_distances(model);
    state.update_parameter_distances(candidates, k);

    rec.fill_dual = state.dual_fill_distance();
    rec.fill_param = state.parameter_fill_distance();
    rec.norm_squared = model.norm_squared();
    rec.max_residual = model.max_abs_candidate_residual();
    if (options.record_timings) {
      rec.milliseconds = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    }
    trace.records.push_back(rec);

    if (stop.residual_tolerance > 0.0 && rec.max_residual <= stop.residual_tolerance) {
      trace.stop_reason = "residual_tolerance";
      break;
    }
    if (stop.fill_tolerance > 0.0 && rec.fill_dual <= stop.fill_tolerance) {
      trace.stop_reason = "fill_tolerance";
      break;
    }
  }
  return result;
}

}  // namespace kgreedy
