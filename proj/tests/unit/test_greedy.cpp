#include "kgreedy/errors.hpp"
#include "kgreedy/greedy.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace kgreedy;

namespace {

const Kernel kWeightedKernel = Kernel::weighted_gaussian(2000, 1.5);

}  // namespace

TEST_CASE("beta indicator") {
  CHECK(beta_indicator(0.0, 5.0, 0.3) == 0.3);
  CHECK(beta_indicator(0.0, 0.0, 0.3) == 0.3);
  CHECK(beta_indicator(1.0, 5.0, 0.3) == 5.0);
  CHECK(beta_indicator(0.5, 4.0, 9.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(beta_indicator(kBetaInfinity, 4.0, 2.0) == 2.0);
  CHECK(beta_indicator(2.0, 3.0, 2.0) == doctest::Approx(4.5));
}

TEST_CASE("rule parsing") {
  CHECK(SelectionRule::parse("p").beta == 0.0);
  CHECK(SelectionRule::parse("f").beta == 1.0);
  CHECK(SelectionRule::parse("psr").beta == 0.5);
  CHECK(std::isinf(SelectionRule::parse("fp").beta));
  CHECK(std::isinf(SelectionRule::parse("beta:inf").beta));
  CHECK(SelectionRule::parse("beta:0.25").beta == 0.25);
  CHECK(SelectionRule::parse("h").kind == SelectionRule::Kind::Geometric);
  CHECK(SelectionRule::parse("h:param").space == DistanceSpace::Parameter);
  CHECK(SelectionRule::parse("random", 9).seed == 9);
  CHECK(SelectionRule::parse("random:12").seed == 12);
  CHECK_THROWS_AS(SelectionRule::parse("beta:-1"), InvalidArgument);
  CHECK_THROWS_AS(SelectionRule::parse("beta:x"), InvalidArgument);
  CHECK_THROWS_AS(SelectionRule::parse("q"), InvalidArgument);
  SelectionRule weak = SelectionRule::p_greedy();
  weak.weak_gamma = 0.0;
  CHECK_THROWS_AS(weak.validate(), InvalidArgument);
}

TEST_CASE("single candidate is picked by every rule") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet one({Functional::radon(0.1, 0.2)}, {0.4});
  for (const char* name : {"p", "f", "psr", "fp", "h", "h:param", "random", "beta:2"}) {
    const SelectionRule rule = SelectionRule::parse(name);
    const NewtonModel model(engine, one);
    SelectionState state(one, rule);
    const auto s = select_next(rule, model, state);
    REQUIRE(s.has_value());
    CHECK(s->index == 0);
  }
}

TEST_CASE("geometric rule picks the farther endpoint") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet three({Functional::radon(0.0, 1.0), Functional::radon(0.2, 1.0), Functional::radon(0.5, 1.0)},
                           {0.0, 0.0, 0.0});
  const SelectionRule rule = SelectionRule::geometric(DistanceSpace::Parameter);
  NewtonModel model(engine, three);
  SelectionState state(three, rule);
  model.extend_candidate(1);
  state.mark_selected(1);
  state.update_dual_distances(model);
  state.update_parameter_distances(three, 1);
  const auto s = select_next(rule, model, state);
  REQUIRE(s.has_value());
  CHECK(s->index == 2);
}

TEST_CASE("P-greedy selection equals the brute-force argmax") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(30, 131);
  const SelectionRule rule = SelectionRule::p_greedy();
  NewtonModel model(engine, gamma);
  SelectionState state(gamma, rule);
  std::vector<Functional> selected;
  for (int step = 0; step < 10; ++step) {
    const auto s = select_next(rule, model, state);
    REQUIRE(s.has_value());
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
      if (state.selected(k)) continue;
      const double p2 = selected.empty() ? engine.norm_squared(gamma.functional(k))
                                         : testing::normal_equations_power_squared(engine, selected, gamma.functional(k));
      if (p2 > best_value * (1 + 1e-9)) {
        best_value = p2;
        best = k;
      }
    }
    CHECK(s->index == best);
    model.extend_candidate(s->index);
    state.mark_selected(s->index);
    selected.push_back(gamma.functional(s->index));
  }
}

TEST_CASE("full runs recover every sample") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(80, 137);
  for (const char* name : {"p", "f", "psr", "fp", "h", "random", "beta:3"}) {
    StopCriteria stop;
    stop.breakdown_tolerance = 1e-12;
    const GreedyResult r = run_greedy(SelectionRule::parse(name, 5), engine, gamma, gamma.size(), stop);
    CHECK(r.model.max_abs_candidate_residual() <= 1e-8 * gamma.max_abs_sample());
    CHECK(r.trace.size() + r.trace.excluded.size() >= r.model.size());
  }
}

TEST_CASE("P-greedy selected powers are nonincreasing") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(300, 139);
  const GreedyResult r = run_greedy(SelectionRule::p_greedy(), engine, gamma, 120);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace.records[i].power <= r.trace.records[i - 1].power + 1e-10);
    CHECK(r.trace.records[i].indicator == r.trace.records[i].power);
  }
}

TEST_CASE("fp-greedy ratio trends to zero") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(300, 149);
  const GreedyResult r = run_greedy(SelectionRule::fp_greedy(), engine, gamma, 200);
  const std::size_t q = r.trace.size() / 4;
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += r.trace.records[i].indicator;
    last += r.trace.records[r.trace.size() - 1 - i].indicator;
  }
  CHECK(last < first);
}

TEST_CASE("geometric greedy distances decay and match the fill distance") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(200, 151);
  for (DistanceSpace space : {DistanceSpace::Dual, DistanceSpace::Parameter}) {
    const GreedyResult r = run_greedy(SelectionRule::geometric(space), engine, gamma, 60);
    REQUIRE(r.trace.size() == 60);
    std::vector<Functional> selected;
    double running_min = std::numeric_limits<double>::infinity();
    double previous_fill = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const TraceRecord& rec = r.trace.records[i];
      if (i > 0) {
        CHECK(rec.indicator <= r.trace.records[i - 1].indicator + 1e-12);
        running_min = std::min(running_min, rec.indicator);
        const double fill = fill_distance(engine, selected, gamma, space);
        CHECK(std::abs(rec.indicator - fill) <= 1e-12 * std::max(1.0, fill));
      }
      selected.push_back(gamma.functional(rec.index));
      const double fill = fill_distance(engine, selected, gamma, space);
      const double recorded = space == DistanceSpace::Dual ? rec.fill_dual : rec.fill_param;
      CHECK(std::abs(recorded - fill) <= 1e-12 * std::max(1.0, fill));
      CHECK(fill <= previous_fill);
      previous_fill = fill;
    }
    CHECK(r.trace.records.back().indicator < r.trace.records[1].indicator);
  }
}

TEST_CASE("identical sequences for the beta aliases and under scaling") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(200, 157);
  const CandidateSet big = gamma.scaled(1e3);
  const std::pair<const char*, const char*> aliases[] = {{"p", "beta:0"}, {"f", "beta:1"}, {"psr", "beta:0.5"}, {"fp", "beta:inf"}};
  for (const auto& [a, b] : aliases) {
    const auto sa = run_greedy(SelectionRule::parse(a), engine, gamma, 50).trace.selected_indices();
    CHECK(sa == run_greedy(SelectionRule::parse(b), engine, gamma, 50).trace.selected_indices());
    CHECK(sa == run_greedy(SelectionRule::parse(a), engine, big, 50).trace.selected_indices());
  }
}

TEST_CASE("weak rule accepts an earlier near-best candidate") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(50, 163);
  SelectionRule weak = SelectionRule::p_greedy();
  weak.weak_gamma = 1e-6;
  const NewtonModel model(engine, gamma);
  SelectionState state(gamma, weak);
  CHECK(select_next(weak, model, state)->index == 0);
}

TEST_CASE("near-dependent candidates are excluded and logged") {
  const PairingEngine engine(kWeightedKernel);
  // Two lines that differ by far less than the breakdown threshold resolves.
  const CandidateSet gamma({Functional::radon(0.1, 0.5), Functional::radon(0.1 + 1e-13, 0.5), Functional::radon(-0.3, 1.0)},
                           {1.0, 1.0, 0.5});
  StopCriteria stop;
  stop.breakdown_tolerance = 1e-6;
  const GreedyResult r = run_greedy(SelectionRule::geometric(DistanceSpace::Parameter), engine, gamma, 3, stop);
  CHECK(r.trace.excluded.size() == 1);
  CHECK(r.trace.size() == 2);
  CHECK(r.trace.stop_reason == "exhausted");
}

TEST_CASE("stop criteria and trace output") {
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(100, 167);
  StopCriteria stop;
  stop.residual_tolerance = 0.5 * gamma.max_abs_sample();
  const GreedyResult r = run_greedy(SelectionRule::f_greedy(), engine, gamma, 100, stop);
  CHECK(r.trace.stop_reason == "residual_tolerance");
  CHECK(r.trace.records.back().max_residual <= stop.residual_tolerance);
  const GreedyResult m = run_greedy(SelectionRule::f_greedy(), engine, gamma, 7);
  CHECK(m.trace.stop_reason == "max_iterations");
  std::ostringstream a;
  std::ostringstream b;
  m.trace.write_csv(a);
  run_greedy(SelectionRule::f_greedy(), engine, gamma, 7).trace.write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("iter,index,indicator,power,residual,fill_dual,fill_param,norm_sq,ms\n", 0) == 0);
  CHECK_THROWS_AS(run_greedy(SelectionRule::f_greedy(), engine, gamma, 0), InvalidArgument);
}
