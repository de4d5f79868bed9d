// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero on
// any failure. Informational lines start with INFO and never gate the result.

#include "kgreedy/experiment.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace kgreedy;

namespace {

const Kernel kWeightedKernel = Kernel::weighted_gaussian(2000, 1.5);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome oracle_agreement() {
  Outcome out;
  std::mt19937_64 rng(1001);
  const double alphas[] = {10.0, 200.0, 2000.0};
  const double betas[] = {0.5, 1.5};
  double worst[3] = {0.0, 0.0, 0.0};
  int instances[3] = {0, 0, 0};
  for (int i = 0; i < 200; ++i) {
    const Kernel k = Kernel::weighted_gaussian(alphas[i % 3], betas[(i / 3) % 2]);
    const PairingEngine engine(k);
    auto check = [&](int combo, double analytic, double oracle) {
      const double excess = std::abs(analytic - oracle) / (1e-8 + 1e-8 * std::abs(analytic));
      worst[combo] = std::max(worst[combo], excess);
      ++instances[combo];
    };
    const Point x = testing::random_point(rng);
    const Point y = testing::random_point(rng);
    check(0, engine.pairing(Functional::point(x), Functional::point(y)),
          std::exp(-k.weight()->beta() * (x.squaredNorm() + y.squaredNorm()) - k.alpha() * (x - y).squaredNorm()));
    const Functional a = testing::random_line(rng);
    const Functional b = testing::random_line(rng);
    const Point z = testing::random_point(rng);
    check(1, engine.pairing(a, Functional::point(z)), testing::quadrature_representer(k, a.as_radon(), z));
    check(2, engine.pairing(a, b), testing::quadrature_pairing(k, a.as_radon(), b.as_radon()));
  }
  const char* names[] = {"point x point", "point x radon", "radon x radon"};
  std::string summary;
  for (int c = 0; c < 3; ++c) {
    out.require(worst[c] <= 1.0, std::string(names[c]) + " exceeds tolerance by " + fmt(worst[c]) + "x");
    summary += std::string(summary.empty() ? "" : ", ") + names[c] + " n=" + std::to_string(instances[c]) +
               " worst " + fmt(worst[c]) + " of tol";
  }
  if (out.pass) out.detail = summary;
  return out;
}

Outcome newton_direct_equivalence() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  std::mt19937_64 rng(1002);
  double worst_eval = 0.0;
  double worst_res = 0.0;
  for (std::size_t n : {1u, 10u, 60u, 100u}) {
    const CandidateSet gamma = testing::phantom_lines(n, 2000 + n);
    NewtonModel model(engine, gamma);
    for (std::size_t k = 0; k < n; ++k) model.extend_candidate(k);
    const Eigen::VectorXd b = direct_solve(engine, gamma.functionals(), gamma.samples());
    for (int i = 0; i < 200; ++i) {
      const Point x = testing::random_point(rng);
      worst_eval = std::max(worst_eval, std::abs(model.evaluate(x) - evaluate_expansion(engine, gamma.functionals(), b, x)));
    }
    double res = 0.0;
    for (std::size_t k = 0; k < n; ++k) res = std::max(res, std::abs(model.residual(gamma.functional(k), gamma.sample(k))));
    worst_res = std::max(worst_res, res / gamma.max_abs_sample());
  }
  out.require(worst_eval <= 1e-6, "interpolants differ by " + fmt(worst_eval));
  out.require(worst_res <= 1e-8, "relative residual " + fmt(worst_res));
  if (out.pass) out.detail = "max |newton - direct| " + fmt(worst_eval) + ", max rel residual " + fmt(worst_res);
  return out;
}

Outcome power_properties() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(400, 1003);
  NewtonModel model(engine, gamma);
  SelectionState state(gamma, SelectionRule::psr_greedy());
  std::vector<double> previous(gamma.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) previous[k] = model.candidate_power(k);
  double worst_selected = 0.0;
  double worst_increase = -std::numeric_limits<double>::infinity();
  double worst_oracle = 0.0;
  for (std::size_t n = 1; n <= 80; ++n) {
    const auto s = select_next(SelectionRule::psr_greedy(), model, state);
    if (!s) break;
    model.extend_candidate(s->index);
    state.mark_selected(s->index);
    for (std::size_t k = 0; k < gamma.size(); ++k) {
      worst_increase = std::max(worst_increase, model.candidate_power(k) - previous[k]);
      previous[k] = model.candidate_power(k);
    }
    if (n == 15) {
      for (std::size_t k = 0; k < gamma.size(); ++k) {
        if (state.selected(k)) continue;
        const double oracle = testing::normal_equations_power_squared(engine, model.selected(), gamma.functional(k));
        worst_oracle = std::max(worst_oracle, std::abs(model.candidate_power_squared(k) - oracle) / oracle);
      }
    }
  }
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Functional& f = model.selected()[i];
    worst_selected = std::max(worst_selected, model.power(f) / std::sqrt(engine.norm_squared(f)));
  }
  out.require(worst_selected <= 1e-7, "selected power ratio " + fmt(worst_selected));
  out.require(worst_increase <= 1e-10, "power increased by " + fmt(worst_increase));
  out.require(worst_oracle <= 1e-8, "normal equations mismatch " + fmt(worst_oracle));
  if (out.pass) {
    out.detail = "P(selected)/norm " + fmt(worst_selected) + ", max increase " + fmt(worst_increase) +
                 ", oracle rel err " + fmt(worst_oracle);
  }
  return out;
}

Outcome projection_identities() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  const std::vector<Functional> centers = testing::random_lines(15, 1004);
  std::mt19937_64 rng(1004);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd a(centers.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = g(rng);
  const double f_norm_sq = a.dot(gram(engine, centers).entries * a);
  auto apply_f = [&](const Functional& l) {
    double v = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) v += a[i] * engine.pairing(l, centers[i]);
    return v;
  };
  std::vector<Functional> lines = testing::random_lines(300, 1005);
  std::vector<double> samples;
  for (const Functional& l : lines) samples.push_back(apply_f(l));
  const CandidateSet gamma(lines, samples);

  NewtonModel model(engine, gamma);
  SelectionState state(gamma, SelectionRule::f_greedy());
  double worst_pyth = 0.0;
  bool monotone = true;
  bool bounded = true;
  double previous = 0.0;
  for (int n = 0; n < 60; ++n) {
    const auto s = select_next(SelectionRule::f_greedy(), model, state);
    if (!s) break;
    model.extend_candidate(s->index);
    state.mark_selected(s->index);
    // ||f - s_n||^2 from the Gram matrix, independent of the Newton coefficients.
    const Eigen::VectorXd b = direct_solve(engine, model.selected(), model.selected_samples());
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(model.selected_samples().data(), b.size());
    const double s_norm_sq = b.dot(gram(engine, model.selected()).entries * b);
    const double err_sq = f_norm_sq - 2.0 * b.dot(y) + s_norm_sq;
    worst_pyth = std::max(worst_pyth, std::abs(err_sq - (f_norm_sq - model.norm_squared())) / f_norm_sq);
    monotone = monotone && model.norm_squared() >= previous;
    bounded = bounded && model.norm_squared() <= f_norm_sq * (1 + 1e-12);
    previous = model.norm_squared();
  }
  double worst_bound = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Functional l = testing::random_line(rng);
    const double lhs = std::abs(model.residual(l, apply_f(l)));
    const double rhs = model.power(l) * std::sqrt(f_norm_sq);
    worst_bound = std::max(worst_bound, lhs - rhs);
  }
  out.require(worst_pyth <= 1e-6, "Pythagoras rel err " + fmt(worst_pyth));
  out.require(monotone, "sum c_j^2 decreased");
  out.require(bounded, "sum c_j^2 exceeds ||f||^2");
  out.require(worst_bound <= 1e-12, "power bound violated by " + fmt(worst_bound));
  if (out.pass) out.detail = "Pythagoras rel err " + fmt(worst_pyth) + ", max power-bound excess " + fmt(worst_bound);
  return out;
}

Outcome finite_convergence() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(150, 1006);
  std::string summary;
  for (const char* name : {"p", "h", "f", "fp", "psr", "beta:0.25", "beta:2"}) {
    const GreedyResult r = run_greedy(SelectionRule::parse(name), engine, gamma, gamma.size());
    const double rel = r.model.max_abs_candidate_residual() / gamma.max_abs_sample();
    out.require(rel <= 1e-8, std::string(name) + " residual " + fmt(rel));
    summary += std::string(summary.empty() ? "" : ", ") + name + " " + fmt(rel);
    if (std::string(name) == "h") {
      const double ratio = r.trace.records.back().fill_dual / r.trace.records.front().fill_dual;
      out.require(ratio <= 1e-10, "h fill ratio " + fmt(ratio));
      summary += " (fill ratio " + fmt(ratio) + ")";
    }
  }
  if (out.pass) out.detail = "max rel residual " + summary;
  return out;
}

Outcome beta_identities() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(500, 1007);
  const std::pair<const char*, const char*> pairs[] = {{"beta:0", "p"}, {"beta:1", "f"}, {"beta:0.5", "psr"}, {"beta:inf", "fp"}};
  for (const auto& [b, named] : pairs) {
    const auto x = run_greedy(SelectionRule::parse(b), engine, gamma, gamma.size()).trace.selected_indices();
    const auto y = run_greedy(SelectionRule::parse(named), engine, gamma, gamma.size()).trace.selected_indices();
    out.require(x == y, std::string(b) + " differs from " + named);
  }
  if (out.pass) out.detail = "4 pairs identical over full runs";
  return out;
}

Outcome scale_equivariance() {
  Outcome out;
  const PairingEngine engine(kWeightedKernel);
  const CandidateSet gamma = testing::phantom_lines(500, 1008);
  const CandidateSet big = gamma.scaled(1e3);
  for (const char* name : {"p", "h", "f", "fp", "psr", "random", "beta:0.25", "beta:2"}) {
    const auto x = run_greedy(SelectionRule::parse(name, 7), engine, gamma, 100).trace.selected_indices();
    const auto y = run_greedy(SelectionRule::parse(name, 7), engine, big, 100).trace.selected_indices();
    out.require(x == y, std::string(name) + " changed under scaling");
  }
  if (out.pass) out.detail = "8 methods unchanged";
  return out;
}

ExperimentConfig table_config(bool positive_radii) {
  ExperimentConfig c;
  c.seed = 42;
  c.candidates = 2000;
  c.iterations = 300;
  c.grid = 64;
  c.kernel.alpha = 2000;
  c.kernel.weight_beta = 1.5;
  c.positive_radii_only = positive_radii;
  c.methods = {"p", "h", "f", "fp", "psr", "random"};
  return c;
}

std::string describe(const ResultsTable& t) {
  std::string s;
  for (const ResultsRow& r : t.rows) {
    s += (s.empty() ? "" : " | ") + r.method + " cond " + fmt(r.condition) + " msi " + fmt(r.msi) + " msr " + fmt(r.msr);
  }
  return s;
}

Outcome table_orderings(const ResultsTable& t) {
  Outcome out;
  for (const ResultsRow& r : t.rows) out.require(r.ok(), r.method + " failed: " + r.error);
  if (!out.pass) return out;
  const ResultsRow& p = *t.find("p");
  const ResultsRow& f = *t.find("f");
  const ResultsRow& psr = *t.find("psr");
  const ResultsRow& rnd = *t.find("random");
  bool p_smallest_cond = true;
  bool f_smallest_msi = true;
  for (const ResultsRow& r : t.rows) {
    if (r.method != "p") p_smallest_cond = p_smallest_cond && p.condition < r.condition;
    if (r.method != "f") f_smallest_msi = f_smallest_msi && f.msi < r.msi;
  }
  out.require(p_smallest_cond, "(a) p cond not smallest");
  out.require(f.condition >= 10.0 * p.condition, "(a) cond f/p = " + fmt(f.condition / p.condition));
  out.require(f_smallest_msi, "(b) f msi not smallest");
  out.require(p.msi >= 10.0 * f.msi, "(b) msi p/f = " + fmt(p.msi / f.msi));
  out.require(p.condition < psr.condition && psr.condition < f.condition, "(c) psr cond not between p and f");
  out.require(f.msi < psr.msi && psr.msi < p.msi, "(c) psr msi not between f and p");
  out.require(rnd.msi > psr.msi, "(d) random msi not above psr");
  out.detail = (out.pass ? "" : out.detail + " :: ") + "cond f/p " + fmt(f.condition / p.condition) + ", msi p/f " +
               fmt(p.msi / f.msi) + " :: " + describe(t);
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome sinogram() {
  Outcome out;
  const EllipsePhantom sl = shepp_logan();
  std::mt19937_64 rng(1009);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Functional l = testing::random_line(rng);
    const RadonLine& line = l.as_radon();
    worst = std::max(worst, std::abs(sl.radon(line.r, line.theta) - testing::quadrature_radon(sl, line.r, line.theta)));
  }
  const EllipsePhantom disk({Ellipse{make_point(0, 0), 1.0, 1.0, 0.0, 1.0}});
  const double chord = std::abs(disk.radon(0.0, 0.7) - 2.0);
  out.require(worst <= 1e-8, "analytic vs quadrature " + fmt(worst));
  out.require(chord <= 1e-12, "unit disk chord off by " + fmt(chord));
  if (out.pass) out.detail = "max abs diff " + fmt(worst) + ", disk chord err " + fmt(chord);
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(start);
    if (limit_s > 0.0) o.require(secs <= limit_s, "runtime " + fmt(secs) + " s over " + fmt(limit_s) + " s");
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << fmt(secs) << " s] "
              << o.detail << std::endl;
  };

  report(1, "oracle agreement of dual pairings", 60, oracle_agreement);
  report(2, "Newton and direct interpolants agree", 60, newton_direct_equivalence);
  report(3, "power function properties", 0, power_properties);
  report(4, "projection identities", 0, projection_identities);
  report(5, "finite candidate set convergence", 120, finite_convergence);
  report(6, "beta family identities", 0, beta_identities);
  report(7, "scale equivariance", 0, scale_equivariance);

  const auto tmp = std::filesystem::temp_directory_path();
  ExperimentConfig first = table_config(true);
  first.output_dir = tmp / "kgreedy_acceptance_a";
  ExperimentConfig second = first;
  second.output_dir = tmp / "kgreedy_acceptance_b";
  std::filesystem::remove_all(first.output_dir);
  std::filesystem::remove_all(second.output_dir);

  report(8, "qualitative table orderings (seed 42, N 2000, M 300, G 64, positive radii)", 300,
         [&] { return table_orderings(run_experiment(first)); });
  report(9, "sinogram correctness", 0, sinogram);
  report(10, "determinism of trace CSVs", 0, [&] {
    run_experiment(second);
    Outcome o;
    int compared = 0;
    for (const std::string& m : first.methods) {
      const std::string name = "trace_" + m + ".csv";
      const std::string a = read_file(first.output_dir / name);
      o.require(!a.empty(), name + " missing");
      o.require(a == read_file(second.output_dir / name), name + " differs");
      ++compared;
    }
    if (o.pass) o.detail = std::to_string(compared) + " trace files bit-identical";
    return o;
  });

  // Same orderings on the default sampling box with signed radii; reported only.
  try {
    const Outcome box = table_orderings(run_experiment(table_config(false), false));
    std::cout << "INFO signed-radius sampling box: orderings " << (box.pass ? "hold" : "do not all hold") << " :: "
              << box.detail << std::endl;
  } catch (const std::exception& e) {
    std::cout << "INFO signed-radius sampling box: " << e.what() << std::endl;
  }

  std::filesystem::remove_all(first.output_dir);
  std::filesystem::remove_all(second.output_dir);
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
