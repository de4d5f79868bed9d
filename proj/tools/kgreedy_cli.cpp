#include "kgreedy/errors.hpp"
#include "kgreedy/experiment.hpp"
#include "kgreedy/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

namespace {

using namespace kgreedy;

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kVerificationError = 3 };

struct RunArgs {
  std::string config;
  std::map<std::string, std::string> overrides;
};

// Registers `--flag value` as an override of config key `key`.
void override_option(CLI::App* app, RunArgs& args, const std::string& flag, const std::string& key,
                     const std::string& help) {
  app->add_option_function<std::string>(flag, [&args, key](const std::string& v) { args.overrides[key] = v; }, help);
}

void override_flag(CLI::App* app, RunArgs& args, const std::string& flag, const std::string& key,
                   const std::string& help) {
  app->add_flag_function(flag, [&args, key](std::int64_t) { args.overrides[key] = "true"; }, help);
}

ExperimentConfig build_config(const RunArgs& args, bool validate = true) {
  ExperimentConfig config = args.config.empty() ? ExperimentConfig{} : load_config(args.config);
  config.apply(args.overrides);
  if (validate) config.validate();
  return config;
}

int cmd_run(const RunArgs& args) {
  const ExperimentConfig config = build_config(args);
  const ResultsTable table = run_experiment(config);
  table.write_csv(std::cout);
  std::cout << "outputs in " << config.output_dir.string() << '\n';
  for (const ResultsRow& r : table.rows) {
    if (!r.ok()) return kNumericalError;
  }
  return kOk;
}

int cmd_sample(const RunArgs& args, const std::string& out) {
  // Only the sampling keys matter here, so M and the method list are not checked.
  const ExperimentConfig config = build_config(args, false);
  if (config.candidates < 1) throw InvalidArgument("N must be at least 1");
  SamplingOptions sampling;
  sampling.positive_radii_only = config.positive_radii_only;
  const CandidateSet samples =
      sample_functionals(shepp_logan(config.modified_phantom), config.candidates, config.seed, sampling);
  if (out.empty() || out == "-") {
    write_candidates_csv(std::cout, samples);
  } else {
    std::ofstream file(out);
    if (!file) throw InvalidArgument("cannot write " + out);
    write_candidates_csv(file, samples);
  }
  return kOk;
}

int cmd_reconstruct(const std::string& model_path, int grid, const std::string& out, bool modified) {
  std::ifstream in(model_path);
  if (!in) throw InvalidArgument("cannot open model " + model_path);
  if (grid < 1) throw InvalidArgument("grid size must be positive");
  const ModelSnapshot snap = load_model(in);
  const PairingEngine engine(snap.kernel.build());
  const NewtonModel model = NewtonModel::from_snapshot(engine, snap.selected, snap.samples, snap.newton,
                                                       snap.coefficients, snap.breakdown_tolerance);
  const EllipsePhantom phantom = shepp_logan(modified);
  const Eigen::MatrixXd truth = phantom.rasterize(grid);
  const Eigen::MatrixXd img = rasterize_model(model, grid);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw InvalidArgument("cannot write " + out);
  write_pgm(file, img, truth.minCoeff(), truth.maxCoeff());
  std::cout << "selected " << model.size() << ", msr " << format_double(compute_msr(model, phantom, grid)) << '\n';
  return kOk;
}

int cmd_table(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  const ResultsTable table = aggregate_summaries(paths);
  if (out.empty() || out == "-") {
    table.write_csv(std::cout);
  } else {
    std::ofstream file(out);
    if (!file) throw InvalidArgument("cannot write " + out);
    table.write_csv(file);
  }
  return kOk;
}

// Analytic pairings and the exact sinogram against adaptive quadrature.
int cmd_verify(int count, std::uint64_t seed, double alpha, double beta) {
  if (count < 1) throw InvalidArgument("count must be positive");
  const Kernel kernel = Kernel::weighted_gaussian(alpha, beta);
  const PairingEngine analytic(kernel);
  const PairingEngine quadrature(kernel, PairingMode::Quadrature);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(-1.4142135623730951, 1.4142135623730951);
  std::uniform_real_distribution<double> angle(0.0, 3.141592653589793);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto line = [&] {
    const double r = radius(rng);
    return Functional::radon(r, angle(rng));
  };
  auto point = [&] {
    const double x = coord(rng);
    return Functional::point(make_point(x, coord(rng)));
  };
  double worst_mixed = 0.0;
  double worst_lines = 0.0;
  double worst_sinogram = 0.0;
  const EllipsePhantom phantom = shepp_logan();
  QuadratureSpec sino;
  sino.abs_tolerance = 1e-10;
  sino.max_subdivisions = 400000;
  sino.initial_intervals = 64;
  for (int i = 0; i < count; ++i) {
    const Functional a = line();
    const Functional b = line();
    const Functional p = point();
    auto excess = [](double x, double ref) { return std::abs(x - ref) / (1e-8 + 1e-8 * std::abs(x)); };
    worst_mixed = std::max(worst_mixed, excess(analytic.pairing(a, p), quadrature.pairing(a, p)));
    worst_lines = std::max(worst_lines, excess(analytic.pairing(a, b), quadrature.pairing(a, b)));
    const RadonLine& l = a.as_radon();
    const double q = integrate([&](double s) { return phantom(line_point(l, s)); }, -1.5, 1.5, sino).value;
    worst_sinogram = std::max(worst_sinogram, std::abs(phantom.radon(l.r, l.theta) - q) / 1e-8);
  }
  std::cout << "point x radon  worst error / tolerance " << format_double(worst_mixed) << '\n'
            << "radon x radon  worst error / tolerance " << format_double(worst_lines) << '\n'
            << "sinogram       worst error / tolerance " << format_double(worst_sinogram) << '\n';
  const bool ok = worst_mixed <= 1.0 && worst_lines <= 1.0 && worst_sinogram <= 1.0;
  std::cout << (ok ? "verification passed" : "verification FAILED") << '\n';
  return ok ? kOk : kVerificationError;
}

void add_experiment_options(CLI::App* app, RunArgs& args) {
  app->add_option("--config", args.config, "Key-value configuration file");
  override_option(app, args, "--n", "n", "Number of candidate functionals N");
  override_option(app, args, "--m", "m", "Greedy iterations M");
  override_option(app, args, "--seed", "seed", "Sampling seed");
  override_option(app, args, "--alpha", "alpha", "Kernel shape parameter");
  override_option(app, args, "--beta-weight", "beta_weight", "Weight decay parameter");
  override_flag(app, args, "--modified", "modified", "Use the high contrast Shepp-Logan intensities");
  override_flag(app, args, "--positive-radii", "positive_radii_only", "Sample radii in [0, sqrt 2] only");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy kernel interpolation with Radon functionals"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run the reconstruction experiment");
  add_experiment_options(run, run_args);
  override_option(run, run_args, "--grid", "grid", "Reconstruction grid size G");
  override_option(run, run_args, "--methods", "methods", "Comma separated methods (p,h,f,fp,psr,beta:x,random,direct)");
  override_option(run, run_args, "--out", "out", "Output directory");
  override_option(run, run_args, "--residual-tol", "residual_tol", "Stop when max |residual| falls below");
  override_option(run, run_args, "--fill-tol", "fill_tol", "Stop when the dual fill distance falls below");
  override_option(run, run_args, "--breakdown-tol", "breakdown_tol", "Absolute power breakdown threshold");
  override_option(run, run_args, "--direct-cap", "direct_cap", "Largest N for the direct method");
  override_flag(run, run_args, "--parallel-methods", "parallel_methods", "Run methods concurrently");
  override_flag(run, run_args, "--record-timings", "record_timings", "Record wall time per iteration in traces");
  override_flag(run, run_args, "--export-gram", "export_gram", "Write the selected Gram matrix per method");

  RunArgs sample_args;
  std::string sample_out;
  CLI::App* sample = app.add_subcommand("sample", "Write a Shepp-Logan sample set as CSV");
  add_experiment_options(sample, sample_args);
  sample->add_option("--out", sample_out, "Output CSV (default stdout)");

  std::string model_path;
  std::string image_out = "reconstruction.pgm";
  int image_grid = 256;
  bool image_modified = false;
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "Replay a saved model onto an image");
  reconstruct->add_option("--model", model_path, "Model JSON written by run")->required();
  reconstruct->add_option("--grid", image_grid, "Image size");
  reconstruct->add_option("--out", image_out, "Output PGM");
  reconstruct->add_flag("--modified", image_modified, "Compare against the high contrast phantom");

  std::vector<std::string> summaries;
  std::string table_out;
  CLI::App* table = app.add_subcommand("table", "Aggregate summary.json files into one CSV table");
  table->add_option("summaries", summaries, "summary.json files")->required();
  table->add_option("--out", table_out, "Output CSV (default stdout)");

  int verify_count = 50;
  std::uint64_t verify_seed = 7;
  double verify_alpha = 2000.0;
  double verify_beta = 1.5;
  CLI::App* verify = app.add_subcommand("verify", "Check closed forms against adaptive quadrature");
  verify->add_option("--count", verify_count, "Random instances per check");
  verify->add_option("--seed", verify_seed, "Seed");
  verify->add_option("--alpha", verify_alpha, "Kernel shape parameter");
  verify->add_option("--beta-weight", verify_beta, "Weight decay parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sample) return cmd_sample(sample_args, sample_out);
    if (*reconstruct) return cmd_reconstruct(model_path, image_grid, image_out, image_modified);
    if (*table) return cmd_table(summaries, table_out);
    if (*verify) return cmd_verify(verify_count, verify_seed, verify_alpha, verify_beta);
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedPairing& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const AccuracyError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << e.error_estimate() << ")\n";
    return kNumericalError;
  } catch (const NearDependence& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
