#include "kgreedy/experiment.hpp"

#include "kgreedy/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace kgreedy {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidArgument("config key '" + key + "' expects a boolean, got '" + v + "'");
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config key '" + key + "' expects a number, got '" + v + "'");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long u = std::stoull(v, &used);
      if (used == v.size()) return u;
    }
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config key '" + key + "' expects a nonnegative integer, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string file_stem(const std::string& method) {
  std::string s = method;
  for (char& c : s) {
    if (c == ':' || c == '/' || c == '.') c = '_';
  }
  return s;
}

Eigen::MatrixXd rasterize_expansion(const PairingEngine& engine, std::span<const Functional> functionals,
                                    const Eigen::VectorXd& coeffs, int grid) {
  Eigen::MatrixXd img(grid, grid);
  for (int row = 0; row < grid; ++row) {
    const double y = grid_coordinate(grid - 1 - row, grid);
    for (int col = 0; col < grid; ++col) {
      img(row, col) = evaluate_expansion(engine, functionals, coeffs, make_point(grid_coordinate(col, grid), y));
    }
  }
  return img;
}

void write_image(const std::filesystem::path& path, const Eigen::MatrixXd& img, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  write_pgm(out, img, lo, hi);
}

nlohmann::json row_to_json(const ResultsRow& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["msr"] = r.msr;
  j["msi"] = r.msi;
  if (std::isfinite(r.condition)) {
    j["cond"] = r.condition;
  } else {
    j["cond"] = "inf";
  }
  j["selected"] = r.selected;
  j["seconds"] = r.seconds;
  j["msi_by_construction"] = r.msi_by_construction;
  j["stop_reason"] = r.stop_reason;
  j["error"] = r.error;
  return j;
}

ResultsRow row_from_json(const nlohmann::json& j) {
  ResultsRow r;
  r.method = j.at("method").get<std::string>();
  r.msr = j.at("msr").get<double>();
  r.msi = j.at("msi").get<double>();
  const auto& cond = j.at("cond");
  r.condition = cond.is_string() ? kInfiniteCondition : cond.get<double>();
  r.selected = j.at("selected").get<std::size_t>();
  r.seconds = j.value("seconds", 0.0);
  r.msi_by_construction = j.value("msi_by_construction", false);
  r.stop_reason = j.value("stop_reason", std::string());
  r.error = j.value("error", std::string());
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (candidates < 1) throw InvalidArgument("N must be at least 1");
  if (iterations < 1) throw InvalidArgument("M must be at least 1");
  if (iterations > candidates) throw InvalidArgument("M must not exceed N");
  if (grid < 8) throw InvalidArgument("grid size must be at least 8");
  if (methods.empty()) throw InvalidArgument("method list must not be empty");
  for (const std::string& m : methods) {
    if (m != "direct") SelectionRule::parse(m, seed);
  }
  const Kernel k = kernel.build();
  if (!k.supports_radon()) {
    throw InvalidArgument("the Radon experiment needs a weighted Gaussian kernel in two dimensions");
  }
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "kernel" || key == "family") {
      kernel.family = parse_kernel_family(value);
    } else if (key == "alpha") {
      kernel.alpha = parse_number(key, value);
    } else if (key == "beta_weight" || key == "weight_beta") {
      if (value == "none") {
        kernel.weight_beta.reset();
      } else {
        kernel.weight_beta = parse_number(key, value);
      }
    } else if (key == "dimension") {
      kernel.dimension = static_cast<int>(parse_unsigned(key, value));
    } else if (key == "phantom") {
      if (value != "shepp-logan" && value != "modified-shepp-logan") {
        throw InvalidArgument("unknown phantom '" + value + "'");
      }
      modified_phantom = value == "modified-shepp-logan";
    } else if (key == "modified") {
      modified_phantom = parse_bool(key, value);
    } else if (key == "n") {
      candidates = parse_unsigned(key, value);
    } else if (key == "m") {
      iterations = parse_unsigned(key, value);
    } else if (key == "seed") {
      seed = parse_unsigned(key, value);
    } else if (key == "positive_radii_only") {
      positive_radii_only = parse_bool(key, value);
    } else if (key == "methods") {
      methods = split_list(value);
    } else if (key == "grid") {
      grid = static_cast<int>(parse_unsigned(key, value));
    } else if (key == "out") {
      output_dir = value;
    } else if (key == "residual_tol") {
      residual_tolerance = parse_number(key, value);
    } else if (key == "fill_tol") {
      fill_tolerance = parse_number(key, value);
    } else if (key == "breakdown_tol") {
      breakdown_tolerance = parse_number(key, value);
    } else if (key == "direct_cap") {
      direct_cap = parse_unsigned(key, value);
    } else if (key == "parallel_methods") {
      parallel_methods = parse_bool(key, value);
    } else if (key == "record_timings") {
      record_timings = parse_bool(key, value);
    } else if (key == "export_gram") {
      export_gram = parse_bool(key, value);
    } else if (key == "write_images") {
      write_images = parse_bool(key, value);
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  ExperimentConfig config;
  config.apply(parse_key_values(in));
  return config;
}

const ResultsRow* ResultsTable::find(const std::string& method) const {
  for (const ResultsRow& r : rows) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

void ResultsTable::write_csv(std::ostream& out) const {
  out << "method,msr,msi,cond,selected,seconds,status\n";
  for (const ResultsRow& r : rows) {
    out << r.method << ',' << format_double(r.msr) << ',' << format_double(r.msi) << ','
        << (std::isfinite(r.condition) ? format_double(r.condition) : std::string("inf")) << ',' << r.selected
        << ',' << format_double(r.seconds) << ',';
    if (!r.ok()) {
      std::string e = r.error;
      for (char& c : e) {
        if (c == ',' || c == '\n') c = ';';
      }
      out << "failed: " << e;
    } else {
      out << (r.msi_by_construction ? "ok (msi zero by construction)" : "ok");
    }
    out << '\n';
  }
}

double compute_msi(const NewtonModel& model) {
  const auto residuals = model.candidate_residuals();
  if (residuals.empty()) throw InvalidArgument("MSI needs a model with a candidate set");
  double sum = 0.0;
  for (double r : residuals) sum += r * r;
  return sum / static_cast<double>(residuals.size());
}

Eigen::MatrixXd rasterize_model(const NewtonModel& model, int grid) {
  if (grid < 1) throw InvalidArgument("grid size must be positive");
  Eigen::MatrixXd img(grid, grid);
  for (int row = 0; row < grid; ++row) {
    const double y = grid_coordinate(grid - 1 - row, grid);
    for (int col = 0; col < grid; ++col) img(row, col) = model.evaluate(make_point(grid_coordinate(col, grid), y));
  }
  return img;
}

double compute_msr(const NewtonModel& model, const EllipsePhantom& phantom, int grid) {
  const Eigen::MatrixXd diff = phantom.rasterize(grid) - rasterize_model(model, grid);
  return diff.squaredNorm() / static_cast<double>(grid) / static_cast<double>(grid);
}

MethodOutcome run_method(const std::string& method, const ExperimentConfig& config, const PairingEngine& engine,
                         const CandidateSet& samples, const EllipsePhantom& phantom,
                         std::optional<NewtonModel>* model_out) {
  MethodOutcome outcome;
  outcome.row.method = method;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (method == "direct") {
      if (samples.size() > config.direct_cap) {
        throw InvalidArgument("direct solve skipped: N = " + std::to_string(samples.size()) + " exceeds direct_cap = " +
                              std::to_string(config.direct_cap));
      }
      const auto& fs = samples.functionals();
      const Eigen::VectorXd b = direct_solve(engine, fs, samples.samples());
      const Eigen::MatrixXd diff = phantom.rasterize(config.grid) - rasterize_expansion(engine, fs, b, config.grid);
      outcome.row.msr = diff.squaredNorm() / config.grid / config.grid;
      outcome.row.msi = 0.0;
      outcome.row.msi_by_construction = true;
      outcome.row.condition = condition_number(gram(engine, fs));
      outcome.row.selected = samples.size();
      outcome.row.stop_reason = "direct";
    } else {
      const SelectionRule rule = SelectionRule::parse(method, config.seed);
      StopCriteria stop;
      stop.breakdown_tolerance = config.breakdown_tolerance;
      stop.residual_tolerance = config.residual_tolerance;
      stop.fill_tolerance = config.fill_tolerance;
      GreedyOptions options;
      options.record_timings = config.record_timings;
      GreedyResult result = run_greedy(rule, engine, samples, config.iterations, stop, options);
      outcome.row.msi = compute_msi(result.model);
      outcome.row.msr = compute_msr(result.model, phantom, config.grid);
      outcome.row.condition = condition_number(gram(engine, result.model.selected()));
      outcome.row.selected = result.model.size();
      outcome.row.stop_reason = result.trace.stop_reason;
      outcome.trace = std::move(result.trace);
      if (model_out) model_out->emplace(std::move(result.model));
    }
  } catch (const std::exception& e) {
    outcome.row.error = e.what();
  }
  outcome.row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

ResultsTable run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.validate();
  PairingEngine engine(config.kernel.build(), PairingMode::Analytic);
  // Every pair is visited once per greedy step; a cache would only grow.
  engine.set_cache_enabled(false);
  const EllipsePhantom phantom = shepp_logan(config.modified_phantom);
  SamplingOptions sampling;
  sampling.positive_radii_only = config.positive_radii_only;
  const CandidateSet samples = sample_functionals(phantom, config.candidates, config.seed, sampling);

  const std::filesystem::path& dir = config.output_dir;
  const Eigen::MatrixXd truth = phantom.rasterize(config.grid);
  const double lo = truth.minCoeff();
  const double hi = truth.maxCoeff();
  if (write_outputs) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "samples.csv");
    write_candidates_csv(csv, samples);
    if (config.write_images) write_image(dir / "phantom.pgm", truth, lo, hi);
  }

  auto run_one = [&](const std::string& method) {
    std::optional<NewtonModel> model;
    MethodOutcome outcome = run_method(method, config, engine, samples, phantom, &model);
    if (!write_outputs || !outcome.row.ok()) return outcome.row;
    const std::string stem = file_stem(method);
    if (method != "direct") {
      std::ofstream trace(dir / ("trace_" + stem + ".csv"));
      outcome.trace.write_csv(trace);
    }
    if (model) {
      std::ofstream snap(dir / ("model_" + stem + ".json"));
      save_model(snap, config.kernel, *model);
      if (config.write_images) write_image(dir / ("recon_" + stem + ".pgm"), rasterize_model(*model, config.grid), lo, hi);
      if (config.export_gram) {
        std::ofstream g(dir / ("gram_" + stem + ".csv"));
        gram(engine, model->selected()).write_csv(g);
      }
    } else if (method == "direct" && config.write_images) {
      const auto& fs = samples.functionals();
      const Eigen::VectorXd b = direct_solve(engine, fs, samples.samples());
      write_image(dir / "recon_direct.pgm", rasterize_expansion(engine, fs, b, config.grid), lo, hi);
    }
    return outcome.row;
  };

  ResultsTable table;
  if (config.parallel_methods) {
    std::vector<std::future<ResultsRow>> jobs;
    for (const std::string& m : config.methods) jobs.push_back(std::async(std::launch::async, run_one, m));
    for (auto& job : jobs) table.rows.push_back(job.get());
  } else {
    for (const std::string& m : config.methods) table.rows.push_back(run_one(m));
  }

  if (write_outputs) {
    nlohmann::json summary;
    summary["config"] = {{"family", to_string(config.kernel.family)},
                         {"alpha", config.kernel.alpha},
                         {"n", config.candidates},
                         {"m", config.iterations},
                         {"seed", config.seed},
                         {"grid", config.grid},
                         {"modified_phantom", config.modified_phantom},
                         {"positive_radii_only", config.positive_radii_only},
                         {"methods", config.methods}};
    if (config.kernel.weight_beta) summary["config"]["beta_weight"] = *config.kernel.weight_beta;
    summary["rows"] = nlohmann::json::array();
    for (const ResultsRow& r : table.rows) summary["rows"].push_back(row_to_json(r));
    std::ofstream js(dir / "summary.json");
    js << summary.dump(2) << '\n';
    std::ofstream csv(dir / "results.csv");
    table.write_csv(csv);
  }
  return table;
}

ResultsTable aggregate_summaries(const std::vector<std::filesystem::path>& summaries) {
  ResultsTable table;
  for (const auto& path : summaries) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open summary " + path.string());
    nlohmann::json j;
    try {
      in >> j;
      for (const auto& row : j.at("rows")) table.rows.push_back(row_from_json(row));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("malformed summary " + path.string() + ": " + e.what());
    }
  }
  return table;
}

}  // namespace kgreedy
