#pragma once

#include "kgreedy/greedy.hpp"
#include "kgreedy/io.hpp"
#include "kgreedy/radon_data.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgreedy {

struct ExperimentConfig {
  KernelSpec kernel{};
  bool modified_phantom = false;
  std::size_t candidates = 2000;   ///< N
  std::size_t iterations = 300;    ///< M
  std::uint64_t seed = 42;
  bool positive_radii_only = false;
  std::vector<std::string> methods{"p", "h", "f", "fp", "psr", "random"};
  int grid = 64;                   ///< G for the reconstruction error
  std::filesystem::path output_dir = "kgreedy_out";
  double residual_tolerance = 0.0;
  double fill_tolerance = 0.0;
  std::optional<double> breakdown_tolerance;
  /// Largest N for which the `direct` method (no thinning) is attempted.
  std::size_t direct_cap = 3000;
  bool parallel_methods = false;
  bool record_timings = false;
  bool export_gram = false;
  bool write_images = true;

  /// Throws InvalidArgument: M <= N, G >= 8, non-empty method list, known methods.
  void validate() const;

  /// Applies `key = value` pairs; unknown keys throw InvalidArgument.
  void apply(const std::map<std::string, std::string>& values);
};

/// Flat key-value document: `key = value` per line, `#` starts a comment.
std::map<std::string, std::string> parse_key_values(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultsRow {
  std::string method;
  double msr = 0.0;
  double msi = 0.0;
  double condition = 0.0;
  std::size_t selected = 0;
  double seconds = 0.0;
  /// MSI is zero by construction (direct solve on the full set).
  bool msi_by_construction = false;
  std::string stop_reason;
  std::string error;  ///< non-empty when the method failed

  bool ok() const noexcept { return error.empty(); }
};

struct ResultsTable {
  std::vector<ResultsRow> rows;

  const ResultsRow* find(const std::string& method) const;
  /// method,msr,msi,cond,selected,seconds,status
  void write_csv(std::ostream& out) const;
};

/// (1/N) sum over Gamma of squared residuals.
double compute_msi(const NewtonModel& model);
/// Mean over the G x G cell-center grid on [-1, 1]^2 of (f - s)^2.
double compute_msr(const NewtonModel& model, const EllipsePhantom& phantom, int grid);
/// s_n on the G x G grid, same layout as EllipsePhantom::rasterize.
Eigen::MatrixXd rasterize_model(const NewtonModel& model, int grid);

struct MethodOutcome {
  ResultsRow row;
  GreedyTrace trace;
};

/// One method on an existing sample set. Writes nothing.
MethodOutcome run_method(const std::string& method, const ExperimentConfig& config,
                         const PairingEngine& engine, const CandidateSet& samples,
                         const EllipsePhantom& phantom, std::optional<NewtonModel>* model_out = nullptr);

/// Generates samples, runs every method and writes traces, images, snapshots and
/// summary.json under config.output_dir (when write_outputs is set).
ResultsTable run_experiment(const ExperimentConfig& config, bool write_outputs = true);

/// Reads `summary.json` files and concatenates their rows.
ResultsTable aggregate_summaries(const std::vector<std::filesystem::path>& summaries);

}  // namespace kgreedy
