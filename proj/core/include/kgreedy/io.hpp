#pragma once

#include "kgreedy/interpolator.hpp"
#include "kgreedy/kernels.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace kgreedy {

/// Kernel configuration as stored in config files and snapshots.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double alpha = 2000.0;
  std::optional<double> weight_beta = 1.5;
  int dimension = 2;

  Kernel build() const;
};

// Candidate sets: CSV with header `kind,r_or_x1,theta_or_x2,sample`. kind is `radon` or
// `point`; theta_or_x2 is empty for 1-d points; the sample column may be omitted.
void write_candidates_csv(std::ostream& out, const CandidateSet& candidates);
/// Missing samples read as 0.
CandidateSet read_candidates_csv(std::istream& in);
CandidateSet read_candidates_csv(const std::filesystem::path& path);

/// JSON snapshot of a Newton model: kernel, selected functionals with samples,
/// triangular Newton matrix and Newton coefficients.
void save_model(std::ostream& out, const KernelSpec& kernel, const NewtonModel& model);

struct ModelSnapshot {
  KernelSpec kernel;
  std::vector<Functional> selected;
  std::vector<double> samples;
  Eigen::MatrixXd newton;
  Eigen::VectorXd coefficients;
  double breakdown_tolerance = 0.0;
};

ModelSnapshot load_model(std::istream& in);

/// Round-trip formatting for doubles in text outputs.
std::string format_double(double value);

}  // namespace kgreedy
