#include "kgreedy/io.hpp"

#include "kgreedy/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kgreedy {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Kernel KernelSpec::build() const {
  std::optional<GaussianWeight> weight;
  if (weight_beta) weight = GaussianWeight(*weight_beta);
  return Kernel(family, alpha, dimension, weight);
}

void write_candidates_csv(std::ostream& out, const CandidateSet& candidates) {
  out << "kind,r_or_x1,theta_or_x2,sample\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Functional& f = candidates.functional(i);
    if (f.is_radon()) {
      out << "radon," << format_double(f.as_radon().r) << ',' << format_double(f.as_radon().theta);
    } else {
      const Point& x = f.as_point().x;
      out << "point," << format_double(x[0]) << ',' << (x.size() > 1 ? format_double(x[1]) : std::string());
    }
    out << ',' << format_double(candidates.sample(i)) << '\n';
  }
}

CandidateSet read_candidates_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Functional> functionals;
  std::vector<double> samples;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 3 || fields[0] != "kind" || fields[1] != "r_or_x1" || fields[2] != "theta_or_x2" ||
          (fields.size() > 3 && fields[3] != "sample")) {
        throw InvalidArgument("candidate CSV must start with header kind,r_or_x1,theta_or_x2[,sample]");
      }
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected 3 or 4 fields");
    }
    const std::string& kind = fields[0];
    if (kind == "radon") {
      functionals.push_back(Functional::radon(parse_double(fields[1], line_no), parse_double(fields[2], line_no)));
    } else if (kind == "point") {
      const double x1 = parse_double(fields[1], line_no);
      functionals.push_back(Functional::point(fields[2].empty() ? make_point(x1)
                                                                : make_point(x1, parse_double(fields[2], line_no))));
    } else {
      throw InvalidArgument("line " + std::to_string(line_no) + ": unknown functional kind '" + kind + "'");
    }
    samples.push_back(fields.size() == 4 && !fields[3].empty() ? parse_double(fields[3], line_no) : 0.0);
  }
  if (!header_seen) throw InvalidArgument("candidate CSV is empty");
  return CandidateSet(std::move(functionals), std::move(samples));
}

CandidateSet read_candidates_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_candidates_csv(in);
}

void save_model(std::ostream& out, const KernelSpec& kernel, const NewtonModel& model) {
  using nlohmann::json;
  json j;
  j["format"] = "kgreedy-model";
  j["version"] = 1;
  j["kernel"] = {{"family", to_string(kernel.family)}, {"alpha", kernel.alpha}, {"dimension", kernel.dimension}};
  if (kernel.weight_beta) j["kernel"]["weight_beta"] = *kernel.weight_beta;
  j["breakdown_tolerance"] = model.breakdown_tolerance();

  json selected = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Functional& f = model.selected()[i];
    json item;
    if (f.is_radon()) {
      item = {{"kind", "radon"}, {"r", f.as_radon().r}, {"theta", f.as_radon().theta}};
    } else {
      std::vector<double> x(f.as_point().x.data(), f.as_point().x.data() + f.as_point().x.size());
      item = {{"kind", "point"}, {"x", x}};
    }
    item["sample"] = model.selected_samples()[i];
    selected.push_back(item);
  }
  j["selected"] = selected;

  const Eigen::MatrixXd newton = model.newton_matrix();
  json rows = json::array();
  for (Eigen::Index r = 0; r < newton.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(r + 1));
    for (Eigen::Index c = 0; c <= r; ++c) row[static_cast<std::size_t>(c)] = newton(r, c);
    rows.push_back(row);
  }
  j["newton_lower"] = rows;
  const auto c = model.newton_coefficients();
  j["coefficients"] = std::vector<double>(c.data(), c.data() + c.size());
  out << j.dump() << '\n';
}

ModelSnapshot load_model(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model snapshot is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "kgreedy-model") throw InvalidArgument("not a kgreedy model snapshot");
    if (j.at("version").get<int>() != 1) throw InvalidArgument("unsupported model snapshot version");
    ModelSnapshot snap;
    const json& k = j.at("kernel");
    snap.kernel.family = parse_kernel_family(k.at("family").get<std::string>());
    snap.kernel.alpha = k.at("alpha").get<double>();
    snap.kernel.dimension = k.at("dimension").get<int>();
    if (k.contains("weight_beta")) {
      snap.kernel.weight_beta = k.at("weight_beta").get<double>();
    } else {
      snap.kernel.weight_beta.reset();
    }
    snap.breakdown_tolerance = j.at("breakdown_tolerance").get<double>();
    for (const json& item : j.at("selected")) {
      const std::string kind = item.at("kind").get<std::string>();
      if (kind == "radon") {
        snap.selected.push_back(Functional::radon(item.at("r").get<double>(), item.at("theta").get<double>()));
      } else if (kind == "point") {
        const auto x = item.at("x").get<std::vector<double>>();
        if (x.size() == 1) {
          snap.selected.push_back(Functional::point(make_point(x[0])));
        } else if (x.size() == 2) {
          snap.selected.push_back(Functional::point(make_point(x[0], x[1])));
        } else {
          throw InvalidArgument("point functional must have 1 or 2 coordinates");
        }
      } else {
        throw InvalidArgument("unknown functional kind '" + kind + "' in snapshot");
      }
      snap.samples.push_back(item.at("sample").get<double>());
    }
    const auto n = static_cast<Eigen::Index>(snap.selected.size());
    const auto& rows = j.at("newton_lower");
    if (static_cast<Eigen::Index>(rows.size()) != n) throw InvalidArgument("snapshot Newton matrix has wrong size");
    snap.newton = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != r + 1) throw InvalidArgument("snapshot Newton row has wrong length");
      for (Eigen::Index c = 0; c <= r; ++c) snap.newton(r, c) = row[static_cast<std::size_t>(c)];
    }
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(coeffs.size()) != n) throw InvalidArgument("snapshot coefficients have wrong size");
    snap.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), n);
    return snap;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed model snapshot: ") + e.what());
  }
}

}  // namespace kgreedy
