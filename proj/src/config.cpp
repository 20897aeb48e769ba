#include "nlbiharm/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error(key + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error(key + ": expected an integer, got '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw config_error(key + ": empty list");
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_stream(in);
}

Config Config::parse_stream(std::istream& is) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected 'section.key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) {
      throw config_error(key + ": missing value");
    }

    if (key == "domain.shape") c.domain_shape = value;
    else if (key == "domain.x0") c.domain_x0 = to_double(key, value);
    else if (key == "domain.y0") c.domain_y0 = to_double(key, value);
    else if (key == "domain.x1") c.domain_x1 = to_double(key, value);
    else if (key == "domain.y1") c.domain_y1 = to_double(key, value);
    else if (key == "domain.cx") c.domain_cx = to_double(key, value);
    else if (key == "domain.cy") c.domain_cy = to_double(key, value);
    else if (key == "domain.radius") c.domain_radius = to_double(key, value);
    else if (key == "kernel.family") c.kernel_family = value;
    else if (key == "kernel.delta") c.kernel_delta = to_double(key, value);
    else if (key == "kernel.dim") c.kernel_dim = to_int(key, value);
    else if (key == "grid.m") c.grid_m = to_int(key, value);
    else if (key == "grid.h") c.grid_h = to_double(key, value);
    else if (key == "problem.kind") c.problem_kind = value;
    else if (key == "problem.forcing") c.problem_forcing = value;
    else if (key == "problem.collar") c.problem_collar = value;
    else if (key == "solver.tol") c.solver_tol = to_double(key, value);
    else if (key == "solver.max_iter") c.solver_max_iter = to_int(key, value);
    else if (key == "solver.preconditioner") c.solver_preconditioner = value;
    else if (key == "study.kind") c.study_kind = value;
    else if (key == "study.case") c.study_case = value;
    else if (key == "study.deltas") c.study_deltas = to_list(key, value);
    else if (key == "study.m") c.study_m = to_int(key, value);
    else if (key == "output.csv") c.output_csv = value;
    else if (key == "output.node_dump") c.output_node_dump = value;
    else throw config_error("unknown config key '" + key + "'");
  }
  return c;
}

void Config::echo(std::ostream& os) const {
  os << "domain.shape = " << domain_shape << '\n';
  if (domain_shape == "rectangle") {
    os << "domain.x0 = " << domain_x0 << '\n'
       << "domain.y0 = " << domain_y0 << '\n'
       << "domain.x1 = " << domain_x1 << '\n'
       << "domain.y1 = " << domain_y1 << '\n';
  } else {
    os << "domain.cx = " << domain_cx << '\n'
       << "domain.cy = " << domain_cy << '\n'
       << "domain.radius = " << domain_radius << '\n';
  }
  os << "kernel.family = " << kernel_family << '\n'
     << "kernel.delta = " << kernel_delta << '\n'
     << "kernel.dim = " << kernel_dim << '\n';
  if (grid_m) os << "grid.m = " << *grid_m << '\n';
  if (grid_h) os << "grid.h = " << *grid_h << '\n';
  if (!grid_m && !grid_h) os << "grid.m = 6  # default\n";
  os << "problem.kind = " << problem_kind << '\n'
     << "problem.forcing = " << problem_forcing << '\n'
     << "problem.collar = " << problem_collar << '\n'
     << "solver.tol = " << solver_tol << '\n'
     << "solver.max_iter = " << solver_max_iter << '\n'
     << "solver.preconditioner = " << solver_preconditioner << '\n';
  if (!study_kind.empty()) {
    os << "study.kind = " << study_kind << '\n'
       << "study.case = " << study_case << '\n';
    os << "study.deltas =";
    for (std::size_t i = 0; i < study_deltas.size(); ++i) {
      os << (i ? "," : " ") << study_deltas[i];
    }
    os << '\n';
    if (study_m) os << "study.m = " << *study_m << '\n';
  }
  if (!output_csv.empty()) os << "output.csv = " << output_csv << '\n';
  if (!output_node_dump.empty()) {
    os << "output.node_dump = " << output_node_dump << '\n';
  }
}

Domain Config::domain() const {
  if (domain_shape == "rectangle") {
    return Domain::rectangle(domain_x0, domain_y0, domain_x1, domain_y1);
  }
  if (domain_shape == "disk") {
    return Domain::disk(domain_cx, domain_cy, domain_radius);
  }
  throw config_error("domain.shape must be rectangle or disk");
}

KernelSpec Config::kernel() const {
  return KernelSpec::make(parse_kernel_family(kernel_family), kernel_delta,
                          kernel_dim);
}

double Config::resolved_h() const {
  if (grid_m && grid_h) {
    throw config_error("set grid.m or grid.h, not both");
  }
  if (grid_h) {
    if (!(*grid_h > 0)) throw config_error("grid.h must be > 0");
    return *grid_h;
  }
  const int m = grid_m.value_or(6);
  if (m < 3) throw config_error("grid.m must be >= 3");
  return kernel_delta / m;
}

ProblemKind Config::kind() const { return parse_problem_kind(problem_kind); }

CollarWidth Config::collar() const {
  if (problem_collar == "one_delta") return CollarWidth::one_delta;
  if (problem_collar == "two_delta") return CollarWidth::two_delta;
  throw config_error("problem.collar must be one_delta or two_delta");
}

SolverOptions Config::solver_options() const {
  SolverOptions opts;
  opts.tol = solver_tol;
  opts.max_iter = solver_max_iter;
  if (solver_preconditioner == "jacobi") {
    opts.jacobi = true;
  } else if (solver_preconditioner != "none") {
    throw config_error("solver.preconditioner must be none or jacobi");
  }
  return opts;
}

Field Config::forcing(std::shared_ptr<const Discretization> disc) const {
  const std::string& spec = problem_forcing;
  if (spec == "zero") return Field(disc);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "constant") {
    if (arg.empty()) throw config_error("forcing constant:<value> needs a value");
    Field f(disc);
    f.values.setConstant(to_double("problem.forcing", arg));
    return f;
  }
  if (head == "lap_of") {
    return sample(disc, ManufacturedCase::by_name(arg).lap_u);
  }
  if (head == "bilap_of") {
    return sample(disc, ManufacturedCase::by_name(arg).bilap_u);
  }
  throw config_error(
      "problem.forcing must be zero, constant:<v>, lap_of:<case> or "
      "bilap_of:<case>");
}

}  // namespace nlbiharm
