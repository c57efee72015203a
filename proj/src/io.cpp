#include "hjk/io.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hjk/error.hpp"

namespace hjk {

using nlohmann::json;

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw Error(ErrorCode::Io, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Io, "not a number: '" + s + "'");
  }
}

std::string expect_header(std::istream& is, const std::string& want) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != want) throw Error(ErrorCode::Io, "unexpected header '" + line + "'");
  return line;
}

json parse_json(std::istream& is) {
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("field '") + key + "': " + e.what());
  }
}

double to_json_number(double v) { return v; }

json order_value(double o) {
  if (std::isfinite(o)) return o;
  return nullptr;
}

}  // namespace

void write_solution_csv(std::ostream& os, const Solution& s) {
  if (!s.y.nodes.empty()) throw Error(ErrorCode::Config, "solution CSV is for 1D runs");
  os << "x,phi,phix_minus,phix_plus\n" << std::setprecision(kDigits);
  const auto& f = s.field();
  for (int i = 0; i < s.x.n_nodes(); ++i)
    os << s.x.nodes[i] << ',' << f[i] << ',' << s.dx_minus[i] << ',' << s.dx_plus[i] << '\n';
}

SolutionTable read_solution_csv(std::istream& is) {
  expect_header(is, "x,phi,phix_minus,phix_plus");
  SolutionTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto c = split_csv(line);
    if (c.size() != 4) throw Error(ErrorCode::Io, "expected 4 columns: '" + line + "'");
    t.x.push_back(parse_double(c[0]));
    t.phi.push_back(parse_double(c[1]));
    t.phix_minus.push_back(parse_double(c[2]));
    t.phix_plus.push_back(parse_double(c[3]));
  }
  return t;
}

void write_field_json(std::ostream& os, const Solution& s) {
  json j;
  j["problem"] = s.problem;
  j["time"] = s.run.state.time;
  j["nx"] = s.x.n_cells;
  j["ny"] = s.y.n_cells;
  j["x"] = s.x.nodes;
  j["y"] = s.y.nodes;
  j["phi"] = s.field();
  if (!s.mask.empty()) {
    std::vector<int> m(s.mask.begin(), s.mask.end());
    j["mask"] = m;
  }
  os << std::setprecision(kDigits) << j.dump() << '\n';
}

void write_field_gnuplot(std::ostream& os, const Solution& s) {
  os << "# x y phi\n" << std::setprecision(kDigits);
  const int sx = s.x.n_nodes();
  for (int j = 0; j < s.y.n_nodes(); ++j) {
    for (int i = 0; i < sx; ++i) {
      size_t k = static_cast<size_t>(j) * sx + i;
      os << s.x.nodes[i] << ' ' << s.y.nodes[j] << ' ';
      if (s.active(k)) os << s.field()[k];
      else os << "NaN";
      os << '\n';
    }
    os << '\n';
  }
}

FieldSnapshot read_field_json(std::istream& is) {
  json j = parse_json(is);
  FieldSnapshot f;
  f.problem = get<std::string>(j, "problem");
  f.time = get<double>(j, "time");
  f.x = get<std::vector<double>>(j, "x");
  f.y = get<std::vector<double>>(j, "y");
  f.phi = get<std::vector<double>>(j, "phi");
  if (f.phi.size() != f.x.size() * f.y.size()) throw Error(ErrorCode::Io, "field size mismatch");
  if (j.contains("mask")) {
    auto m = get<std::vector<int>>(j, "mask");
    if (m.size() != f.phi.size()) throw Error(ErrorCode::Io, "mask size mismatch");
    f.mask.assign(m.begin(), m.end());
  }
  return f;
}

Manifest make_manifest(const ProblemSpec& p, const SolverParams& params, const Solution& s) {
  Manifest m;
  m.problem = p.full_name();
  m.dimension = p.dimension;
  m.n = s.n;
  m.order = params.order;
  m.cfl = params.cfl;
  m.beta = s.run.diag.beta;
  m.lambda_dx = params.weno.lambda_dx;
  m.epsilon = params.weno.epsilon;
  m.filter = params.filter;
  m.cfl_rule = params.rule == CflRule::Sum ? "sum" : "max";
  m.threads = params.threads;
  m.merge_fraction = params.merge_fraction;
  m.seed = s.seed;
  m.mesh = to_string(p.mesh);
  m.mesh_param = p.mesh_param;
  m.bc_x = to_string(p.bc_x);
  m.bc_y = p.dimension == 2 ? to_string(p.bc_y) : "";
  m.t_final = s.run.state.time;
  m.time = s.run.state.time;
  m.steps = s.run.state.step_count;
  m.rhs_evaluations = s.run.diag.rhs_evaluations;
  m.wall_seconds = s.run.diag.wall_seconds;
  m.merged_nodes = s.merged_nodes;
  m.dt_history = s.run.diag.dt_history;
  m.max_norm_history = s.run.diag.max_norm_history;
  return m;
}

void write_manifest(std::ostream& os, const Manifest& m) {
  json j;
  j["problem"] = m.problem;
  j["dimension"] = m.dimension;
  j["n"] = m.n;
  j["order"] = m.order;
  j["cfl"] = m.cfl;
  j["beta"] = m.beta;
  j["lambda_dx"] = m.lambda_dx;
  j["epsilon"] = m.epsilon;
  j["filter"] = m.filter;
  j["cfl_rule"] = m.cfl_rule;
  j["threads"] = m.threads;
  j["merge_fraction"] = m.merge_fraction;
  j["seed"] = m.seed;
  j["mesh"] = m.mesh;
  j["mesh_param"] = m.mesh_param;
  j["bc_x"] = m.bc_x;
  j["bc_y"] = m.bc_y;
  j["t_final"] = m.t_final;
  j["time"] = m.time;
  j["steps"] = m.steps;
  j["rhs_evaluations"] = m.rhs_evaluations;
  j["wall_seconds"] = m.wall_seconds;
  j["merged_nodes"] = m.merged_nodes;
  j["dt_history"] = m.dt_history;
  j["max_norm_history"] = m.max_norm_history;
  os << std::setprecision(kDigits) << j.dump(2) << '\n';
}

Manifest read_manifest(std::istream& is) {
  json j = parse_json(is);
  Manifest m;
  m.problem = get<std::string>(j, "problem");
  m.dimension = get<int>(j, "dimension");
  m.n = get<int>(j, "n");
  m.order = get<int>(j, "order");
  m.cfl = get<double>(j, "cfl");
  m.beta = get<double>(j, "beta");
  m.lambda_dx = get<double>(j, "lambda_dx");
  m.epsilon = get<double>(j, "epsilon");
  m.filter = get<bool>(j, "filter");
  m.cfl_rule = get<std::string>(j, "cfl_rule");
  m.threads = get<int>(j, "threads");
  m.merge_fraction = get<double>(j, "merge_fraction");
  m.seed = get<std::uint64_t>(j, "seed");
  m.mesh = get<std::string>(j, "mesh");
  m.mesh_param = get<double>(j, "mesh_param");
  m.bc_x = get<std::string>(j, "bc_x");
  m.bc_y = get<std::string>(j, "bc_y");
  m.t_final = get<double>(j, "t_final");
  m.time = get<double>(j, "time");
  m.steps = get<int>(j, "steps");
  m.rhs_evaluations = get<int>(j, "rhs_evaluations");
  m.wall_seconds = get<double>(j, "wall_seconds");
  m.merged_nodes = get<int>(j, "merged_nodes");
  m.dt_history = get<std::vector<double>>(j, "dt_history");
  m.max_norm_history = get<std::vector<double>>(j, "max_norm_history");
  return m;
}

SolverParams params_from_manifest(const Manifest& m) {
  SolverParams p;
  p.order = m.order;
  p.cfl = m.cfl;
  p.beta = m.beta;
  p.weno.lambda_dx = m.lambda_dx;
  p.weno.epsilon = m.epsilon;
  p.filter = m.filter;
  if (m.cfl_rule == "sum") p.rule = CflRule::Sum;
  else if (m.cfl_rule == "max") p.rule = CflRule::Max;
  else throw Error(ErrorCode::Io, "unknown cfl_rule '" + m.cfl_rule + "'");
  p.threads = m.threads;
  p.merge_fraction = m.merge_fraction;
  return p;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "N,error,order\n" << std::setprecision(kDigits);
  for (size_t i = 0; i < r.resolutions.size(); ++i) {
    os << r.resolutions[i] << ',' << r.errors[i] << ',';
    if (i > 0) {
      double o = r.orders[i - 1];
      if (std::isfinite(o)) os << o;
      else os << "inf";
    }
    os << '\n';
  }
}

ConvergenceReport read_report_csv(std::istream& is) {
  expect_header(is, "N,error,order");
  ConvergenceReport r;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto c = split_csv(line);
    if (c.size() != 3) throw Error(ErrorCode::Io, "expected 3 columns: '" + line + "'");
    r.resolutions.push_back(static_cast<int>(parse_double(c[0])));
    r.errors.push_back(parse_double(c[1]));
    if (r.resolutions.size() > 1) {
      double o = parse_double(c[2]);
      r.orders.push_back(o);
      r.saturated.push_back(std::isinf(o) ? 1 : 0);
    } else if (!c[2].empty()) {
      throw Error(ErrorCode::Io, "first row must not carry an order");
    }
  }
  return r;
}

void write_report_json(std::ostream& os, const ConvergenceReport& r) {
  json j;
  j["problem"] = r.problem;
  j["order"] = r.order;
  j["cfl"] = r.cfl;
  j["beta"] = r.beta;
  j["seed"] = r.seed;
  json rows = json::array();
  for (size_t i = 0; i < r.resolutions.size(); ++i) {
    json row;
    row["N"] = r.resolutions[i];
    row["error"] = to_json_number(r.errors[i]);
    row["order"] = i > 0 ? order_value(r.orders[i - 1]) : json(nullptr);
    row["saturated"] = i > 0 && r.saturated[i - 1] != 0;
    row["seconds"] = i < r.seconds.size() ? r.seconds[i] : 0.0;
    rows.push_back(row);
  }
  j["rows"] = rows;
  os << std::setprecision(kDigits) << j.dump(2) << '\n';
}

ConvergenceReport read_report_json(std::istream& is) {
  json j = parse_json(is);
  ConvergenceReport r;
  r.problem = get<std::string>(j, "problem");
  r.order = get<int>(j, "order");
  r.cfl = get<double>(j, "cfl");
  r.beta = get<double>(j, "beta");
  r.seed = get<std::uint64_t>(j, "seed");
  const json& rows = j.at("rows");
  for (size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    r.resolutions.push_back(get<int>(row, "N"));
    r.errors.push_back(get<double>(row, "error"));
    r.seconds.push_back(get<double>(row, "seconds"));
    if (i == 0) continue;
    bool sat = get<bool>(row, "saturated");
    r.saturated.push_back(sat ? 1 : 0);
    r.orders.push_back(row.at("order").is_null() ? std::numeric_limits<double>::infinity()
                                                 : get<double>(row, "order"));
  }
  return r;
}

void print_report(std::ostream& os, const ConvergenceReport& r) {
  os << r.problem << "  k=" << r.order << "  CFL=" << r.cfl << "  beta=" << r.beta << '\n';
  os << std::setw(8) << "N" << std::setw(14) << "error" << std::setw(10) << "order" << '\n';
  for (size_t i = 0; i < r.resolutions.size(); ++i) {
    os << std::setw(8) << r.resolutions[i] << std::setw(14) << std::scientific
       << std::setprecision(2) << r.errors[i] << std::defaultfloat;
    if (i == 0) {
      os << std::setw(10) << "--";
    } else if (r.saturated[i - 1]) {
      os << std::setw(10) << "inf";
    } else {
      os << std::setw(10) << std::fixed << std::setprecision(3) << r.orders[i - 1]
         << std::defaultfloat;
    }
    os << '\n';
  }
  os << std::setprecision(6);
}

void write_weno_csv(std::ostream& os, const Grid1D& grid,
                    const std::vector<CellReconstruction>& cells) {
  os << "i,x,beta0,beta1,beta2,tau,omega0,omega1,omega2,theta,sigma\n"
     << std::setprecision(kDigits);
  for (size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    os << i << ',' << grid.nodes[i] << ',' << c.beta[0] << ',' << c.beta[1] << ',' << c.beta[2]
       << ',' << c.tau << ',' << c.omega[0] << ',' << c.omega[1] << ',' << c.omega[2] << ','
       << c.theta << ',' << c.sigma << '\n';
  }
}

void write_catalogue_json(std::ostream& os, const std::vector<ProblemSpec>& problems) {
  json arr = json::array();
  for (const auto& p : problems) {
    json j;
    j["name"] = p.full_name();
    j["description"] = p.description;
    j["dimension"] = p.dimension;
    j["bc_x"] = to_string(p.bc_x);
    if (p.dimension == 2) j["bc_y"] = to_string(p.bc_y);
    j["domain"] = p.dimension == 2 ? json{p.x_lo, p.x_hi, p.y_lo, p.y_hi} : json{p.x_lo, p.x_hi};
    j["t_final"] = p.t_final;
    j["default_n"] = p.default_n;
    j["mesh"] = to_string(p.mesh);
    j["exact"] = p.has_exact();
    j["reference_n"] = p.reference ? json(p.reference->n_fine) : json(nullptr);
    j["variants"] = variants(p.name);
    arr.push_back(j);
  }
  os << std::setprecision(kDigits) << arr.dump(2) << '\n';
}

}  // namespace hjk
