#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hjk/problems.hpp"
#include "hjk/weno.hpp"

namespace hjk {

/// Columns x, phi, phix_minus, phix_plus (physical derivatives).
void write_solution_csv(std::ostream& os, const Solution& s);

struct SolutionTable {
  std::vector<double> x, phi, phix_minus, phix_plus;
};
SolutionTable read_solution_csv(std::istream& is);

/// 2D snapshot: axes, row-major phi (x fastest), mask and final time.
void write_field_json(std::ostream& os, const Solution& s);
/// Blank-line separated "x y phi" blocks for gnuplot's splot; inactive nodes
/// are written as NaN.
void write_field_gnuplot(std::ostream& os, const Solution& s);

struct FieldSnapshot {
  std::string problem;
  double time = 0.0;
  std::vector<double> x, y, phi;
  std::vector<char> mask;
};
FieldSnapshot read_field_json(std::istream& is);

/// Everything needed to repeat a run.
struct Manifest {
  std::string problem;
  int dimension = 1;
  int n = 0;
  int order = 3;
  double cfl = 0.5;
  double beta = 0.0;
  double lambda_dx = 1.0;
  double epsilon = 1e-6;
  bool filter = true;
  std::string cfl_rule = "sum";
  int threads = 1;
  double merge_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string mesh;
  double mesh_param = 0.0;
  std::string bc_x, bc_y;
  double t_final = 0.0;
  double time = 0.0;
  int steps = 0;
  int rhs_evaluations = 0;
  double wall_seconds = 0.0;
  int merged_nodes = 0;
  std::vector<double> dt_history;
  std::vector<double> max_norm_history;
};

Manifest make_manifest(const ProblemSpec& p, const SolverParams& params, const Solution& s);
void write_manifest(std::ostream& os, const Manifest& m);
Manifest read_manifest(std::istream& is);
/// Solver parameters recorded in a manifest.
SolverParams params_from_manifest(const Manifest& m);

/// Columns N, error, order; the first row has an empty order.
void write_report_csv(std::ostream& os, const ConvergenceReport& r);
ConvergenceReport read_report_csv(std::istream& is);
void write_report_json(std::ostream& os, const ConvergenceReport& r);
ConvergenceReport read_report_json(std::istream& is);
/// Fixed-width table for terminals.
void print_report(std::ostream& os, const ConvergenceReport& r);

/// Per node i: x, beta0..2, tau, omega0..2, theta, sigma.
void write_weno_csv(std::ostream& os, const Grid1D& grid,
                    const std::vector<CellReconstruction>& cells);

/// Catalogue as JSON (one object per problem, variants listed).
void write_catalogue_json(std::ostream& os, const std::vector<ProblemSpec>& problems);

}  // namespace hjk
