#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjk/grid.hpp"
#include "hjk/hamiltonian.hpp"
#include "hjk/solver.hpp"

namespace hjk {

enum class MeshKind { Uniform, Perturbed, SmoothRandom, Geometric, Embedded };

/// Fine-grid self reference: the problem is solved at n_fine and restricted
/// to coarse grids by node coincidence.
struct ReferenceRecipe {
  int n_fine = 1600;
};

using InitialFn = std::function<double(double x, double y)>;
using ExactFn = std::function<double(double x, double y, double t)>;

struct ProblemSpec {
  std::string name;
  std::string variant;  // empty for the base entry
  std::string description;
  int dimension = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  Boundary bc_x = Boundary::Periodic;
  Boundary bc_y = Boundary::Periodic;
  HamiltonianModel model;
  InitialFn initial;
  double t_final = 1.0;
  int default_n = 80;
  MeshKind mesh = MeshKind::Uniform;
  double mesh_param = 0.0;  // jitter amplitude or cell-size ratio
  std::uint64_t default_seed = 0;
  Indicator inside;          // embedded domains
  BoundaryValue boundary;    // Dirichlet data g(x, y, t); 1D ignores y
  ExactFn exact;
  std::optional<ReferenceRecipe> reference;

  std::string full_name() const { return variant.empty() ? name : name + ":" + variant; }
  bool has_exact() const { return static_cast<bool>(exact); }
};

/// The twelve base problems.
std::vector<ProblemSpec> catalogue();
/// Variant names available for a base problem.
std::vector<std::string> variants(const std::string& name);
/// Looks up "name" or "name:variant"; unknown names raise unknown-problem with
/// the catalogue listed in the message.
ProblemSpec find_problem(const std::string& name);

std::string to_string(Boundary b);
std::string to_string(MeshKind m);

/// Characteristic solution of phi_t + (phi_x + 1)^2 / 2 = 0 with
/// phi(x, 0) = -cos(pi x), valid before the first shock at t = 1/pi^2.
double burgers_exact(double x, double t, double* p_out = nullptr);

/// Grids for a problem at resolution n (cells per direction).
Grid1D problem_axis(const ProblemSpec& p, int axis, int n, std::uint64_t seed);

struct Solution {
  std::string problem;
  int n = 0;
  std::uint64_t seed = 0;
  Grid1D x, y;
  std::vector<char> mask;  // empty means every node is active
  std::vector<double> initial;
  RunResult run;
  // One-sided physical derivatives at the final state; 2D arrays are
  // row-major like the field.
  std::vector<double> dx_minus, dx_plus, dy_minus, dy_plus;
  int merged_nodes = 0;

  const std::vector<double>& field() const { return run.state.field; }
  bool active(size_t k) const { return mask.empty() || mask[k] != 0; }
};

struct SolveOptions {
  int n = 0;                      // 0 uses the problem default
  std::optional<double> t_final;  // overrides the catalogue value
  std::optional<std::uint64_t> seed;
};

Solution solve(const ProblemSpec& p, const SolverParams& params, const SolveOptions& opt = {});

/// Max node-wise difference; the optional mask restricts the comparison.
double error_norm(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<char>& mask = {});

/// Exact solution sampled on the solution's nodes at its final time.
std::vector<double> exact_field(const ProblemSpec& p, const Solution& s);

/// Every n_fine/n-th node of a fine solution.
std::vector<double> restrict_to(const Solution& fine, int n);

/// WENO weights, indicators and filter values at the final state of a 1D run.
std::vector<CellReconstruction> weno_diagnostics(const ProblemSpec& p, const SolverParams& params,
                                                 const Solution& s);

/// sign(phi_y) from the centred average of the one-sided y-derivatives.
std::vector<double> control_sign(const Solution& s);

struct ConvergenceReport {
  std::string problem;
  int order = 3;
  double cfl = 0.5;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> resolutions;
  std::vector<double> errors;
  std::vector<double> orders;     // orders[i] between rows i and i+1
  std::vector<char> saturated;    // both errors zero: order reported as infinite
  std::vector<double> seconds;
};

ConvergenceReport convergence_study(const ProblemSpec& p, const SolverParams& params,
                                    const std::vector<int>& resolutions,
                                    std::optional<std::uint64_t> seed = {});

}  // namespace hjk
