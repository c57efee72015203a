#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "hjk/grid.hpp"
#include "hjk/hamiltonian.hpp"
#include "hjk/integrate.hpp"
#include "hjk/kernel.hpp"
#include "hjk/weno.hpp"

namespace hjk {

enum class Boundary { Periodic, Dirichlet, Outflow };

struct SolverParams {
  int order = 3;
  double cfl = 0.5;
  double beta = 0.0;  // 0 picks select_beta(order, dimension)
  WenoConfig weno;
  bool filter = true;
  CflRule rule = CflRule::Sum;
  int threads = 1;  // 0 uses every hardware thread
  // Embedded segments: a first or last cell shorter than this fraction of h is
  // merged with its neighbour.
  double merge_fraction = 0.1;
};

/// Dirichlet data g(x, t) for 1D runs.
using BoundaryData1D = std::function<double(double x, double t)>;

struct Problem1D {
  Grid1D grid;
  HamiltonianModel model;
  Boundary bc = Boundary::Periodic;
  BoundaryData1D boundary;
};

struct Problem2D {
  TensorGrid2D grid;
  HamiltonianModel model;
  Boundary bc_x = Boundary::Periodic;  // Periodic or Outflow
  Boundary bc_y = Boundary::Periodic;
};

struct ProblemEmbedded {
  EmbeddedDomain2D domain;
  HamiltonianModel model;
};

struct SolveState {
  std::vector<double> field;
  double time = 0.0;
  int step_count = 0;
};

struct RunDiagnostics {
  double beta = 0.0;
  std::vector<double> dt_history;
  std::vector<double> max_norm_history;
  std::vector<std::array<double, 2>> speed_history;
  int rhs_evaluations = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  SolveState state;
  RunDiagnostics diag;
};

/// Per-node data from one 1D right-hand side evaluation.
struct RhsDetail {
  std::vector<double> minus, plus;  // computational-coordinate derivatives
  std::vector<double> flux;         // numerical Hamiltonian at each node
};

struct RhsDetail2D {
  std::vector<double> px_minus, px_plus, py_minus, py_plus;
  std::vector<double> flux;
};

struct ConservationDiag {
  std::vector<double> phi_cell;  // after the step
  double residual = 0.0;
  double max_flux = 0.0;
  double sum_before = 0.0;  // sum of Phi_i dx_i
  double sum_after = 0.0;
};

/// Runs chunks of [0, n) on up to `threads` workers; each index is handled by
/// exactly one worker, so results do not depend on the thread count.
void parallel_for(int n, int threads, const std::function<void(int, int)>& body);

class Solver1D {
 public:
  Solver1D(Problem1D problem, SolverParams params);

  const Problem1D& problem() const { return problem_; }
  const SolverParams& params() const { return params_; }
  double beta() const { return beta_; }
  const LineKernel& kernel() const { return kernel_; }

  /// Largest |dH~/du| over one-sided differences, computational units.
  std::vector<double> wave_speeds(const std::vector<double>& phi, double t) const;
  std::vector<double> spacing() const { return {problem_.grid.delta_xi}; }
  /// alpha = beta / (c dt) for the step about to be taken.
  void set_step(const std::vector<double>& c, double dt);

  void rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
           RhsDetail* detail = nullptr) const;
  void apply_boundary(std::vector<double>& phi, const StageTime& t) const;
  bool is_active(int) const { return true; }

  RunResult run(std::vector<double> phi0, double t_final);

  /// One forward-Euler step from phi with the step size picked by the CFL rule,
  /// checked against the flux-difference form of the Phi update.
  ConservationDiag euler_conservation(const std::vector<double>& phi, double t, double* dt_out = nullptr);

  /// WENO weights, indicators and filter values of each node's right stencil.
  std::vector<CellReconstruction> weno_diagnostics(const std::vector<double>& phi) const;

 private:
  Problem1D problem_;
  SolverParams params_;
  double beta_;
  LineKernel kernel_;
  std::vector<double> inv_j_;
};

ConservationDiag conservation_check(const Grid1D& grid, const std::vector<double>& before,
                                    const std::vector<double>& after,
                                    const std::vector<double>& flux, double dt,
                                    bool skip_end_cells = false);

class Solver2D {
 public:
  Solver2D(Problem2D problem, SolverParams params);

  const Problem2D& problem() const { return problem_; }
  double beta() const { return beta_; }
  int nx() const { return problem_.grid.x.n_cells; }
  int ny() const { return problem_.grid.y.n_cells; }
  int index(int i, int j) const { return j * (nx() + 1) + i; }

  std::vector<double> wave_speeds(const std::vector<double>& phi, double t) const;
  std::vector<double> spacing() const {
    return {problem_.grid.x.delta_xi, problem_.grid.y.delta_xi};
  }
  void set_step(const std::vector<double>& c, double dt);
  void rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
           RhsDetail2D* detail = nullptr) const;
  void apply_boundary(std::vector<double>& phi, const StageTime& t) const;
  bool is_active(int) const { return true; }

  RunResult run(std::vector<double> phi0, double t_final);

 private:
  Problem2D problem_;
  SolverParams params_;
  double beta_;
  LineKernel kx_, ky_;
  std::vector<double> inv_jx_, inv_jy_;
};

/// Embedded-boundary solver: every segment of interior nodes is a separate
/// non-periodic line closed by Dirichlet data at its intersection points.
class SolverEmbedded {
 public:
  SolverEmbedded(ProblemEmbedded problem, SolverParams params);
  ~SolverEmbedded();
  SolverEmbedded(SolverEmbedded&&) noexcept;

  const ProblemEmbedded& problem() const { return problem_; }
  double beta() const { return beta_; }
  int nx() const { return problem_.domain.nx(); }
  int ny() const { return problem_.domain.ny(); }
  int index(int i, int j) const { return j * (nx() + 1) + i; }
  int segment_count() const;
  int merged_count() const;

  std::vector<double> wave_speeds(const std::vector<double>& phi, double t) const;
  std::vector<double> spacing() const;
  void set_step(const std::vector<double>& c, double dt);
  void rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
           RhsDetail2D* detail = nullptr) const;
  void apply_boundary(std::vector<double>& phi, const StageTime& t) const;
  bool is_active(int k) const { return problem_.domain.inside[k] != 0; }

  RunResult run(std::vector<double> phi0, double t_final);

 private:
  struct Line;
  void line_values(const Line& l, const std::vector<double>& phi, const StageTime& t,
                   std::vector<double>& v) const;
  void line_derivs(const Line& l, const std::vector<double>& phi, const StageTime& t, double* minus,
                   double* plus) const;

  ProblemEmbedded problem_;
  SolverParams params_;
  double beta_;
  std::vector<std::unique_ptr<Line>> lines_;
};

}  // namespace hjk
