#include "hjk/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "hjk/error.hpp"

namespace hjk {

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
  if (n <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    int lo = static_cast<int>(static_cast<long long>(n) * w / threads);
    int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / threads);
    pool.emplace_back([&, lo, hi, w] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

double resolve_beta(const SolverParams& p, int dim) {
  if (p.order < 1 || p.order > 3) throw Error(ErrorCode::InvalidOrder, "order must be 1, 2 or 3");
  if (!(p.cfl > 0.0)) throw Error(ErrorCode::InvalidParameter, "CFL must be positive");
  if (p.beta < 0.0 || !std::isfinite(p.beta))
    throw Error(ErrorCode::InvalidParameter, "beta must be positive");
  return p.beta > 0.0 ? p.beta : select_beta(p.order, dim);
}

std::vector<double> inverse(const std::vector<double>& j) {
  std::vector<double> r(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!(j[i] > 0.0)) throw Error(ErrorCode::DegenerateMapping, "nonpositive jacobian");
    r[i] = 1.0 / j[i];
  }
  return r;
}

double alpha_for(double beta, double c, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "time step must be positive");
  return beta / (std::max(c, kMinSpeed) * dt);
}

std::string history_tail(const std::vector<double>& h) {
  std::ostringstream os;
  os.precision(6);
  size_t from = h.size() > 10 ? h.size() - 10 : 0;
  for (size_t i = from; i < h.size(); ++i) os << (i > from ? ", " : "") << h[i];
  return os.str();
}

// Shared time loop for the three solver kinds.
template <class S>
RunResult run_loop(S& s, std::vector<double> phi, double t_final, const SolverParams& p,
                   double beta) {
  auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.diag.beta = beta;
  TimeController tc(p.cfl, t_final, p.rule);
  s.apply_boundary(phi, 0.0);
  int evals = 0;
  RhsFn f = [&](const std::vector<double>& u, const StageTime& t, std::vector<double>& out) {
    ++evals;
    s.rhs(u, t, out);
  };
  StageFn g = [&](std::vector<double>& u, const StageTime& t) { s.apply_boundary(u, t); };
  double norm0 = 0.0;
  for (size_t k = 0; k < phi.size(); ++k)
    if (s.is_active(static_cast<int>(k)) && std::isfinite(phi[k]))
      norm0 = std::max(norm0, std::abs(phi[k]));
  // Growth far beyond anything a viscosity solution can do; stops runs whose
  // speeds blow up and would otherwise shrink the step without bound.
  const double runaway = 1e12 * std::max(1.0, norm0);
  int steps = 0;
  while (!tc.done()) {
    auto c = s.wave_speeds(phi, tc.t());
    for (double v : c)
      if (!std::isfinite(v))
        throw Error(ErrorCode::Divergence,
                    "non-finite wave speed at step " + std::to_string(steps) +
                        "; max-norm history: " + history_tail(r.diag.max_norm_history));
    double dt = tc.next_dt(s.spacing(), c);
    if (!(dt > 0.0)) break;
    s.set_step(tc.c_max(), dt);
    ssp_rk_step(phi, tc.t(), dt, p.order, f, g);
    tc.advance();
    ++steps;
    double norm = 0.0;
    bool finite = true;
    for (size_t k = 0; k < phi.size(); ++k) {
      if (!s.is_active(static_cast<int>(k))) continue;
      if (!std::isfinite(phi[k])) {
        finite = false;
        break;
      }
      norm = std::max(norm, std::abs(phi[k]));
    }
    if (!finite || norm > runaway) {
      std::ostringstream os;
      os << (finite ? "runaway growth" : "non-finite solution") << " at step " << steps << " (t = " << tc.t()
         << "); max-norm history: " << history_tail(r.diag.max_norm_history);
      throw Error(ErrorCode::Divergence, os.str());
    }
    r.diag.dt_history.push_back(dt);
    r.diag.max_norm_history.push_back(norm);
    const auto& cm = tc.c_max();
    r.diag.speed_history.push_back({cm[0], cm.size() > 1 ? cm[1] : 0.0});
  }
  r.state.field = std::move(phi);
  r.state.time = tc.t();
  r.state.step_count = steps;
  r.diag.rhs_evaluations = evals;
  r.diag.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// 1D

Solver1D::Solver1D(Problem1D problem, SolverParams params)
    : problem_(std::move(problem)),
      params_(params),
      beta_(resolve_beta(params_, 1)),
      kernel_(LineGeometry::uniform(problem_.grid.n_cells, problem_.grid.delta_xi,
                                    problem_.grid.periodic),
              params_.weno) {
  const auto& g = problem_.grid;
  if (g.n_cells < 8) throw Error(ErrorCode::InvalidParameter, "need at least 8 cells");
  if (g.periodic != (problem_.bc == Boundary::Periodic))
    throw Error(ErrorCode::Config, "grid periodicity does not match the boundary condition");
  if (problem_.bc == Boundary::Dirichlet && !problem_.boundary)
    throw Error(ErrorCode::Config, "Dirichlet boundary needs boundary data");
  if (!problem_.model.h || !problem_.model.speed)
    throw Error(ErrorCode::Config, "model is incomplete");
  inv_j_ = inverse(g.jacobian);
}

std::vector<double> Solver1D::wave_speeds(const std::vector<double>& phi, double t) const {
  const auto& g = problem_.grid;
  const int n = g.n_cells;
  const double h = g.delta_xi;
  double c = 0.0;
  for (int i = 0; i <= n; ++i) {
    double dm, dp;
    if (g.periodic) {
      int a = i == 0 ? n - 1 : i - 1;
      int b = i == n ? 1 : i + 1;
      dm = (phi[i] - phi[a]) / h;
      dp = (phi[b] - phi[i]) / h;
    } else {
      dm = i > 0 ? (phi[i] - phi[i - 1]) / h : (phi[1] - phi[0]) / h;
      dp = i < n ? (phi[i + 1] - phi[i]) / h : dm;
    }
    Point pt{g.nodes[i], 0.0, t};
    c = std::max(c, local_speed_1d(problem_.model, dm, dp, pt, inv_j_[i]));
  }
  return {c};
}

void Solver1D::set_step(const std::vector<double>& c, double dt) {
  kernel_.set_alpha(alpha_for(beta_, c.at(0), dt));
}

void Solver1D::rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
                   RhsDetail* detail) const {
  const auto& g = problem_.grid;
  const int n = g.n_cells;
  if (static_cast<int>(phi.size()) != n + 1) throw Error(ErrorCode::Shape, "field length");
  BiasedDerivatives d;
  if (g.periodic) {
    d = kernel_.biased(phi, params_.order, nullptr, params_.filter);
  } else {
    LineGeometry geom = LineGeometry::uniform(n, g.delta_xi, false);
    BoundaryDerivs bd = boundary_derivatives(geom, phi.data(), params_.order, kernel_.boundary_spacing());
    d = kernel_.biased(phi, params_.order, &bd, params_.filter);
  }
  out.resize(n + 1);
  if (detail) detail->flux.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    Point pt{g.nodes[i], 0.0, t};
    double um = d.minus[i], up = d.plus[i];
    double a = local_speed_1d(problem_.model, um, up, pt, inv_j_[i]);
    double fl = llf_flux_1d(problem_.model, um, up, a, pt, inv_j_[i]);
    out[i] = -fl;
    if (detail) detail->flux[i] = fl;
  }
  if (problem_.bc == Boundary::Dirichlet) out[0] = out[n] = 0.0;
  if (g.periodic) out[n] = out[0];
  if (detail) {
    detail->minus = std::move(d.minus);
    detail->plus = std::move(d.plus);
  }
}

void Solver1D::apply_boundary(std::vector<double>& phi, const StageTime& t) const {
  const auto& g = problem_.grid;
  const int n = g.n_cells;
  if (problem_.bc == Boundary::Periodic) {
    phi[n] = phi[0];
  } else if (problem_.bc == Boundary::Dirichlet) {
    const auto& data = problem_.boundary;
    phi[0] = t.sample([&](double s) { return data(g.nodes[0], s); });
    phi[n] = t.sample([&](double s) { return data(g.nodes[n], s); });
  }
}

RunResult Solver1D::run(std::vector<double> phi0, double t_final) {
  if (static_cast<int>(phi0.size()) != problem_.grid.n_nodes())
    throw Error(ErrorCode::Shape, "initial field length");
  return run_loop(*this, std::move(phi0), t_final, params_, beta_);
}

ConservationDiag conservation_check(const Grid1D& grid, const std::vector<double>& before,
                                    const std::vector<double>& after,
                                    const std::vector<double>& flux, double dt,
                                    bool skip_end_cells) {
  const int n = grid.n_cells;
  if (static_cast<int>(before.size()) != n + 1 || after.size() != before.size() ||
      flux.size() != before.size())
    throw Error(ErrorCode::Shape, "conservation check needs node arrays of equal length");
  ConservationDiag d;
  d.phi_cell.resize(n);
  for (double f : flux) d.max_flux = std::max(d.max_flux, std::abs(f));
  for (int i = 0; i < n; ++i) {
    double dx = grid.cell_width(i);
    double p0 = (before[i + 1] - before[i]) / dx;
    double p1 = (after[i + 1] - after[i]) / dx;
    d.phi_cell[i] = p1;
    d.sum_before += p0 * dx;
    d.sum_after += p1 * dx;
    if (skip_end_cells && (i == 0 || i == n - 1)) continue;
    double r = (p1 - p0) / dt + (flux[i + 1] - flux[i]) / dx;
    d.residual = std::max(d.residual, std::abs(r));
  }
  return d;
}

ConservationDiag Solver1D::euler_conservation(const std::vector<double>& phi, double t,
                                              double* dt_out) {
  auto c = wave_speeds(phi, t);
  c[0] = std::max(c[0], kMinSpeed);
  double dt = cfl_dt(params_.cfl, spacing(), c, params_.rule);
  set_step(c, dt);
  RhsDetail det;
  std::vector<double> l;
  rhs(phi, t, l, &det);
  std::vector<double> after(phi.size());
  for (size_t i = 0; i < phi.size(); ++i) after[i] = phi[i] + dt * l[i];
  if (dt_out) *dt_out = dt;
  return conservation_check(problem_.grid, phi, after, det.flux, dt,
                            problem_.bc == Boundary::Dirichlet);
}

std::vector<CellReconstruction> Solver1D::weno_diagnostics(const std::vector<double>& phi) const {
  const int n = problem_.grid.n_cells;
  std::vector<CellReconstruction> out(n + 1);
  double w[6];
  for (int i = 1; i <= n; ++i) {
    kernel_.gather_right(phi.data(), i, w);
    out[i] = reconstruct_cell_integral(w, kernel_.right_table(i), params_.weno);
  }
  if (problem_.grid.periodic) out[0] = out[n];
  return out;
}

// ---------------------------------------------------------------------------
// 2D tensor grids

Solver2D::Solver2D(Problem2D problem, SolverParams params)
    : problem_(std::move(problem)),
      params_(params),
      beta_(resolve_beta(params_, 2)),
      kx_(LineGeometry::uniform(problem_.grid.x.n_cells, problem_.grid.x.delta_xi,
                                problem_.bc_x == Boundary::Periodic),
          params_.weno),
      ky_(LineGeometry::uniform(problem_.grid.y.n_cells, problem_.grid.y.delta_xi,
                                problem_.bc_y == Boundary::Periodic),
          params_.weno) {
  const auto& g = problem_.grid;
  if (g.x.n_cells < 8 || g.y.n_cells < 8)
    throw Error(ErrorCode::InvalidParameter, "need at least 8 cells per direction");
  for (auto [bc, ax] : {std::pair{problem_.bc_x, &g.x}, std::pair{problem_.bc_y, &g.y}}) {
    if (bc == Boundary::Dirichlet)
      throw Error(ErrorCode::Config, "tensor-grid runs support periodic or outflow boundaries");
    if (ax->periodic != (bc == Boundary::Periodic))
      throw Error(ErrorCode::Config, "grid periodicity does not match the boundary condition");
  }
  if (problem_.model.arity != 2 || !problem_.model.h || !problem_.model.speed)
    throw Error(ErrorCode::Config, "2D run needs a two-argument model");
  inv_jx_ = inverse(g.x.jacobian);
  inv_jy_ = inverse(g.y.jacobian);
}

namespace {

// One-sided differences at node i of a line with stride s.
std::pair<double, double> one_sided(const double* v, int i, int n, int s, bool periodic,
                                    double h) {
  double dm, dp;
  if (periodic) {
    int a = i == 0 ? n - 1 : i - 1;
    int b = i == n ? 1 : i + 1;
    dm = (v[i * s] - v[a * s]) / h;
    dp = (v[b * s] - v[i * s]) / h;
  } else {
    dm = i > 0 ? (v[i * s] - v[(i - 1) * s]) / h : (v[s] - v[0]) / h;
    dp = i < n ? (v[(i + 1) * s] - v[i * s]) / h : dm;
  }
  return {std::min(dm, dp), std::max(dm, dp)};
}

}  // namespace

std::vector<double> Solver2D::wave_speeds(const std::vector<double>& phi, double t) const {
  const auto& g = problem_.grid;
  const int nx = g.x.n_cells, ny = g.y.n_cells;
  const int rows = ny + 1;
  std::vector<std::array<double, 2>> part(rows, {0.0, 0.0});
  parallel_for(rows, params_.threads, [&](int lo, int hi) {
    for (int j = lo; j < hi; ++j) {
      const double* row = phi.data() + j * (nx + 1);
      for (int i = 0; i <= nx; ++i) {
        auto [ulo, uhi] = one_sided(row, i, nx, 1, g.x.periodic, g.x.delta_xi);
        auto [vlo, vhi] =
            one_sided(phi.data() + i, j, ny, nx + 1, g.y.periodic, g.y.delta_xi);
        Point pt{g.x.nodes[i], g.y.nodes[j], t};
        auto s = local_speed_2d(problem_.model, ulo, uhi, vlo, vhi, pt, inv_jx_[i], inv_jy_[j]);
        part[j][0] = std::max(part[j][0], s[0]);
        part[j][1] = std::max(part[j][1], s[1]);
      }
    }
  });
  std::vector<double> c{0.0, 0.0};
  for (const auto& p : part) {
    c[0] = std::max(c[0], p[0]);
    c[1] = std::max(c[1], p[1]);
  }
  return c;
}

void Solver2D::set_step(const std::vector<double>& c, double dt) {
  kx_.set_alpha(alpha_for(beta_, c.at(0), dt));
  ky_.set_alpha(alpha_for(beta_, c.at(1), dt));
}

void Solver2D::rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
                   RhsDetail2D* detail) const {
  const auto& g = problem_.grid;
  const int nx = g.x.n_cells, ny = g.y.n_cells;
  const int sx = nx + 1, sy = ny + 1;
  const size_t np = static_cast<size_t>(sx) * sy;
  if (phi.size() != np) throw Error(ErrorCode::Shape, "field size");
  const int k = params_.order;
  std::vector<double> pxm(np), pxp(np), tr(np), tym(np), typ(np);

  auto line_pass = [&](const LineKernel& ker, const Grid1D& ax, const double* src, int count,
                       int len, double* dm, double* dp) {
    LineGeometry geom = LineGeometry::uniform(len - 1, ax.delta_xi, false);
    parallel_for(count, params_.threads, [&](int lo, int hi) {
      std::vector<double> v(len);
      for (int l = lo; l < hi; ++l) {
        std::copy(src + static_cast<size_t>(l) * len, src + static_cast<size_t>(l + 1) * len,
                  v.begin());
        BiasedDerivatives d;
        if (ker.periodic()) {
          d = ker.biased(v, k, nullptr, params_.filter);
        } else {
          BoundaryDerivs bd = boundary_derivatives(geom, v.data(), k, ker.boundary_spacing());
          d = ker.biased(v, k, &bd, params_.filter);
        }
        std::copy(d.minus.begin(), d.minus.end(), dm + static_cast<size_t>(l) * len);
        std::copy(d.plus.begin(), d.plus.end(), dp + static_cast<size_t>(l) * len);
      }
    });
  };

  line_pass(kx_, g.x, phi.data(), sy, sx, pxm.data(), pxp.data());
  // Column sweeps run on the transposed field.
  parallel_for(sx, params_.threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < sy; ++j) tr[static_cast<size_t>(i) * sy + j] = phi[j * sx + i];
  });
  line_pass(ky_, g.y, tr.data(), sx, sy, tym.data(), typ.data());

  out.resize(np);
  if (detail) {
    detail->px_minus = pxm;
    detail->px_plus = pxp;
    detail->py_minus.resize(np);
    detail->py_plus.resize(np);
    detail->flux.resize(np);
  }
  parallel_for(sy, params_.threads, [&](int lo, int hi) {
    for (int j = lo; j < hi; ++j)
      for (int i = 0; i < sx; ++i) {
        size_t c = static_cast<size_t>(j) * sx + i;
        size_t ct = static_cast<size_t>(i) * sy + j;
        double um = pxm[c], up = pxp[c], vm = tym[ct], vp = typ[ct];
        Point pt{g.x.nodes[i], g.y.nodes[j], t};
        auto s = local_speed_2d(problem_.model, um, up, vm, vp, pt, inv_jx_[i], inv_jy_[j]);
        double fl = llf_flux_2d(problem_.model, um, up, vm, vp, s[0], s[1], pt, inv_jx_[i],
                                inv_jy_[j]);
        out[c] = -fl;
        if (detail) {
          detail->py_minus[c] = vm;
          detail->py_plus[c] = vp;
          detail->flux[c] = fl;
        }
      }
  });
  if (g.x.periodic)
    for (int j = 0; j < sy; ++j) out[j * sx + nx] = out[j * sx];
  if (g.y.periodic)
    for (int i = 0; i < sx; ++i) out[ny * sx + i] = out[i];
}

void Solver2D::apply_boundary(std::vector<double>& phi, const StageTime&) const {
  const int sx = nx() + 1;
  if (problem_.bc_x == Boundary::Periodic)
    for (int j = 0; j <= ny(); ++j) phi[j * sx + nx()] = phi[j * sx];
  if (problem_.bc_y == Boundary::Periodic)
    for (int i = 0; i < sx; ++i) phi[ny() * sx + i] = phi[i];
}

RunResult Solver2D::run(std::vector<double> phi0, double t_final) {
  const size_t np = static_cast<size_t>(nx() + 1) * (ny() + 1);
  if (phi0.size() != np) throw Error(ErrorCode::Shape, "initial field size");
  return run_loop(*this, std::move(phi0), t_final, params_, beta_);
}

// ---------------------------------------------------------------------------
// Embedded domains

struct SolverEmbedded::Line {
  int axis = 0;          // 0: x-line (row), 1: y-line (column)
  double fixed = 0.0;    // the other coordinate
  std::vector<double> x;        // physical positions along the merged line
  std::vector<int> nodes;       // field index of line entries 1..m-2
  int drop_lo = -1, drop_hi = -1;  // merged field nodes
  double w_lo = 0.0, w_hi = 0.0;   // interpolation weights for merged nodes
  double x_lo = 0.0, x_hi = 0.0;   // positions of the merged nodes
  LineGeometry geom;
  std::unique_ptr<LineKernel> kernel;
};

SolverEmbedded::~SolverEmbedded() = default;
SolverEmbedded::SolverEmbedded(SolverEmbedded&&) noexcept = default;

SolverEmbedded::SolverEmbedded(ProblemEmbedded problem, SolverParams params)
    : problem_(std::move(problem)), params_(params), beta_(resolve_beta(params_, 2)) {
  const auto& d = problem_.domain;
  if (!d.boundary_value) throw Error(ErrorCode::Config, "embedded run needs boundary data");
  if (problem_.model.arity != 2 || !problem_.model.h || !problem_.model.speed)
    throw Error(ErrorCode::Config, "2D run needs a two-argument model");
  const auto& bg = d.background;
  const double hs[2] = {(bg.x.b - bg.x.a) / bg.x.n_cells, (bg.y.b - bg.y.a) / bg.y.n_cells};
  const int sx = nx() + 1;
  for (int axis = 0; axis < 2; ++axis) {
    const auto& lines = axis == 0 ? d.x_lines : d.y_lines;
    const Grid1D& along = axis == 0 ? bg.x : bg.y;
    const Grid1D& across = axis == 0 ? bg.y : bg.x;
    const double h = hs[axis];
    for (const auto& segs : lines)
      for (const auto& s : segs) {
        auto l = std::make_unique<Line>();
        l->axis = axis;
        l->fixed = across.nodes[s.line];
        auto field = [&](int idx) { return axis == 0 ? s.line * sx + idx : idx * sx + s.line; };
        int first = s.first, last = s.last;
        double dlo = along.nodes[s.first] - s.lo_x;
        double dhi = s.hi_x - along.nodes[s.last];
        const double thr = params_.merge_fraction * h;
        if (dlo < thr && last > first) {
          l->drop_lo = field(first);
          l->w_lo = dlo / (along.nodes[first + 1] - s.lo_x);
          l->x_lo = along.nodes[first];
          ++first;
        }
        if (dhi < thr && last > first) {
          l->drop_hi = field(last);
          l->w_hi = dhi / (s.hi_x - along.nodes[last - 1]);
          l->x_hi = along.nodes[last];
          --last;
        }
        l->x.push_back(s.lo_x);
        for (int i = first; i <= last; ++i) {
          l->x.push_back(along.nodes[i]);
          l->nodes.push_back(field(i));
        }
        l->x.push_back(s.hi_x);
        l->geom = LineGeometry::from_nodes(l->x, h, false);
        l->kernel = std::make_unique<LineKernel>(l->geom, params_.weno);
        lines_.push_back(std::move(l));
      }
  }
}

int SolverEmbedded::segment_count() const { return static_cast<int>(lines_.size()); }

int SolverEmbedded::merged_count() const {
  int c = 0;
  for (const auto& l : lines_) c += (l->drop_lo >= 0) + (l->drop_hi >= 0);
  return c;
}

std::vector<double> SolverEmbedded::spacing() const {
  const auto& bg = problem_.domain.background;
  return {(bg.x.b - bg.x.a) / bg.x.n_cells, (bg.y.b - bg.y.a) / bg.y.n_cells};
}

void SolverEmbedded::line_values(const Line& l, const std::vector<double>& phi, const StageTime& t,
                                 std::vector<double>& v) const {
  const auto& g = problem_.domain.boundary_value;
  const int m = static_cast<int>(l.x.size());
  v.resize(m);
  if (l.axis == 0) {
    v[0] = t.sample([&](double s) { return g(l.x[0], l.fixed, s); });
    v[m - 1] = t.sample([&](double s) { return g(l.x[m - 1], l.fixed, s); });
  } else {
    v[0] = t.sample([&](double s) { return g(l.fixed, l.x[0], s); });
    v[m - 1] = t.sample([&](double s) { return g(l.fixed, l.x[m - 1], s); });
  }
  for (int i = 1; i < m - 1; ++i) v[i] = phi[l.nodes[i - 1]];
}

void SolverEmbedded::line_derivs(const Line& l, const std::vector<double>& phi, const StageTime& t,
                                 double* minus, double* plus) const {
  std::vector<double> v;
  line_values(l, phi, t, v);
  const int k = params_.order;
  BoundaryDerivs bd = boundary_derivatives(l.geom, v.data(), k, l.kernel->boundary_spacing());
  BiasedDerivatives d = l.kernel->biased(v, k, &bd, params_.filter);
  const int m = static_cast<int>(v.size());
  for (int i = 1; i < m - 1; ++i) {
    minus[l.nodes[i - 1]] = d.minus[i];
    plus[l.nodes[i - 1]] = d.plus[i];
  }
  if (l.drop_lo >= 0) {
    minus[l.drop_lo] = d.minus[0] + l.w_lo * (d.minus[1] - d.minus[0]);
    plus[l.drop_lo] = d.plus[0] + l.w_lo * (d.plus[1] - d.plus[0]);
  }
  if (l.drop_hi >= 0) {
    minus[l.drop_hi] = d.minus[m - 1] + l.w_hi * (d.minus[m - 2] - d.minus[m - 1]);
    plus[l.drop_hi] = d.plus[m - 1] + l.w_hi * (d.plus[m - 2] - d.plus[m - 1]);
  }
}

namespace {

// Lagrange interpolation through up to four consecutive line points starting
// at `from` and stepping by `dir`.
double line_interp(const std::vector<double>& x, const std::vector<double>& v, int from, int dir,
                   double at) {
  const int m = static_cast<int>(x.size());
  const int count = std::min(4, m);
  double sum = 0.0;
  for (int a = 0; a < count; ++a) {
    int ia = from + dir * a;
    double w = 1.0;
    for (int b = 0; b < count; ++b) {
      int ib = from + dir * b;
      if (b != a) w *= (at - x[ib]) / (x[ia] - x[ib]);
    }
    sum += w * v[ia];
  }
  return sum;
}

}  // namespace

void SolverEmbedded::apply_boundary(std::vector<double>& phi, const StageTime& t) const {
  // Merged nodes sit within a small fraction of h of the boundary; they take
  // their value from the boundary data and the line instead of evolving freely.
  std::vector<double> sum(phi.size(), 0.0);
  std::vector<int> hits(phi.size(), 0);
  std::vector<double> v;
  for (const auto& lp : lines_) {
    const Line& l = *lp;
    if (l.drop_lo < 0 && l.drop_hi < 0) continue;
    line_values(l, phi, t, v);
    const int m = static_cast<int>(v.size());
    if (l.drop_lo >= 0) {
      sum[l.drop_lo] += line_interp(l.x, v, 0, 1, l.x_lo);
      ++hits[l.drop_lo];
    }
    if (l.drop_hi >= 0) {
      sum[l.drop_hi] += line_interp(l.x, v, m - 1, -1, l.x_hi);
      ++hits[l.drop_hi];
    }
  }
  for (size_t k = 0; k < phi.size(); ++k)
    if (hits[k]) phi[k] = sum[k] / hits[k];
}

std::vector<double> SolverEmbedded::wave_speeds(const std::vector<double>& phi, double t) const {
  const size_t np = phi.size();
  std::vector<double> lo[2] = {std::vector<double>(np, 0.0), std::vector<double>(np, 0.0)};
  std::vector<double> hi[2] = {std::vector<double>(np, 0.0), std::vector<double>(np, 0.0)};
  parallel_for(segment_count(), params_.threads, [&](int a, int b) {
    std::vector<double> v;
    for (int q = a; q < b; ++q) {
      const Line& l = *lines_[q];
      line_values(l, phi, t, v);
      const int m = static_cast<int>(v.size());
      auto slope = [&](int c) { return (v[c + 1] - v[c]) / (l.x[c + 1] - l.x[c]); };
      for (int i = 1; i < m - 1; ++i) {
        double s0 = slope(i - 1), s1 = slope(i);
        lo[l.axis][l.nodes[i - 1]] = std::min(s0, s1);
        hi[l.axis][l.nodes[i - 1]] = std::max(s0, s1);
      }
      if (l.drop_lo >= 0) lo[l.axis][l.drop_lo] = hi[l.axis][l.drop_lo] = slope(0);
      if (l.drop_hi >= 0) lo[l.axis][l.drop_hi] = hi[l.axis][l.drop_hi] = slope(m - 2);
    }
  });
  const auto& bg = problem_.domain.background;
  std::vector<double> c{0.0, 0.0};
  const int sx = nx() + 1;
  for (size_t k = 0; k < np; ++k) {
    if (!is_active(static_cast<int>(k))) continue;
    Point pt{bg.x.nodes[k % sx], bg.y.nodes[k / sx], t};
    auto s = local_speed_2d(problem_.model, lo[0][k], hi[0][k], lo[1][k], hi[1][k], pt);
    c[0] = std::max(c[0], s[0]);
    c[1] = std::max(c[1], s[1]);
  }
  return c;
}

void SolverEmbedded::set_step(const std::vector<double>& c, double dt) {
  double ax = alpha_for(beta_, c.at(0), dt), ay = alpha_for(beta_, c.at(1), dt);
  parallel_for(segment_count(), params_.threads, [&](int a, int b) {
    for (int q = a; q < b; ++q) lines_[q]->kernel->set_alpha(lines_[q]->axis == 0 ? ax : ay);
  });
}

void SolverEmbedded::rhs(const std::vector<double>& phi, const StageTime& t, std::vector<double>& out,
                         RhsDetail2D* detail) const {
  const size_t np = static_cast<size_t>(nx() + 1) * (ny() + 1);
  if (phi.size() != np) throw Error(ErrorCode::Shape, "field size");
  std::vector<double> pxm(np, 0.0), pxp(np, 0.0), pym(np, 0.0), pyp(np, 0.0);
  // Segments of one direction write disjoint nodes; the two directions write
  // separate arrays.
  parallel_for(segment_count(), params_.threads, [&](int a, int b) {
    for (int q = a; q < b; ++q) {
      const Line& l = *lines_[q];
      if (l.axis == 0) line_derivs(l, phi, t, pxm.data(), pxp.data());
      else line_derivs(l, phi, t, pym.data(), pyp.data());
    }
  });
  const auto& bg = problem_.domain.background;
  const int sx = nx() + 1;
  out.assign(np, 0.0);
  if (detail) detail->flux.assign(np, 0.0);
  parallel_for(ny() + 1, params_.threads, [&](int a, int b) {
    for (int j = a; j < b; ++j)
      for (int i = 0; i < sx; ++i) {
        size_t c = static_cast<size_t>(j) * sx + i;
        if (!problem_.domain.inside[c]) continue;
        Point pt{bg.x.nodes[i], bg.y.nodes[j], t};
        auto s = local_speed_2d(problem_.model, pxm[c], pxp[c], pym[c], pyp[c], pt);
        double fl = llf_flux_2d(problem_.model, pxm[c], pxp[c], pym[c], pyp[c], s[0], s[1], pt);
        out[c] = -fl;
        if (detail) detail->flux[c] = fl;
      }
  });
  if (detail) {
    detail->px_minus = std::move(pxm);
    detail->px_plus = std::move(pxp);
    detail->py_minus = std::move(pym);
    detail->py_plus = std::move(pyp);
  }
}

RunResult SolverEmbedded::run(std::vector<double> phi0, double t_final) {
  const size_t np = static_cast<size_t>(nx() + 1) * (ny() + 1);
  if (phi0.size() != np) throw Error(ErrorCode::Shape, "initial field size");
  return run_loop(*this, std::move(phi0), t_final, params_, beta_);
}

}  // namespace hjk
