#include "hjk/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hjk/error.hpp"

namespace hjk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kMeshSeed = 20190423;

double wrap01(double x) { return x - std::floor(x); }

// Continuous piecewise-linear pulse: 0, ramp up to 2 on [0.4, 0.6], ramp down.
double pulse_1d(double x) {
  if (x <= 0.25 || x >= 0.75) return 0.0;
  if (x < 0.4) return 40.0 / 3.0 * (x - 0.25);
  if (x <= 0.6) return 2.0;
  return 40.0 / 3.0 * (0.75 - x);
}

// Unit plateau profile on [0.4, 0.6] with linear ramps to zero at 0.2 and 0.8.
double ramp_2d(double x) {
  if (x <= 0.2 || x >= 0.8) return 0.0;
  if (x < 0.4) return (x - 0.2) / 0.2;
  if (x <= 0.6) return 1.0;
  return (0.8 - x) / 0.2;
}

double plateau_2d(double x, double y) { return 2.0 * ramp_2d(x) * ramp_2d(y); }

ProblemSpec base(std::string name, std::string description, int dim) {
  ProblemSpec p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.dimension = dim;
  return p;
}

ProblemSpec linear1d() {
  auto p = base("linear1d", "linear advection phi_t + phi_x = 0, sin(2 pi x)", 1);
  p.model = make_model("linear");
  p.initial = [](double x, double) { return std::sin(2 * kPi * x); };
  p.exact = [](double x, double, double t) { return std::sin(2 * kPi * (x - t)); };
  return p;
}

ProblemSpec burgers1d() {
  auto p = base("burgers1d", "Burgers phi_t + (phi_x + 1)^2 / 2 = 0, -cos(pi x)", 1);
  p.x_lo = -1.0;
  p.model = make_model("burgers");
  p.initial = [](double x, double) { return -std::cos(kPi * x); };
  p.t_final = 0.5 / (kPi * kPi);
  p.exact = [](double x, double, double t) { return burgers_exact(x, t); };
  return p;
}

ProblemSpec riemann_nonconvex1d() {
  auto p = base("riemann_nonconvex1d", "non-convex Riemann problem, -2|x|, inflow data -2", 1);
  p.x_lo = -1.0;
  p.bc_x = Boundary::Dirichlet;
  p.model = make_model("nonconvex_quartic");
  p.initial = [](double x, double) { return -2.0 * std::abs(x); };
  p.boundary = [](double, double, double) { return -2.0; };
  p.reference = ReferenceRecipe{1600};
  return p;
}

ProblemSpec linear2d() {
  auto p = base("linear2d", "linear advection phi_t + phi_x + phi_y + 1 = 0", 2);
  p.x_lo = p.y_lo = -2.0;
  p.x_hi = p.y_hi = 2.0;
  p.model = make_model("linear2d");
  p.initial = [](double x, double y) { return -std::cos(kPi * (x + y) / 2); };
  p.t_final = 2.0;
  p.exact = [](double x, double y, double t) {
    return -std::cos(kPi * (x + y - 2 * t) / 2) - t;
  };
  return p;
}

ProblemSpec burgers2d() {
  auto p = base("burgers2d", "Burgers phi_t + (phi_x + phi_y + 1)^2 / 2 = 0", 2);
  p.x_lo = p.y_lo = -2.0;
  p.x_hi = p.y_hi = 2.0;
  p.model = make_model("burgers2d");
  p.initial = [](double x, double y) { return -std::cos(kPi * (x + y) / 2); };
  p.t_final = 0.5 / (kPi * kPi);
  // Along s = (x + y) / 2 the problem is the 1D Burgers case.
  p.exact = [](double x, double y, double t) { return burgers_exact(0.5 * (x + y), t); };
  return p;
}

ProblemSpec riemann_sin2d() {
  auto p = base("riemann_sin2d", "Riemann problem phi_t + sin(phi_x + phi_y) = 0, outflow", 2);
  p.x_lo = p.y_lo = -1.0;
  p.bc_x = p.bc_y = Boundary::Outflow;
  p.model = make_model("sin2d");
  p.initial = [](double x, double y) { return kPi * (std::abs(y) - std::abs(x)); };
  p.default_n = 80;
  return p;
}

ProblemSpec optimal_control2d() {
  auto p = base("optimal_control2d", "optimal control cost with sign(phi_y) switching", 2);
  p.x_lo = p.y_lo = -kPi;
  p.x_hi = p.y_hi = kPi;
  p.model = make_model("optimal_control");
  p.initial = [](double, double) { return 0.0; };
  p.default_n = 60;
  return p;
}

ProblemSpec burgers2d_mapped() {
  auto p = burgers2d();
  p.name = "burgers2d_mapped";
  p.description = "2D Burgers on a seeded smooth random mapping";
  p.mesh = MeshKind::SmoothRandom;
  p.mesh_param = 0.3;
  p.default_seed = kMeshSeed;
  return p;
}

ProblemSpec geometric_optics2d() {
  auto p = base("geometric_optics2d", "phi_t + sqrt(phi_x^2 + phi_y^2 + 1) = 0", 2);
  p.model = make_model("geometric_optics");
  p.initial = [](double x, double y) {
    return 0.25 * (std::cos(2 * kPi * x) - 1) * (std::cos(2 * kPi * y) - 1) - 1;
  };
  p.t_final = 0.6;
  p.default_n = 60;
  return p;
}

ProblemSpec propagating_surface2d() {
  auto p = base("propagating_surface2d", "phi_t - sqrt(phi_x^2 + phi_y^2 + 1) = 0", 2);
  p.model = make_model("propagating_surface");
  p.initial = [](double x, double y) {
    return 1 - 0.25 * (std::cos(2 * kPi * x) - 1) * (std::cos(2 * kPi * y) - 1);
  };
  p.t_final = 0.9;
  p.default_n = 60;
  return p;
}

ProblemSpec disk_surface2d() {
  auto p = base("disk_surface2d", "propagating surface on the unit disk, g = 1 + t", 2);
  p.x_lo = p.y_lo = -1.0;
  p.bc_x = p.bc_y = Boundary::Dirichlet;
  p.mesh = MeshKind::Embedded;
  p.model = make_model("propagating_surface");
  p.initial = [](double x, double y) { return std::sin(0.5 * kPi * (x * x + y * y)); };
  p.inside = [](double x, double y) { return x * x + y * y < 1.0; };
  p.boundary = [](double, double, double t) { return 1.0 + t; };
  p.t_final = 1.2;
  p.default_n = 60;
  return p;
}

ProblemSpec reinit_annulus2d() {
  auto p = base("reinit_annulus2d", "level set reinitialization on 1/2 < r < 1", 2);
  p.x_lo = p.y_lo = -1.0;
  p.bc_x = p.bc_y = Boundary::Dirichlet;
  p.mesh = MeshKind::Embedded;
  auto phi0 = [](double x, double y) { return std::hypot(x, y) - 0.5; };
  p.model = reinit_model(phi0);
  p.initial = phi0;
  p.inside = [](double x, double y) {
    double r2 = x * x + y * y;
    return r2 > 0.25 && r2 < 1.0;
  };
  p.boundary = [phi0](double x, double y, double) { return phi0(x, y); };
  p.default_n = 60;
  return p;
}

ProblemSpec with_variant(ProblemSpec p, const std::string& v) {
  p.variant = v;
  if (p.name == "linear1d" && v == "kink") {
    p.description = "linear advection of a continuous piecewise-linear pulse";
    p.initial = [](double x, double) { return pulse_1d(x); };
    p.exact = [](double x, double, double t) { return pulse_1d(wrap01(x - t)); };
  } else if (p.name == "burgers1d" && v == "shock") {
    p.description = "Burgers past shock formation";
    p.t_final = 3.5 / (kPi * kPi);
    p.default_n = 40;
    p.exact = nullptr;
  } else if (p.name == "linear2d" && v == "plateau") {
    p.description = "linear advection of a continuous piecewise-linear plateau";
    p.x_lo = p.y_lo = 0.0;
    p.x_hi = p.y_hi = 1.0;
    p.initial = plateau_2d;
    p.t_final = 1.0;
    p.default_n = 100;
    p.exact = [](double x, double y, double t) {
      return plateau_2d(wrap01(x - t), wrap01(y - t)) - t;
    };
  } else if (p.name == "burgers2d" && v == "kink") {
    p.description = "2D Burgers after the derivative becomes discontinuous";
    p.t_final = 1.5 / (kPi * kPi);
    p.default_n = 40;
    p.exact = nullptr;
  } else if (p.name == "burgers2d" && v == "cosine") {
    p.description = "phi_t - cos(phi_x + phi_y + 1) = 0";
    p.model = make_model("cos2d");
    p.t_final = 1.5 / (kPi * kPi);
    p.default_n = 40;
    p.exact = nullptr;
  } else if (p.name == "riemann_sin2d" && v == "geometric") {
    p.description = "sin Riemann problem on a geometrically graded mesh (ratio 7)";
    p.mesh = MeshKind::Geometric;
    p.mesh_param = 7.0;
    p.default_n = 60;
  } else if (p.name == "burgers2d_mapped" && v == "jitter") {
    // Independent node jitter: the mapping is not smooth, so the computed
    // Jacobian is O(1) wrong and the scheme does not converge on it.
    p.description = "2D Burgers on a mesh with independent node jitter";
    p.mesh = MeshKind::Perturbed;
    p.mesh_param = 0.3;
  } else {
    throw Error(ErrorCode::UnknownProblem,
                "problem '" + p.name + "' has no variant '" + v + "'");
  }
  return p;
}

}  // namespace

std::vector<ProblemSpec> catalogue() {
  return {linear1d(),          burgers1d(),          riemann_nonconvex1d(),
          linear2d(),          burgers2d(),          riemann_sin2d(),
          optimal_control2d(), burgers2d_mapped(),   geometric_optics2d(),
          propagating_surface2d(), disk_surface2d(), reinit_annulus2d()};
}

std::vector<std::string> variants(const std::string& name) {
  if (name == "linear1d") return {"kink"};
  if (name == "burgers1d") return {"shock"};
  if (name == "linear2d") return {"plateau"};
  if (name == "burgers2d") return {"kink", "cosine"};
  if (name == "riemann_sin2d") return {"geometric"};
  if (name == "burgers2d_mapped") return {"jitter"};
  return {};
}

ProblemSpec find_problem(const std::string& full) {
  auto colon = full.find(':');
  std::string name = full.substr(0, colon);
  for (auto& p : catalogue()) {
    if (p.name != name) continue;
    if (colon == std::string::npos) return p;
    return with_variant(std::move(p), full.substr(colon + 1));
  }
  std::string known;
  for (const auto& p : catalogue()) known += " " + p.name;
  throw Error(ErrorCode::UnknownProblem, "unknown problem '" + full + "'; known:" + known);
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::Dirichlet: return "dirichlet";
    case Boundary::Outflow: return "outflow";
  }
  return "?";
}

std::string to_string(MeshKind m) {
  switch (m) {
    case MeshKind::Uniform: return "uniform";
    case MeshKind::Perturbed: return "perturbed";
    case MeshKind::SmoothRandom: return "smooth_random";
    case MeshKind::Geometric: return "geometric";
    case MeshKind::Embedded: return "embedded";
  }
  return "?";
}

double burgers_exact(double x, double t, double* p_out) {
  auto f = [&](double p) { return p - kPi * std::sin(kPi * (x - t * (p + 1))); };
  double p = kPi * std::sin(kPi * (x - t));
  double fp = f(p);
  for (int it = 0; it < 200 && std::abs(fp) > 1e-15; ++it) {
    double d = 1.0 + kPi * kPi * t * std::cos(kPi * (x - t * (p + 1)));
    double step = fp / d;
    double lam = 1.0, np = p - step, nf = f(np);
    while (std::abs(nf) > std::abs(fp) && lam > 1e-6) {
      lam *= 0.5;
      np = p - lam * step;
      nf = f(np);
    }
    p = np;
    fp = nf;
    if (std::abs(lam * step) < 1e-13) break;
  }
  if (p_out) *p_out = p;
  double x0 = x - t * (p + 1);
  return -std::cos(kPi * x0) + 0.5 * t * (p * p - 1.0);
}

Grid1D problem_axis(const ProblemSpec& p, int axis, int n, std::uint64_t seed) {
  double lo = axis == 0 ? p.x_lo : p.y_lo;
  double hi = axis == 0 ? p.x_hi : p.y_hi;
  bool periodic = (axis == 0 ? p.bc_x : p.bc_y) == Boundary::Periodic;
  switch (p.mesh) {
    case MeshKind::Uniform:
    case MeshKind::Embedded: return uniform_grid(lo, hi, n, periodic);
    case MeshKind::Perturbed:
      return perturbed_grid(lo, hi, n, seed + static_cast<std::uint64_t>(axis), p.mesh_param,
                            periodic);
    case MeshKind::SmoothRandom:
      return smooth_random_grid(lo, hi, n, seed + static_cast<std::uint64_t>(axis),
                                p.mesh_param, periodic);
    case MeshKind::Geometric: return geometric_grid(lo, hi, n, p.mesh_param);
  }
  throw Error(ErrorCode::Config, "unknown mesh kind");
}

namespace {

template <class S>
void prime(S& s, const std::vector<double>& phi, double t, const SolverParams& params) {
  auto c = s.wave_speeds(phi, t);
  for (auto& v : c) v = std::max(v, kMinSpeed);
  s.set_step(c, cfl_dt(params.cfl, s.spacing(), c, params.rule));
}

}  // namespace

Solution solve(const ProblemSpec& p, const SolverParams& params, const SolveOptions& opt) {
  if (p.has_exact() && p.reference)
    throw Error(ErrorCode::Config, "problem has both an exact solution and a reference recipe");
  Solution s;
  s.problem = p.full_name();
  s.n = opt.n > 0 ? opt.n : p.default_n;
  s.seed = opt.seed.value_or(p.default_seed);
  const double tf = opt.t_final.value_or(p.t_final);
  if (s.n < 8) throw Error(ErrorCode::InvalidParameter, "need at least 8 cells per direction");
  s.x = problem_axis(p, 0, s.n, s.seed);

  if (p.dimension == 1) {
    Problem1D prob;
    prob.grid = s.x;
    prob.model = p.model;
    prob.bc = p.bc_x;
    if (p.boundary) {
      auto g = p.boundary;
      prob.boundary = [g](double x, double t) { return g(x, 0.0, t); };
    }
    s.initial.resize(s.x.n_nodes());
    for (int i = 0; i < s.x.n_nodes(); ++i) s.initial[i] = p.initial(s.x.nodes[i], 0.0);
    Solver1D solver(std::move(prob), params);
    s.run = solver.run(s.initial, tf);
    if (s.run.state.step_count == 0) prime(solver, s.run.state.field, tf, params);
    RhsDetail d;
    std::vector<double> out;
    solver.rhs(s.run.state.field, tf, out, &d);
    s.dx_minus = std::move(d.minus);
    s.dx_plus = std::move(d.plus);
    for (int i = 0; i < s.x.n_nodes(); ++i) {
      s.dx_minus[i] /= s.x.jacobian[i];
      s.dx_plus[i] /= s.x.jacobian[i];
    }
    return s;
  }

  s.y = problem_axis(p, 1, s.n, s.seed);
  const int sx = s.x.n_nodes(), sy = s.y.n_nodes();
  s.initial.resize(static_cast<size_t>(sx) * sy);
  for (int j = 0; j < sy; ++j)
    for (int i = 0; i < sx; ++i) s.initial[j * sx + i] = p.initial(s.x.nodes[i], s.y.nodes[j]);

  RhsDetail2D d;
  std::vector<double> out;
  if (p.mesh == MeshKind::Embedded) {
    ProblemEmbedded prob;
    prob.domain = embed_domain_2d(p.inside, p.boundary, TensorGrid2D{s.x, s.y}, 1);
    prob.model = p.model;
    s.mask = prob.domain.inside;
    SolverEmbedded solver(std::move(prob), params);
    s.merged_nodes = solver.merged_count();
    s.run = solver.run(s.initial, tf);
    if (s.run.state.step_count == 0) prime(solver, s.run.state.field, tf, params);
    solver.rhs(s.run.state.field, tf, out, &d);
  } else {
    Problem2D prob;
    prob.grid = TensorGrid2D{s.x, s.y};
    prob.model = p.model;
    prob.bc_x = p.bc_x;
    prob.bc_y = p.bc_y;
    Solver2D solver(std::move(prob), params);
    s.run = solver.run(s.initial, tf);
    if (s.run.state.step_count == 0) prime(solver, s.run.state.field, tf, params);
    solver.rhs(s.run.state.field, tf, out, &d);
    for (int j = 0; j < sy; ++j)
      for (int i = 0; i < sx; ++i) {
        const size_t c = static_cast<size_t>(j) * sx + i;
        d.px_minus[c] /= s.x.jacobian[i];
        d.px_plus[c] /= s.x.jacobian[i];
        d.py_minus[c] /= s.y.jacobian[j];
        d.py_plus[c] /= s.y.jacobian[j];
      }
  }
  s.dx_minus = std::move(d.px_minus);
  s.dx_plus = std::move(d.px_plus);
  s.dy_minus = std::move(d.py_minus);
  s.dy_plus = std::move(d.py_plus);
  return s;
}

std::vector<CellReconstruction> weno_diagnostics(const ProblemSpec& p, const SolverParams& params,
                                                 const Solution& s) {
  if (p.dimension != 1) throw Error(ErrorCode::Config, "WENO diagnostics are available for 1D runs");
  Problem1D prob;
  prob.grid = s.x;
  prob.model = p.model;
  prob.bc = p.bc_x;
  Solver1D solver(std::move(prob), params);
  prime(solver, s.field(), s.run.state.time, params);
  return solver.weno_diagnostics(s.field());
}

double error_norm(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<char>& mask) {
  if (a.size() != b.size()) throw Error(ErrorCode::Shape, "fields differ in size");
  if (!mask.empty() && mask.size() != a.size()) throw Error(ErrorCode::Shape, "mask size");
  double e = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    e = std::max(e, std::abs(a[k] - b[k]));
  }
  return e;
}

std::vector<double> exact_field(const ProblemSpec& p, const Solution& s) {
  if (!p.exact) throw Error(ErrorCode::Config, "problem '" + p.full_name() + "' has no exact solution");
  const double t = s.run.state.time;
  std::vector<double> e;
  if (p.dimension == 1) {
    e.resize(s.x.n_nodes());
    for (int i = 0; i < s.x.n_nodes(); ++i) e[i] = p.exact(s.x.nodes[i], 0.0, t);
    return e;
  }
  const int sx = s.x.n_nodes(), sy = s.y.n_nodes();
  e.resize(static_cast<size_t>(sx) * sy);
  for (int j = 0; j < sy; ++j)
    for (int i = 0; i < sx; ++i) e[j * sx + i] = p.exact(s.x.nodes[i], s.y.nodes[j], t);
  return e;
}

std::vector<double> restrict_to(const Solution& fine, int n) {
  if (n < 1 || fine.n % n != 0)
    throw Error(ErrorCode::InvalidParameter,
                "coarse resolution " + std::to_string(n) + " does not divide " +
                    std::to_string(fine.n));
  const int r = fine.n / n;
  const auto& f = fine.field();
  if (fine.y.nodes.empty()) {
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = f[i * r];
    return out;
  }
  const int fs = fine.x.n_nodes();
  std::vector<double> out(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) out[j * (n + 1) + i] = f[(j * r) * fs + i * r];
  return out;
}

std::vector<double> control_sign(const Solution& s) {
  if (s.dy_minus.empty()) throw Error(ErrorCode::Config, "solution has no y-derivatives");
  std::vector<double> out(s.dy_minus.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = sign(0.5 * (s.dy_minus[k] + s.dy_plus[k]));
  return out;
}

ConvergenceReport convergence_study(const ProblemSpec& p, const SolverParams& params,
                                    const std::vector<int>& res,
                                    std::optional<std::uint64_t> seed) {
  if (res.size() < 2)
    throw Error(ErrorCode::InvalidParameter, "a convergence study needs at least two resolutions");
  for (size_t i = 1; i < res.size(); ++i)
    if (res[i] != 2 * res[i - 1])
      throw Error(ErrorCode::InvalidParameter, "resolutions must double");
  if (!p.has_exact() && !p.reference)
    throw Error(ErrorCode::Config,
                "problem '" + p.full_name() + "' has neither an exact nor a reference solution");
  ConvergenceReport r;
  r.problem = p.full_name();
  r.order = params.order;
  r.cfl = params.cfl;
  r.seed = seed.value_or(p.default_seed);
  r.resolutions = res;
  SolveOptions opt;
  opt.seed = r.seed;
  std::optional<Solution> fine;
  if (!p.has_exact()) {
    opt.n = p.reference->n_fine;
    fine = solve(p, params, opt);
  }
  for (int n : res) {
    auto t0 = std::chrono::steady_clock::now();
    opt.n = n;
    Solution s = solve(p, params, opt);
    r.beta = s.run.diag.beta;
    std::vector<double> truth = fine ? restrict_to(*fine, n) : exact_field(p, s);
    r.errors.push_back(error_norm(s.field(), truth, s.mask));
    r.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  for (size_t i = 0; i + 1 < r.errors.size(); ++i) {
    double a = r.errors[i], b = r.errors[i + 1];
    if (b == 0.0) {
      r.orders.push_back(std::numeric_limits<double>::infinity());
      r.saturated.push_back(1);
    } else {
      r.orders.push_back(std::log2(a / b));
      r.saturated.push_back(0);
    }
  }
  return r;
}

}  // namespace hjk
