// Command-line driver: run one catalogue problem, run a convergence study, or
// list the catalogue.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjk/error.hpp"
#include "hjk/io.hpp"
#include "hjk/problems.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kDiverged = 1, kUsage = 2, kIo = 3 };

struct Common {
  std::string problem;
  int order = 3;
  double cfl = 0.5;
  double beta = 0.0;
  double lambda = 1.0;
  double epsilon = 1e-6;
  bool no_filter = false;
  std::string rule = "sum";
  int threads = 1;
  double merge = 0.1;
  double t_final = 0.0;
  long long seed = -1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-p,--problem", c.problem, "Problem name, optionally name:variant")->required();
  app->add_option("-k,--order", c.order, "Scheme order")->check(CLI::IsMember({1, 2, 3}));
  app->add_option("--cfl", c.cfl, "CFL number")->check(CLI::PositiveNumber);
  app->add_option("--beta", c.beta, "Kernel beta; 0 picks the stability default")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--lambda", c.lambda, "WENO tension times grid spacing")->check(CLI::PositiveNumber);
  app->add_option("--epsilon", c.epsilon, "WENO epsilon")->check(CLI::PositiveNumber);
  app->add_flag("--no-filter", c.no_filter, "Disable the smoothness filter");
  app->add_option("--cfl-rule", c.rule, "Combine 2D speeds by sum or max")
      ->check(CLI::IsMember({"sum", "max"}));
  app->add_option("--threads", c.threads, "Worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  app->add_option("--merge-fraction", c.merge, "Embedded cell merge threshold")
      ->check(CLI::Range(0.0, 0.5));
  app->add_option("-T,--t-final", c.t_final, "Final time (default from the catalogue)")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Mesh seed for random meshes")->check(CLI::NonNegativeNumber);
  app->add_option("-o,--out", c.out, "Output directory (default $HJSOLVE_OUT or .)");
  app->add_option("--format", c.format, "Field format for 2D runs")
      ->check(CLI::IsMember({"csv", "json"}));
}

hjk::SolverParams params_of(const Common& c) {
  hjk::SolverParams p;
  p.order = c.order;
  p.cfl = c.cfl;
  p.beta = c.beta;
  p.weno.lambda_dx = c.lambda;
  p.weno.epsilon = c.epsilon;
  p.filter = !c.no_filter;
  p.rule = c.rule == "max" ? hjk::CflRule::Max : hjk::CflRule::Sum;
  p.threads = c.threads;
  p.merge_fraction = c.merge;
  return p;
}

fs::path out_dir(const Common& c) {
  fs::path d = c.out;
  if (d.empty()) {
    const char* env = std::getenv("HJSOLVE_OUT");
    d = env && *env ? env : ".";
  }
  fs::create_directories(d);
  return d;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw hjk::Error(hjk::ErrorCode::Io, "cannot write " + p.string());
  return os;
}

int run(const Common& c, int n, bool diagnostics) {
  hjk::ProblemSpec p = hjk::find_problem(c.problem);
  hjk::SolverParams params = params_of(c);
  hjk::SolveOptions opt;
  opt.n = n;
  if (c.t_final > 0) opt.t_final = c.t_final;
  if (c.seed >= 0) opt.seed = static_cast<std::uint64_t>(c.seed);
  if (diagnostics && p.dimension != 1)
    throw hjk::Error(hjk::ErrorCode::Config, "--diagnostics is available for 1D problems only");

  hjk::Solution s = hjk::solve(p, params, opt);
  fs::path dir = out_dir(c);
  if (p.dimension == 1) {
    auto os = open_out(dir / "solution.csv");
    hjk::write_solution_csv(os, s);
  } else {
    if (c.format == "json") {
      auto os = open_out(dir / "field.json");
      hjk::write_field_json(os, s);
    }
    auto os = open_out(dir / "field.dat");
    hjk::write_field_gnuplot(os, s);
  }
  {
    auto os = open_out(dir / "manifest.json");
    hjk::write_manifest(os, hjk::make_manifest(p, params, s));
  }
  if (diagnostics) {
    auto os = open_out(dir / "weno.csv");
    hjk::write_weno_csv(os, s.x, hjk::weno_diagnostics(p, params, s));
  }

  std::cout << p.full_name() << ": n=" << s.n << " t=" << s.run.state.time
            << " steps=" << s.run.state.step_count << " beta=" << s.run.diag.beta;
  if (p.has_exact()) std::cout << " error=" << hjk::error_norm(s.field(), hjk::exact_field(p, s), s.mask);
  std::cout << "\nwrote " << dir.string() << '\n';
  return kOk;
}

int converge(const Common& c, const std::vector<int>& ns) {
  hjk::ProblemSpec p = hjk::find_problem(c.problem);
  if (c.t_final > 0) p.t_final = c.t_final;
  std::optional<std::uint64_t> seed;
  if (c.seed >= 0) seed = static_cast<std::uint64_t>(c.seed);
  hjk::ConvergenceReport r = hjk::convergence_study(p, params_of(c), ns, seed);
  hjk::print_report(std::cout, r);
  fs::path dir = out_dir(c);
  {
    auto os = open_out(dir / "convergence.csv");
    hjk::write_report_csv(os, r);
  }
  auto os = open_out(dir / "convergence.json");
  hjk::write_report_json(os, r);
  return kOk;
}

int list(bool as_json, int dim) {
  std::vector<hjk::ProblemSpec> shown;
  for (auto& p : hjk::catalogue())
    if (dim == 0 || p.dimension == dim) shown.push_back(p);
  if (as_json) {
    hjk::write_catalogue_json(std::cout, shown);
    return kOk;
  }
  for (const auto& p : shown) {
    std::cout << p.name << "  (" << p.dimension << "D, n=" << p.default_n << ")  " << p.description;
    auto v = hjk::variants(p.name);
    if (!v.empty()) {
      std::cout << "  variants:";
      for (const auto& s : v) std::cout << ' ' << s;
    }
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi kernel solver"};
  app.require_subcommand(1);

  Common run_opts;
  int n = 0;
  bool diagnostics = false;
  auto* run_cmd = app.add_subcommand("run", "Solve one problem");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("-n,--n", n, "Cells per direction (default from the catalogue)")
      ->check(CLI::Range(8, 1 << 20));
  run_cmd->add_flag("--diagnostics", diagnostics, "Write WENO weights to weno.csv (1D)");

  Common conv_opts;
  std::vector<int> ns;
  auto* conv_cmd = app.add_subcommand("converge", "Error and observed order over resolutions");
  add_common(conv_cmd, conv_opts);
  conv_cmd->add_option("-n,--resolutions", ns, "Doubling resolutions, e.g. 20 40 80")
      ->required()
      ->check(CLI::Range(8, 1 << 20));

  bool as_json = false;
  int dim = 0;
  auto* list_cmd = app.add_subcommand("list", "Show the problem catalogue");
  list_cmd->add_flag("--json", as_json, "Machine-readable output");
  list_cmd->add_option("--dim", dim, "Only 1D or 2D problems")->check(CLI::IsMember({1, 2}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return run(run_opts, n, diagnostics);
    if (*conv_cmd) return converge(conv_opts, ns);
    return list(as_json, dim);
  } catch (const hjk::Error& e) {
    std::cerr << "hjsolve: " << e.what() << '\n';
    switch (e.code()) {
      case hjk::ErrorCode::Divergence: return kDiverged;
      case hjk::ErrorCode::Io: return kIo;
      default: return kUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "hjsolve: " << e.what() << '\n';
    return kIo;
  }
}
