#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hjk/error.hpp"
#include "hjk/io.hpp"

using namespace hjk;

TEST_CASE("solution csv round trip") {
  SolverParams params;
  Solution s = solve(find_problem("burgers1d"), params, {.n = 16, .t_final = 0.01});
  std::stringstream ss;
  write_solution_csv(ss, s);
  SolutionTable t = read_solution_csv(ss);
  REQUIRE(t.x.size() == 17);
  for (int i = 0; i <= 16; ++i) {
    CHECK(t.x[i] == s.x.nodes[i]);
    CHECK(t.phi[i] == s.field()[i]);
    CHECK(t.phix_minus[i] == s.dx_minus[i]);
    CHECK(t.phix_plus[i] == s.dx_plus[i]);
  }
}

TEST_CASE("field json round trip with mask") {
  SolverParams params;
  Solution s = solve(find_problem("disk_surface2d"), params, {.n = 12, .t_final = 0.02});
  std::stringstream ss;
  write_field_json(ss, s);
  FieldSnapshot f = read_field_json(ss);
  CHECK(f.problem == "disk_surface2d");
  CHECK(f.time == s.run.state.time);
  CHECK(f.x == s.x.nodes);
  CHECK(f.y == s.y.nodes);
  CHECK(f.phi == s.field());
  CHECK(f.mask == s.mask);
}

TEST_CASE("gnuplot blocks mark inactive nodes") {
  SolverParams params;
  Solution s = solve(find_problem("disk_surface2d"), params, {.n = 10, .t_final = 0.02});
  std::stringstream ss;
  write_field_gnuplot(ss, s);
  std::string text = ss.str();
  CHECK(text.find("NaN") != std::string::npos);
  int blank = 0;
  std::string line;
  while (std::getline(ss, line))
    if (line.empty()) ++blank;
  CHECK(blank == 11);
}

TEST_CASE("manifest round trip and replay") {
  SolverParams params;
  params.order = 2;
  params.cfl = 0.7;
  ProblemSpec p = find_problem("linear1d");
  Solution s = solve(p, params, {.n = 20, .t_final = 0.1});
  Manifest m = make_manifest(p, params, s);
  std::stringstream ss;
  write_manifest(ss, m);
  Manifest r = read_manifest(ss);
  CHECK(r.problem == "linear1d");
  CHECK(r.order == 2);
  CHECK(r.cfl == 0.7);
  CHECK(r.beta == s.run.diag.beta);
  CHECK(r.steps == s.run.state.step_count);
  CHECK(r.dt_history == s.run.diag.dt_history);
  CHECK(r.max_norm_history == s.run.diag.max_norm_history);
  SolverParams again = params_from_manifest(r);
  Solution s2 = solve(find_problem(r.problem), again, {.n = r.n, .t_final = r.t_final});
  CHECK(s2.field() == s.field());
}

TEST_CASE("report csv and json round trips, saturated orders included") {
  ConvergenceReport r;
  r.problem = "linear1d";
  r.order = 3;
  r.cfl = 0.5;
  r.beta = 1.2;
  r.seed = 9;
  r.resolutions = {20, 40, 80};
  r.errors = {1e-3, 1.25e-4, 0.0};
  r.orders = {3.0, std::numeric_limits<double>::infinity()};
  r.saturated = {0, 1};
  r.seconds = {0.1, 0.2, 0.4};
  std::stringstream c;
  write_report_csv(c, r);
  ConvergenceReport rc = read_report_csv(c);
  CHECK(rc.resolutions == r.resolutions);
  CHECK(rc.errors == r.errors);
  CHECK(rc.orders[0] == 3.0);
  CHECK(std::isinf(rc.orders[1]));
  CHECK(rc.saturated == r.saturated);

  std::stringstream j;
  write_report_json(j, r);
  ConvergenceReport rj = read_report_json(j);
  CHECK(rj.problem == r.problem);
  CHECK(rj.beta == r.beta);
  CHECK(rj.seed == r.seed);
  CHECK(rj.errors == r.errors);
  CHECK(rj.orders[0] == 3.0);
  CHECK(std::isinf(rj.orders[1]));
  CHECK(rj.saturated == r.saturated);
  CHECK(rj.seconds == r.seconds);

  std::stringstream t;
  print_report(t, r);
  CHECK(t.str().find("inf") != std::string::npos);
}

TEST_CASE("malformed inputs are io errors") {
  std::stringstream bad_header("x,y\n1,2\n");
  CHECK_THROWS_AS(read_solution_csv(bad_header), Error);
  std::stringstream bad_number("N,error,order\n20,abc,\n");
  CHECK_THROWS_AS(read_report_csv(bad_number), Error);
  std::stringstream bad_json("{\"problem\": 3");
  try {
    read_manifest(bad_json);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("weno diagnostics csv has one row per node") {
  SolverParams params;
  ProblemSpec p = find_problem("linear1d:kink");
  Solution s = solve(p, params, {.n = 20, .t_final = 0.05});
  auto cells = weno_diagnostics(p, params, s);
  REQUIRE(cells.size() == 21);
  for (const auto& c : cells) CHECK(c.omega[0] + c.omega[1] + c.omega[2] == doctest::Approx(1.0));
  std::stringstream ss;
  write_weno_csv(ss, s.x, cells);
  int lines = 0;
  std::string line;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 22);
  Solution s2 = solve(find_problem("linear2d"), params, {.n = 10, .t_final = 0.01});
  CHECK_THROWS_AS(weno_diagnostics(find_problem("linear2d"), params, s2), Error);
}

TEST_CASE("catalogue json lists every problem") {
  std::stringstream ss;
  write_catalogue_json(ss, catalogue());
  std::string text = ss.str();
  for (const auto& p : catalogue()) CHECK(text.find("\"" + p.name + "\"") != std::string::npos);
}
