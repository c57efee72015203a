#include "hjk/grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "hjk/error.hpp"

namespace hjk {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_nodes(const std::vector<double>& x) {
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw Error(ErrorCode::InvalidMapping,
                  "nodes not strictly increasing at index " + std::to_string(i));
}

void check_jacobian(const std::vector<double>& j) {
  for (size_t i = 0; i < j.size(); ++i)
    if (!(j[i] > 0.0))
      throw Error(ErrorCode::DegenerateMapping,
                  "nonpositive jacobian at node " + std::to_string(i));
}

}  // namespace

std::vector<double> jacobian_fd4(const std::vector<double>& x, double dxi, bool periodic) {
  const int n = static_cast<int>(x.size());
  if (n < 5) throw Error(ErrorCode::InsufficientStencil, "fourth-order jacobian needs 5 nodes");
  const int N = n - 1;
  std::vector<double> J(n);
  const double c = 1.0 / (12.0 * dxi);
  if (periodic) {
    const double len = x[N] - x[0];
    auto at = [&](int k) {
      int r = ((k % N) + N) % N;
      return x[r] + static_cast<double>((k - r) / N) * len;
    };
    for (int i = 0; i < N; ++i)
      J[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * c;
    J[N] = J[0];
    return J;
  }
  for (int i = 2; i <= N - 2; ++i)
    J[i] = (x[i - 2] - 8.0 * x[i - 1] + 8.0 * x[i + 1] - x[i + 2]) * c;
  J[0] = (-25.0 * x[0] + 48.0 * x[1] - 36.0 * x[2] + 16.0 * x[3] - 3.0 * x[4]) * c;
  J[1] = (-3.0 * x[0] - 10.0 * x[1] + 18.0 * x[2] - 6.0 * x[3] + x[4]) * c;
  J[N] = (25.0 * x[N] - 48.0 * x[N - 1] + 36.0 * x[N - 2] - 16.0 * x[N - 3] + 3.0 * x[N - 4]) * c;
  J[N - 1] = (3.0 * x[N] + 10.0 * x[N - 1] - 18.0 * x[N - 2] + 6.0 * x[N - 3] - x[N - 4]) * c;
  return J;
}

Grid1D build_grid_1d(const std::vector<double>& nodes, const GridOptions& opt) {
  const int n_cells = static_cast<int>(nodes.size()) - 1;
  if (n_cells < opt.min_cells)
    throw Error(ErrorCode::InsufficientStencil,
                "grid needs at least " + std::to_string(opt.min_cells) + " cells");
  check_nodes(nodes);
  Grid1D g;
  g.n_cells = n_cells;
  g.delta_xi = 1.0 / n_cells;
  g.nodes = nodes;
  g.a = nodes.front();
  g.b = nodes.back();
  g.periodic = opt.periodic;
  g.jacobian = jacobian_fd4(nodes, g.delta_xi, opt.periodic);
  check_jacobian(g.jacobian);
  return g;
}

Grid1D build_grid_1d(const Mapping& map, int n_cells, double a, double b, const GridOptions& opt,
                     const Mapping& derivative) {
  if (n_cells < opt.min_cells)
    throw Error(ErrorCode::InsufficientStencil,
                "grid needs at least " + std::to_string(opt.min_cells) + " cells");
  std::vector<double> x(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) x[i] = map(static_cast<double>(i) / n_cells);
  x.front() = a;
  x.back() = b;
  Grid1D g = build_grid_1d(x, opt);
  if (opt.analytic_jacobian && derivative) {
    for (int i = 0; i <= n_cells; ++i) g.jacobian[i] = derivative(g.xi(i));
    check_jacobian(g.jacobian);
  }
  return g;
}

Grid1D uniform_grid(double a, double b, int n_cells, bool periodic) {
  std::vector<double> x(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) x[i] = a + (b - a) * i / n_cells;
  x.back() = b;
  GridOptions opt;
  opt.periodic = periodic;
  opt.min_cells = std::min(opt.min_cells, n_cells);
  Grid1D g = build_grid_1d(x, opt);
  // Exact metric for the affine case.
  for (auto& j : g.jacobian) j = b - a;
  return g;
}

Grid1D perturbed_grid(double a, double b, int n_cells, std::uint64_t seed, double amp,
                      bool periodic) {
  if (!(amp >= 0.0 && amp < 0.5))
    throw Error(ErrorCode::InvalidParameter, "jitter amplitude must be in [0, 0.5)");
  std::mt19937_64 rng(seed);
  const double dx = (b - a) / n_cells;
  std::vector<double> x(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) {
    double r = 2.0 * unit_uniform(rng) - 1.0;
    x[i] = a + i * dx;
    if (i > 0 && i < n_cells) x[i] += amp * dx * r;
  }
  x.back() = b;
  GridOptions opt;
  opt.periodic = periodic;
  return build_grid_1d(x, opt);
}

Grid1D smooth_random_grid(double a, double b, int n_cells, std::uint64_t seed, double amp,
                          bool periodic) {
  if (!(amp >= 0.0 && amp < 1.0))
    throw Error(ErrorCode::InvalidParameter, "mapping amplitude must be in [0, 1)");
  constexpr int kModes = 4;
  std::mt19937_64 rng(seed);
  double c[kModes], phase[kModes];
  double total = 0.0;
  for (int m = 0; m < kModes; ++m) {
    c[m] = 2.0 * unit_uniform(rng) - 1.0;
    phase[m] = unit_uniform(rng) < 0.5 ? 0.0 : 1.0;
    total += std::abs(c[m]);
  }
  for (auto& v : c) v *= total > 0.0 ? amp / total : 0.0;
  // sin(2 pi m xi) terms vanish at both ends, so the mapping is onto [a, b]
  // and its derivative is periodic.
  auto map = [&](double xi) {
    double s = xi;
    for (int m = 0; m < kModes; ++m) {
      double w = 2.0 * M_PI * (m + 1);
      s += c[m] * (phase[m] == 0.0 ? std::sin(w * xi) : -std::sin(w * xi)) / w;
    }
    return a + (b - a) * s;
  };
  GridOptions opt;
  opt.periodic = periodic;
  return build_grid_1d(map, n_cells, a, b, opt);
}

Grid1D geometric_grid(double a, double b, int n_cells, double ratio) {
  if (n_cells % 2 != 0 || n_cells < 4)
    throw Error(ErrorCode::InvalidParameter, "geometric grid needs an even cell count >= 4");
  if (!(ratio >= 1.0)) throw Error(ErrorCode::InvalidParameter, "grading ratio must be >= 1");
  const int half = n_cells / 2;
  const double r = std::pow(ratio, 1.0 / (half - 1));
  double sum = 0.0;
  for (int k = 0; k < half; ++k) sum += std::pow(r, k);
  const double h0 = 0.5 * (b - a) / sum;
  const double mid = 0.5 * (a + b);
  std::vector<double> x(n_cells + 1);
  x[half] = mid;
  double off = 0.0;
  for (int k = 0; k < half; ++k) {
    off += h0 * std::pow(r, k);
    x[half + k + 1] = mid + off;
    x[half - k - 1] = mid - off;
  }
  x.front() = a;
  x.back() = b;
  return build_grid_1d(x, {});
}

void write_grid_csv(std::ostream& os, const Grid1D& g) {
  os << "i,xi,x,J\n";
  os.precision(17);
  for (int i = 0; i <= g.n_cells; ++i)
    os << i << ',' << g.xi(i) << ',' << g.nodes[i] << ',' << g.jacobian[i] << '\n';
}

Grid1D read_grid_csv(std::istream& is, bool periodic) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("i,xi,x,J", 0) != 0)
    throw Error(ErrorCode::Io, "grid csv header missing");
  Grid1D g;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& s : f)
      if (!std::getline(ss, s, ',')) throw Error(ErrorCode::Io, "short grid csv row");
    g.nodes.push_back(std::stod(f[2]));
    g.jacobian.push_back(std::stod(f[3]));
  }
  if (g.nodes.size() < 2) throw Error(ErrorCode::Io, "grid csv has no cells");
  g.n_cells = static_cast<int>(g.nodes.size()) - 1;
  g.delta_xi = 1.0 / g.n_cells;
  g.a = g.nodes.front();
  g.b = g.nodes.back();
  g.periodic = periodic;
  return g;
}

namespace {

// Crossing between an outside point lo and an inside point hi along one axis.
template <class F>
double bisect(F&& in, double lo, double hi, double tol) {
  while (std::abs(hi - lo) > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (in(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Segment> scan_line(const std::vector<double>& coord, int line,
                               const std::vector<char>& interior,
                               const std::vector<char>& indicator, const std::function<bool(double)>& in,
                               double h) {
  std::vector<Segment> out;
  const int n = static_cast<int>(coord.size());
  int i = 0;
  while (i < n) {
    if (!interior[i]) {
      ++i;
      continue;
    }
    Segment s;
    s.line = line;
    s.first = i;
    while (i + 1 < n && interior[i + 1]) ++i;
    s.last = i;
    int l = s.first - 1, r = s.last + 1;
    if (l < 0 || r >= n)
      throw Error(ErrorCode::InvalidMapping, "interior node on the box edge");
    s.lo_x = indicator[l] ? coord[l] : bisect(in, coord[l], coord[s.first], 1e-12 * h);
    s.hi_x = indicator[r] ? coord[r] : bisect(in, coord[r], coord[s.last], 1e-12 * h);
    out.push_back(s);
    ++i;
  }
  return out;
}

}  // namespace

EmbeddedDomain2D embed_domain_2d(const Indicator& ind, const BoundaryValue& g,
                                 const TensorGrid2D& bg, int min_interior) {
  EmbeddedDomain2D d;
  d.background = bg;
  d.boundary_value = g;
  const int nx = bg.x.n_cells, ny = bg.y.n_cells;
  const auto& X = bg.x.nodes;
  const auto& Y = bg.y.nodes;
  std::vector<char> indicator((nx + 1) * (ny + 1));
  d.inside.assign((nx + 1) * (ny + 1), 0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      bool in = ind(X[i], Y[j]);
      indicator[j * (nx + 1) + i] = in;
      bool edge = i == 0 || j == 0 || i == nx || j == ny;
      d.inside[j * (nx + 1) + i] = in && !edge;
    }
  const double hx = (bg.x.b - bg.x.a) / nx;
  const double hy = (bg.y.b - bg.y.a) / ny;
  d.x_lines.resize(ny + 1);
  std::vector<char> li, lind;
  for (int j = 0; j <= ny; ++j) {
    li.assign(d.inside.begin() + j * (nx + 1), d.inside.begin() + (j + 1) * (nx + 1));
    lind.assign(indicator.begin() + j * (nx + 1), indicator.begin() + (j + 1) * (nx + 1));
    double yj = Y[j];
    d.x_lines[j] = scan_line(X, j, li, lind, [&](double x) { return ind(x, yj); }, hx);
  }
  d.y_lines.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    li.resize(ny + 1);
    lind.resize(ny + 1);
    for (int j = 0; j <= ny; ++j) {
      li[j] = d.inside[j * (nx + 1) + i];
      lind[j] = indicator[j * (nx + 1) + i];
    }
    double xi = X[i];
    d.y_lines[i] = scan_line(Y, i, li, lind, [&](double y) { return ind(xi, y); }, hy);
  }
  for (const auto* lines : {&d.x_lines, &d.y_lines})
    for (const auto& segs : *lines)
      for (const auto& s : segs)
        if (s.interior() < min_interior)
          throw Error(ErrorCode::UnderResolvedSegment,
                      "segment on line " + std::to_string(s.line) + " has " +
                          std::to_string(s.interior()) + " interior nodes");
  return d;
}

std::vector<double> segment_nodes(const Grid1D& axis, const Segment& s) {
  std::vector<double> x;
  x.reserve(s.interior() + 2);
  x.push_back(s.lo_x);
  for (int i = s.first; i <= s.last; ++i) x.push_back(axis.nodes[i]);
  x.push_back(s.hi_x);
  return x;
}

}  // namespace hjk
