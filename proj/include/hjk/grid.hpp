#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hjk {

/// Mapped 1D mesh: uniform computational nodes xi_i = i/N and physical nodes x_i.
struct Grid1D {
  int n_cells = 0;
  double delta_xi = 0.0;
  std::vector<double> nodes;
  std::vector<double> jacobian;
  double a = 0.0, b = 1.0;
  bool periodic = false;

  int n_nodes() const { return n_cells + 1; }
  double xi(int i) const { return i * delta_xi; }
  double cell_width(int i) const { return nodes[i + 1] - nodes[i]; }
};

struct TensorGrid2D {
  Grid1D x;
  Grid1D y;
};

struct GridOptions {
  bool periodic = false;
  int min_cells = 8;
  bool analytic_jacobian = false;  // only honoured for function mappings
};

/// Mapping given on the computational coordinate xi in [0, 1].
using Mapping = std::function<double(double)>;

Grid1D build_grid_1d(const std::vector<double>& nodes, const GridOptions& opt = {});
Grid1D build_grid_1d(const Mapping& map, int n_cells, double a, double b,
                     const GridOptions& opt = {}, const Mapping& derivative = {});

/// Fourth-order x_xi; central in the interior, one-sided five-point at the ends
/// unless periodic.
std::vector<double> jacobian_fd4(const std::vector<double>& nodes, double delta_xi,
                                 bool periodic);

Grid1D uniform_grid(double a, double b, int n_cells, bool periodic);
/// Uniform nodes with seeded jitter of amplitude amp*dx on interior nodes.
Grid1D perturbed_grid(double a, double b, int n_cells, std::uint64_t seed, double amp,
                      bool periodic);
/// Smooth mapping x = xi + sum_m c_m sin(2 pi m xi) with seeded coefficients,
/// scaled to keep x_xi within [1 - amp, 1 + amp] (before the affine stretch).
Grid1D smooth_random_grid(double a, double b, int n_cells, std::uint64_t seed, double amp,
                          bool periodic);
/// Symmetric geometric grading with the smallest cells at the centre and the
/// given largest-to-smallest cell ratio.
Grid1D geometric_grid(double a, double b, int n_cells, double ratio);

void write_grid_csv(std::ostream& os, const Grid1D& g);
Grid1D read_grid_csv(std::istream& is, bool periodic = false);

/// One maximal run of interior nodes along a grid line, bracketed by boundary
/// points at lo_x and hi_x (physical coordinate along the line).
struct Segment {
  int line = 0;    // row index j for x-lines, column index i for y-lines
  int first = 0;   // first interior node index along the line
  int last = 0;    // last interior node index along the line
  double lo_x = 0.0;
  double hi_x = 0.0;
  int interior() const { return last - first + 1; }
};

using Indicator = std::function<bool(double, double)>;
using BoundaryValue = std::function<double(double, double, double)>;

struct EmbeddedDomain2D {
  TensorGrid2D background;
  std::vector<std::vector<Segment>> x_lines;  // per row j
  std::vector<std::vector<Segment>> y_lines;  // per column i
  std::vector<char> inside;                   // row-major, (nx+1) per row
  BoundaryValue boundary_value;

  int nx() const { return background.x.n_cells; }
  int ny() const { return background.y.n_cells; }
  bool is_inside(int i, int j) const { return inside[j * (nx() + 1) + i] != 0; }
};

/// Interior nodes are background nodes where the indicator holds and which
/// are not on the box edge; box-edge nodes inside the domain act as boundary
/// points. Segments shorter than min_interior raise under-resolved-segment.
EmbeddedDomain2D embed_domain_2d(const Indicator& inside, const BoundaryValue& g,
                                 const TensorGrid2D& background, int min_interior = 8);

/// Physical node coordinates of a segment, boundary points included.
std::vector<double> segment_nodes(const Grid1D& axis, const Segment& s);

}  // namespace hjk
