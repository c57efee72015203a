#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace hjk {

struct WenoConfig {
  double lambda_dx = 1.0;  // tension parameter times the reference spacing
  double epsilon = 1e-6;
};

/// Interpolation space used for a stencil.
enum class Basis {
  Gamma6,      // 1, t, t^2, t^3, e^{bt}, e^{-bt}
  Gamma4,      // 1, t, e^{bt}, e^{-bt}
  Gamma4Quad,  // Gamma4 plus t^2 (five-point stencils)
  Poly,        // 1, t, ..., t^{n-1}
};

/// Precomputed quadrature and difference functionals for the cell to the left
/// of an anchor node. Offsets are in units of a reference spacing h; the cell
/// is [-cell, 0]. Left-cell integrals use the mirrored frame with the node order
/// reversed, so one layout serves both directions.
struct QuadratureTable {
  int size = 6;
  std::array<double, 6> offsets{};
  double cell = 1.0;
  std::array<double, 6> global{};
  std::array<std::array<double, 4>, 3> sub{};
  std::array<double, 3> d{};
  double residual = 0.0;
  bool weno = false;
  int anchor = 3;  // index of the anchor node within the stencil
  std::array<std::array<double, 4>, 3> udd2{};
  std::array<std::array<double, 4>, 3> udd3{};
  std::array<std::array<double, 3>, 4> fd1{};
  std::array<std::array<double, 3>, 4> fd2{};
  bool filter = false;
};

struct CellReconstruction {
  std::array<double, 3> omega{};
  std::array<double, 3> beta{};
  double tau = 0.0;
  double theta = 1.0;
  double sigma = 1.0;
  double value = 0.0;
};

struct Smoothness {
  std::array<double, 3> beta{};
  double tau = 0.0;
};

/// Weights c with sum_j c_j v(t_j) = int_{-cell}^0 a e^{a t} v(t) dt for every v in
/// the basis span; a = alpha*h, b = lambda*h.
std::vector<double> exp_quadrature_coeffs(double a, double b, std::span<const double> offsets,
                                          double cell, Basis basis);

/// Exact moments int_{-d}^0 a e^{a t} phi_n(t) dt of the basis functions.
std::vector<double> basis_moments(double a, double b, double d, Basis basis, int n);

/// Fills d and residual; returns false when some d_r is negative.
bool linear_weights(QuadratureTable& table);

/// c with sum_n c_n v(t_n) = v^{(m)}(0) + O(h^{n}), offsets already scaled.
std::vector<double> undivided_diff_coeffs(int m, std::span<const double> offsets);

/// Alpha-independent part of a table: inverse interpolation maps and the
/// difference functionals. Built once per stencil geometry.
struct StencilBasis {
  int size = 6;
  std::array<double, 6> offsets{};
  int anchor = 3;
  double cell = 1.0;
  double b = 1.0;
  Basis basis = Basis::Gamma6;
  std::vector<double> inv_global;              // size x size, row-major V^{-T}
  std::array<std::array<double, 16>, 3> inv_sub{};
  QuadratureTable shape;                       // udd/fd coefficients filled in
};

StencilBasis prepare_stencil(double b, std::span<const double> offsets, int anchor, double cell);
QuadratureTable build_quadrature_table(const StencilBasis& basis, double a);

/// Builds the full table for one cell. Short stencils get a reduced basis and
/// linear quadrature only.
QuadratureTable build_quadrature_table(double a, double b, std::span<const double> offsets,
                                       int anchor, double cell);

Smoothness smoothness_indicators(const double* window, const QuadratureTable& table);

std::array<double, 3> nonlinear_weights(const std::array<double, 3>& beta, double tau,
                                        const std::array<double, 3>& d, double epsilon);

/// Clamped cubic smoothstep.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double filter_theta(const double* window, const QuadratureTable& table, double epsilon);

inline double filter_sigma(const double* window, const QuadratureTable& table, double epsilon) {
  double th = filter_theta(window, table, epsilon);
  return smoothstep(2.0 * th * th);
}

/// WENO value of the cell integral, falling back to the linear global rule when
/// the table has no valid weights.
double weno_integral(const double* window, const QuadratureTable& table, double epsilon);

inline double linear_integral(const double* window, const QuadratureTable& table) {
  double s = 0.0;
  for (int j = 0; j < table.size; ++j) s += table.global[j] * window[j];
  return s;
}

CellReconstruction reconstruct_cell_integral(const double* window, const QuadratureTable& table,
                                             const WenoConfig& config);

}  // namespace hjk
