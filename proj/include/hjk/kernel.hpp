#pragma once

#include <array>
#include <vector>

#include "hjk/weno.hpp"

namespace hjk {

/// Node positions of one line, in units of a reference spacing. For periodic
/// lines the last node is the image of the first.
struct LineGeometry {
  std::vector<double> pos;
  double href = 1.0;
  bool periodic = false;

  int n_cells() const { return static_cast<int>(pos.size()) - 1; }
  static LineGeometry uniform(int n_cells, double h, bool periodic);
  /// Physical coordinates; h is the reference spacing used for scaling.
  static LineGeometry from_nodes(const std::vector<double>& x, double h, bool periodic);
};

struct KernelParams {
  double alpha = 1.0;  // inverse length in the line coordinate
  double beta = 1.0;
  int order = 3;
};

enum class Op { L, R, Zero };
enum class ClosureKind { Periodic, DerivativeData };

struct ConvolutionState {
  std::vector<double> i_left, i_right, i_zero;
  std::vector<double> j_left, j_right;
};

struct BoundaryClosure {
  ClosureKind kind = ClosureKind::Periodic;
  double mu = 0.0;
  double a_r = 0.0, b_l = 0.0, a_0 = 0.0, b_0 = 0.0;
};

/// d^m phi/dx^m at the two ends, entry m for m = 1..count.
struct BoundaryDerivs {
  std::array<double, 4> a{};
  std::array<double, 4> b{};
  int count = 0;
};

struct BiasedDerivatives {
  std::vector<double> minus;
  std::vector<double> plus;
};

/// Kernel operators on one line. Stencil factorizations are built once per
/// geometry; set_alpha refreshes the alpha-dependent tables each time step.
class LineKernel {
 public:
  explicit LineKernel(const LineGeometry& geom, const WenoConfig& config = {});
  LineKernel(const LineGeometry& geom, double alpha, const WenoConfig& config = {});

  void set_alpha(double alpha);

  int n_cells() const { return n_; }
  int n_nodes() const { return n_ + 1; }
  bool periodic() const { return periodic_; }
  /// Kernel parameter times the reference spacing.
  double alpha_h() const { return alpha_; }
  /// 1/alpha in units of href: boundary stencils spread their points this far
  /// apart so their weights stay O(alpha) when the time step is large.
  double boundary_spacing() const;
  double href() const { return href_; }
  double mu() const { return mu_; }
  const std::vector<double>& decay() const { return decay_; }
  const std::vector<double>& exp_a() const { return ea_; }
  const std::vector<double>& exp_b() const { return eb_; }
  const WenoConfig& config() const { return config_; }

  /// Per-cell integrals: J_R for nodes 1..N (J[0] = 0), J_L for nodes 0..N-1.
  void local_right(const double* v, bool weno, double* j) const;
  void local_left(const double* v, bool weno, double* j) const;
  void sweep_right(const double* j, double* out) const;
  void sweep_left(const double* j, double* out) const;
  /// sigma_R from each node's right-integral stencil, sigma_L from the left one.
  void filters(const double* v, double* sigma_r, double* sigma_l) const;

  ConvolutionState convolve(const double* v, bool weno, bool right = true,
                            bool left = true) const;
  BoundaryClosure closure(ClosureKind kind, const double* v, const ConvolutionState& s,
                          double c_a = 0.0, double c_b = 0.0) const;
  void apply(Op op, const double* v, const ConvolutionState& s, const BoundaryClosure& c,
             double* out) const;

  /// D_op[v] using the line's own closure kind; c_a, c_b are the prescribed
  /// boundary values for derivative-data closures.
  std::vector<double> op(Op which, const std::vector<double>& v, bool weno, double c_a = 0.0,
                         double c_b = 0.0) const;

  /// Direct O(N^2) evaluation of I_R and I_L from the same local quadrature,
  /// kept for verification of the sweeps.
  void direct_sums(const double* v, bool weno, double* i_right, double* i_left) const;

  BiasedDerivatives biased(const std::vector<double>& phi, int order,
                           const BoundaryDerivs* bd = nullptr, bool use_filter = true) const;

  std::vector<double> second_derivative(const std::vector<double>& phi, int order,
                                        const BoundaryDerivs* bd = nullptr) const;

  const QuadratureTable& right_table(int i) const { return tables_[rt_[i]]; }
  const QuadratureTable& left_table(int i) const { return tables_[lt_[i]]; }
  int table_count() const { return static_cast<int>(tables_.size()); }
  /// Window of operand values for the node's right (or left, mirrored) stencil.
  int gather_right(const double* v, int i, double* w) const;
  int gather_left(const double* v, int i, double* w) const;

 private:
  int find_or_add(const std::vector<double>& offsets, int anchor, double cell);

  LineGeometry geom_;
  std::vector<StencilBasis> stencils_;
  int n_ = 0;
  bool periodic_ = false;
  double href_ = 1.0;
  double alpha_ = 1.0;
  double mu_ = 0.0;
  WenoConfig config_;
  std::vector<QuadratureTable> tables_;
  std::vector<int> rt_, lt_;
  std::vector<std::array<int, 6>> ridx_, lidx_;
  std::vector<double> decay_, ea_, eb_;
};

/// Free-function forms of the kernel operations.
ConvolutionState convolve_sweeps(const LineKernel& k, const std::vector<double>& j_left,
                                 const std::vector<double>& j_right);
BiasedDerivatives biased_derivatives_periodic(const LineKernel& k, const std::vector<double>& phi,
                                              int order, bool use_filter = true);
BiasedDerivatives biased_derivatives_nonperiodic(const LineKernel& k,
                                                 const std::vector<double>& phi, int order,
                                                 const BoundaryDerivs& bd,
                                                 bool use_filter = true);

/// One-sided finite-difference estimates of d^m v/dx^m, m = 1..count, at both
/// ends, accurate to order count+1-m (at least 1) where the line has enough
/// nodes. Point j of a stencil is the first node at least j * max(spacing, 1)
/// reference spacings from the end (halved until the stencil fits).
BoundaryDerivs boundary_derivatives(const LineGeometry& geom, const double* v, int count,
                                    double spacing = 0.0);

}  // namespace hjk
