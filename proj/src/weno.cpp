#include "hjk/weno.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hjk/error.hpp"

namespace hjk {

namespace {

constexpr double kMaxCondition = 1e12;

int basis_size(Basis basis, int n) {
  switch (basis) {
    case Basis::Gamma6: return 6;
    case Basis::Gamma4: return 4;
    case Basis::Gamma4Quad: return 5;
    case Basis::Poly: return n;
  }
  return n;
}

// Basis function n at t. Exponentials come last so the polynomial part is the
// leading block in every space.
double basis_value(Basis basis, int n, double t, double b) {
  int npoly = 0;
  switch (basis) {
    case Basis::Gamma6: npoly = 4; break;
    case Basis::Gamma4: npoly = 2; break;
    case Basis::Gamma4Quad: npoly = 3; break;
    case Basis::Poly: return std::pow(t, n);
  }
  if (n < npoly) return std::pow(t, n);
  return n == npoly ? std::exp(b * t) : std::exp(-b * t);
}

// a * int_{-d}^0 e^{a t} t^m dt.
double poly_moment(double a, double d, int m) {
  double x = a * d;
  double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (x <= 40.0) {
    // e^{-x} sum_{l>=0} m! a^{1+l} d^{m+1+l} / (m+1+l)!
    double term = a * std::pow(d, m + 1) / (m + 1);
    double sum = 0.0;
    for (int l = 0; l < 400; ++l) {
      sum += term;
      term *= x / (m + 2 + l);
      if (term < 1e-18 * sum) break;
    }
    return sign * std::exp(-x) * sum;
  }
  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  double partial = 0.0;
  double xj = 1.0;
  double jf = 1.0;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) {
      xj *= x;
      jf *= j;
    }
    partial += xj / jf;
  }
  return sign * fact / std::pow(a, m) * (1.0 - std::exp(-x) * partial);
}

// a * int_{-d}^0 e^{(a+s) t} dt.
double exp_moment(double a, double s, double d) {
  double z = (a + s) * d;
  if (std::abs(z) < 1e-5) return a * d * (1.0 - z / 2.0 + z * z / 6.0);
  return a * (-std::expm1(-z)) / (a + s);
}

}  // namespace

std::vector<double> basis_moments(double a, double b, double d, Basis basis, int n) {
  int size = basis_size(basis, n);
  std::vector<double> m(size);
  int npoly = basis == Basis::Gamma6 ? 4 : basis == Basis::Gamma4 ? 2
              : basis == Basis::Gamma4Quad ? 3 : size;
  for (int k = 0; k < npoly; ++k) m[k] = poly_moment(a, d, k);
  if (npoly < size) {
    m[npoly] = exp_moment(a, b, d);
    m[npoly + 1] = exp_moment(a, -b, d);
  }
  return m;
}

namespace {

Eigen::MatrixXd basis_matrix(Basis basis, std::span<const double> offsets, double b) {
  const int n = static_cast<int>(offsets.size());
  Eigen::MatrixXd V(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) V(j, k) = basis_value(basis, k, offsets[j], b);
  return V;
}

// (V^T)^{-1} after the conditioning check.
Eigen::MatrixXd inverse_transpose(Basis basis, std::span<const double> offsets, double b) {
  const int n = static_cast<int>(offsets.size());
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidParameter, "tension parameter must be positive");
  Eigen::MatrixXd Vt = basis_matrix(basis, offsets, b).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smin = sv(n - 1);
  if (!(smin > 0.0) || sv(0) / smin > kMaxCondition)
    throw Error(ErrorCode::IllConditionedBasis,
                "interpolation matrix condition " + std::to_string(sv(0) / smin));
  return svd.solve(Eigen::MatrixXd::Identity(n, n));
}

void apply_inverse(const double* inv, int n, const std::vector<double>& m, double* out) {
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += inv[r * n + c] * m[c];
    out[r] = s;
  }
}

}  // namespace

std::vector<double> exp_quadrature_coeffs(double a, double b, std::span<const double> offsets,
                                          double cell, Basis basis) {
  const int n = static_cast<int>(offsets.size());
  if (!(a > 0.0) || !(b > 0.0) || !(cell > 0.0))
    throw Error(ErrorCode::InvalidParameter, "quadrature needs positive alpha, lambda and cell");
  if (basis_size(basis, n) != n)
    throw Error(ErrorCode::Shape, "basis size does not match stencil");
  Eigen::MatrixXd inv = inverse_transpose(basis, offsets, b);
  std::vector<double> mom = basis_moments(a, b, cell, basis, n);
  Eigen::VectorXd c = inv * Eigen::Map<Eigen::VectorXd>(mom.data(), n);
  return {c.data(), c.data() + n};
}

bool linear_weights(QuadratureTable& t) {
  if (t.size != 6) throw Error(ErrorCode::Shape, "linear weights need a six-point stencil");
  double d0 = t.global[0] / t.sub[0][0];
  double d2 = t.global[5] / t.sub[2][3];
  t.d = {d0, 1.0 - d0 - d2, d2};
  double scale = 0.0;
  for (double g : t.global) scale = std::max(scale, std::abs(g));
  double res = 0.0;
  for (int j = 1; j <= 4; ++j) {
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
      if (j - r >= 0 && j - r <= 3) s += t.d[r] * t.sub[r][j - r];
    res = std::max(res, std::abs(t.global[j] - s));
  }
  t.residual = scale > 0.0 ? res / scale : res;
  if (!(t.residual <= 1e-10))
    throw Error(ErrorCode::InconsistentWeights,
                "linear weight residual " + std::to_string(t.residual));
  return t.d[0] >= 0.0 && t.d[1] >= 0.0 && t.d[2] >= 0.0;
}

std::vector<double> undivided_diff_coeffs(int m, std::span<const double> offsets) {
  const int n = static_cast<int>(offsets.size());
  if (m < 0 || n <= m) throw Error(ErrorCode::InsufficientStencil, "stencil too small for order");
  double scale = 0.0;
  for (double o : offsets) scale = std::max(scale, std::abs(o));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(offsets[i] - offsets[j]) <= 1e-14 * std::max(scale, 1.0))
        throw Error(ErrorCode::SingularSystem, "duplicate stencil nodes");
  Eigen::MatrixXd Vt(n, n);
  for (int k = 0; k < n; ++k) {
    double f = 1.0;
    for (int l = 0; l < n; ++l) {
      if (l > 0) f *= l;
      Vt(l, k) = std::pow(offsets[k], l) / f;
    }
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(m) = 1.0;
  Eigen::VectorXd c = Vt.fullPivLu().solve(e);
  return {c.data(), c.data() + n};
}

StencilBasis prepare_stencil(double b, std::span<const double> offsets, int anchor,
                             double cell) {
  StencilBasis sb;
  sb.size = static_cast<int>(offsets.size());
  if (sb.size < 2 || sb.size > 6) throw Error(ErrorCode::InsufficientStencil, "stencil size");
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidParameter, "cell width must be positive");
  std::copy(offsets.begin(), offsets.end(), sb.offsets.begin());
  sb.anchor = anchor;
  sb.cell = cell;
  sb.b = b;
  sb.basis = sb.size == 6 ? Basis::Gamma6
             : sb.size == 5 ? Basis::Gamma4Quad
             : sb.size == 4 ? Basis::Gamma4 : Basis::Poly;
  Eigen::MatrixXd inv = inverse_transpose(sb.basis, offsets, b);
  sb.inv_global.resize(sb.size * sb.size);
  for (int r = 0; r < sb.size; ++r)
    for (int c = 0; c < sb.size; ++c) sb.inv_global[r * sb.size + c] = inv(r, c);
  QuadratureTable& t = sb.shape;
  t.size = sb.size;
  t.offsets = sb.offsets;
  t.cell = cell;
  t.anchor = anchor;
  if (sb.size == 6) {
    for (int r = 0; r < 3; ++r) {
      auto sub = offsets.subspan(r, 4);
      Eigen::MatrixXd si = inverse_transpose(Basis::Gamma4, sub, b);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sb.inv_sub[r][i * 4 + j] = si(i, j);
      auto c2 = undivided_diff_coeffs(2, sub);
      auto c3 = undivided_diff_coeffs(3, sub);
      std::copy(c2.begin(), c2.end(), t.udd2[r].begin());
      std::copy(c3.begin(), c3.end(), t.udd3[r].begin());
    }
    for (int r = 0; r < 4; ++r) {
      auto win = offsets.subspan(r, 3);
      auto c1 = undivided_diff_coeffs(1, win);
      auto c2 = undivided_diff_coeffs(2, win);
      std::copy(c1.begin(), c1.end(), t.fd1[r].begin());
      std::copy(c2.begin(), c2.end(), t.fd2[r].begin());
    }
    t.filter = true;
  }
  return sb;
}

QuadratureTable build_quadrature_table(const StencilBasis& sb, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidParameter, "kernel parameter must be positive");
  QuadratureTable t = sb.shape;
  auto mom = basis_moments(a, sb.b, sb.cell, sb.basis, sb.size);
  apply_inverse(sb.inv_global.data(), sb.size, mom, t.global.data());
  if (sb.size == 6) {
    auto m4 = basis_moments(a, sb.b, sb.cell, Basis::Gamma4, 4);
    for (int r = 0; r < 3; ++r) apply_inverse(sb.inv_sub[r].data(), 4, m4, t.sub[r].data());
    t.weno = linear_weights(t);
  }
  return t;
}

QuadratureTable build_quadrature_table(double a, double b, std::span<const double> offsets,
                                       int anchor, double cell) {
  return build_quadrature_table(prepare_stencil(b, offsets, anchor, cell), a);
}

Smoothness smoothness_indicators(const double* w, const QuadratureTable& t) {
  Smoothness s;
  for (int r = 0; r < 3; ++r) {
    double d2 = 0.0, d3 = 0.0;
    for (int j = 0; j < 4; ++j) {
      d2 += t.udd2[r][j] * w[r + j];
      d3 += t.udd3[r][j] * w[r + j];
    }
    s.beta[r] = d2 * d2 + d3 * d3;
  }
  s.tau = std::abs(s.beta[0] - s.beta[2]);
  return s;
}

std::array<double, 3> nonlinear_weights(const std::array<double, 3>& beta, double tau,
                                        const std::array<double, 3>& d, double eps) {
  std::array<double, 3> w{};
  double sum = 0.0;
  for (int r = 0; r < 3; ++r) {
    double q = beta[r] / (eps + tau);
    w[r] = d[r] * (1.0 + tau / (eps + beta[r]) + 0.5 * q * q);
    sum += w[r];
  }
  for (auto& x : w) x /= sum;
  return w;
}

double filter_theta(const double* w, const QuadratureTable& t, double eps) {
  if (!t.filter) return 1.0;
  double lo = 0.0, hi = 0.0;
  for (int r = 0; r < 4; ++r) {
    double d1 = 0.0, d2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      d1 += t.fd1[r][j] * w[r + j];
      d2 += t.fd2[r][j] * w[r + j];
    }
    double v = std::abs(d1) + std::abs(d2);
    if (r == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return (lo + eps) / (hi + eps);
}

double weno_integral(const double* w, const QuadratureTable& t, double eps) {
  if (!t.weno) return linear_integral(w, t);
  Smoothness s = smoothness_indicators(w, t);
  auto om = nonlinear_weights(s.beta, s.tau, t.d, eps);
  double v = 0.0;
  for (int r = 0; r < 3; ++r) {
    double jr = 0.0;
    for (int j = 0; j < 4; ++j) jr += t.sub[r][j] * w[r + j];
    v += om[r] * jr;
  }
  return v;
}

CellReconstruction reconstruct_cell_integral(const double* w, const QuadratureTable& t,
                                             const WenoConfig& config) {
  CellReconstruction c;
  c.theta = filter_theta(w, t, config.epsilon);
  c.sigma = smoothstep(2.0 * c.theta * c.theta);
  if (!t.weno) {
    c.value = linear_integral(w, t);
    c.omega = t.d;
    return c;
  }
  Smoothness s = smoothness_indicators(w, t);
  c.beta = s.beta;
  c.tau = s.tau;
  c.omega = nonlinear_weights(s.beta, s.tau, t.d, config.epsilon);
  for (int r = 0; r < 3; ++r) {
    double jr = 0.0;
    for (int j = 0; j < 4; ++j) jr += t.sub[r][j] * w[r + j];
    c.value += c.omega[r] * jr;
  }
  return c;
}

}  // namespace hjk
