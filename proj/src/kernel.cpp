#include "hjk/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "hjk/error.hpp"

namespace hjk {

namespace {

int wrap(int j, int n) {
  int r = j % n;
  return r < 0 ? r + n : r;
}

}  // namespace

LineGeometry LineGeometry::uniform(int n_cells, double h, bool periodic) {
  LineGeometry g;
  g.pos.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) g.pos[i] = i;
  g.href = h;
  g.periodic = periodic;
  return g;
}

LineGeometry LineGeometry::from_nodes(const std::vector<double>& x, double h, bool periodic) {
  LineGeometry g;
  g.pos.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) g.pos[i] = (x[i] - x[0]) / h;
  g.href = h;
  g.periodic = periodic;
  return g;
}

int LineKernel::find_or_add(const std::vector<double>& off, int anchor, double cell) {
  const int m = static_cast<int>(off.size());
  for (int t = 0; t < static_cast<int>(stencils_.size()); ++t) {
    const auto& q = stencils_[t];
    if (q.size != m || q.anchor != anchor || std::abs(q.cell - cell) > 1e-12) continue;
    bool same = true;
    for (int j = 0; j < m && same; ++j) same = std::abs(q.offsets[j] - off[j]) <= 1e-12;
    if (same) return t;
  }
  stencils_.push_back(prepare_stencil(config_.lambda_dx, off, anchor, cell));
  return static_cast<int>(stencils_.size()) - 1;
}

LineKernel::LineKernel(const LineGeometry& g, double alpha, const WenoConfig& config)
    : LineKernel(g, config) {
  set_alpha(alpha);
}

LineKernel::LineKernel(const LineGeometry& g, const WenoConfig& config)
    : geom_(g), n_(g.n_cells()), periodic_(g.periodic), href_(g.href), config_(config) {
  if (n_ < 1) throw Error(ErrorCode::InsufficientStencil, "line needs at least one cell");
  if (periodic_ && n_ < 6)
    throw Error(ErrorCode::InsufficientStencil, "periodic line needs six cells");
  const auto& p = g.pos;
  const double length = p[n_] - p[0];
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidParameter, "inverted line bounds");
  for (int i = 0; i < n_; ++i)
    if (!(p[i + 1] > p[i])) throw Error(ErrorCode::InvalidMapping, "line nodes not increasing");

  auto position = [&](int j) {
    if (!periodic_) return p[j];
    int r = wrap(j, n_);
    int q = (j - r) / n_;
    return p[r] + q * length;
  };
  const int m = periodic_ ? 6 : std::min(6, n_ + 1);
  rt_.assign(n_ + 1, -1);
  lt_.assign(n_ + 1, -1);
  ridx_.assign(n_ + 1, {});
  lidx_.assign(n_ + 1, {});
  std::vector<double> off(m);
  for (int i = 1; i <= n_; ++i) {
    int s = periodic_ ? i - 3 : std::clamp(i - 3, 0, n_ + 1 - m);
    for (int j = 0; j < m; ++j) {
      off[j] = position(s + j) - position(i);
      ridx_[i][j] = periodic_ ? wrap(s + j, n_) : s + j;
    }
    rt_[i] = find_or_add(off, i - s, position(i) - position(i - 1));
  }
  for (int i = 0; i < n_; ++i) {
    int s = periodic_ ? i - 2 : std::clamp(i - 2, 0, n_ + 1 - m);
    // Mirrored frame: node s+m-1-j becomes entry j.
    for (int j = 0; j < m; ++j) {
      int node = s + m - 1 - j;
      off[j] = position(i) - position(node);
      lidx_[i][j] = periodic_ ? wrap(node, n_) : node;
    }
    lt_[i] = find_or_add(off, s + m - 1 - i, position(i + 1) - position(i));
  }
}

void LineKernel::set_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::InvalidParameter, "kernel parameter must be positive");
  // Work in units of href from here on.
  alpha_ = alpha * href_;
  const auto& p = geom_.pos;
  const double length = p[n_] - p[0];
  mu_ = alpha_ * length > 700.0 ? 0.0 : std::exp(-alpha_ * length);
  if (!(mu_ < 1.0)) throw Error(ErrorCode::InvalidParameter, "kernel decay factor must be < 1");
  decay_.resize(n_);
  for (int i = 0; i < n_; ++i) decay_[i] = std::exp(-alpha_ * (p[i + 1] - p[i]));
  ea_.resize(n_ + 1);
  eb_.resize(n_ + 1);
  for (int i = 0; i <= n_; ++i) {
    ea_[i] = std::exp(-alpha_ * (p[i] - p[0]));
    eb_[i] = std::exp(-alpha_ * (p[n_] - p[i]));
  }
  tables_.clear();
  tables_.reserve(stencils_.size());
  for (const auto& sb : stencils_) tables_.push_back(build_quadrature_table(sb, alpha_));
}

int LineKernel::gather_right(const double* v, int i, double* w) const {
  const auto& t = tables_[rt_[i]];
  for (int j = 0; j < t.size; ++j) w[j] = v[ridx_[i][j]];
  return t.size;
}

int LineKernel::gather_left(const double* v, int i, double* w) const {
  const auto& t = tables_[lt_[i]];
  for (int j = 0; j < t.size; ++j) w[j] = v[lidx_[i][j]];
  return t.size;
}

void LineKernel::local_right(const double* v, bool weno, double* j) const {
  double w[6];
  j[0] = 0.0;
  for (int i = 1; i <= n_; ++i) {
    const auto& t = tables_[rt_[i]];
    gather_right(v, i, w);
    j[i] = weno ? weno_integral(w, t, config_.epsilon) : linear_integral(w, t);
  }
}

void LineKernel::local_left(const double* v, bool weno, double* j) const {
  double w[6];
  for (int i = 0; i < n_; ++i) {
    const auto& t = tables_[lt_[i]];
    gather_left(v, i, w);
    j[i] = weno ? weno_integral(w, t, config_.epsilon) : linear_integral(w, t);
  }
  j[n_] = 0.0;
}

void LineKernel::sweep_right(const double* j, double* out) const {
  out[0] = 0.0;
  for (int i = 1; i <= n_; ++i) out[i] = decay_[i - 1] * out[i - 1] + j[i];
}

void LineKernel::sweep_left(const double* j, double* out) const {
  out[n_] = 0.0;
  for (int i = n_ - 1; i >= 0; --i) out[i] = decay_[i] * out[i + 1] + j[i];
}

void LineKernel::filters(const double* v, double* sr, double* sl) const {
  double w[6];
  const double eps = config_.epsilon;
  for (int i = 0; i <= n_; ++i) {
    if (rt_[i] >= 0) {
      gather_right(v, i, w);
      sr[i] = filter_sigma(w, tables_[rt_[i]], eps);
    } else {
      sr[i] = 1.0;
    }
    if (lt_[i] >= 0) {
      gather_left(v, i, w);
      sl[i] = filter_sigma(w, tables_[lt_[i]], eps);
    } else {
      sl[i] = 1.0;
    }
  }
  if (periodic_) {
    sr[0] = sr[n_];
    sl[n_] = sl[0];
  }
}

ConvolutionState LineKernel::convolve(const double* v, bool weno, bool right, bool left) const {
  ConvolutionState s;
  const int n = n_ + 1;
  s.j_right.assign(n, 0.0);
  s.j_left.assign(n, 0.0);
  s.i_right.assign(n, 0.0);
  s.i_left.assign(n, 0.0);
  s.i_zero.assign(n, 0.0);
  if (right) {
    local_right(v, weno, s.j_right.data());
    sweep_right(s.j_right.data(), s.i_right.data());
  }
  if (left) {
    local_left(v, weno, s.j_left.data());
    sweep_left(s.j_left.data(), s.i_left.data());
  }
  if (right && left)
    for (int i = 0; i < n; ++i) s.i_zero[i] = 0.5 * (s.i_left[i] + s.i_right[i]);
  return s;
}

ConvolutionState convolve_sweeps(const LineKernel& k, const std::vector<double>& j_left,
                                 const std::vector<double>& j_right) {
  const int n = k.n_nodes();
  if (static_cast<int>(j_left.size()) != n || static_cast<int>(j_right.size()) != n)
    throw Error(ErrorCode::Shape, "local integral arrays must match the line");
  ConvolutionState s;
  s.j_left = j_left;
  s.j_right = j_right;
  s.i_left.resize(n);
  s.i_right.resize(n);
  s.i_zero.resize(n);
  k.sweep_right(j_right.data(), s.i_right.data());
  k.sweep_left(j_left.data(), s.i_left.data());
  for (int i = 0; i < n; ++i) s.i_zero[i] = 0.5 * (s.i_left[i] + s.i_right[i]);
  return s;
}

BoundaryClosure LineKernel::closure(ClosureKind kind, const double* v, const ConvolutionState& s,
                                    double c_a, double c_b) const {
  BoundaryClosure c;
  c.kind = kind;
  c.mu = mu_;
  const double mu = mu_;
  if (kind == ClosureKind::Periodic) {
    c.a_r = s.i_right[n_] / (1.0 - mu);
    c.b_l = s.i_left[0] / (1.0 - mu);
    c.a_0 = s.i_zero[n_] / (1.0 - mu);
    c.b_0 = s.i_zero[0] / (1.0 - mu);
  } else {
    c.a_r = v[0] - c_a;
    c.b_l = v[n_] - c_b;
    double pa = v[0] - s.i_zero[0] - c_a;
    double pb = v[n_] - s.i_zero[n_] - c_b;
    c.a_0 = (pa - mu * pb) / (1.0 - mu * mu);
    c.b_0 = (pb - mu * pa) / (1.0 - mu * mu);
  }
  return c;
}

void LineKernel::apply(Op which, const double* v, const ConvolutionState& s,
                       const BoundaryClosure& c, double* out) const {
  switch (which) {
    case Op::R:
      for (int i = 0; i <= n_; ++i) out[i] = v[i] - (s.i_right[i] + c.a_r * ea_[i]);
      break;
    case Op::L:
      for (int i = 0; i <= n_; ++i) out[i] = v[i] - (s.i_left[i] + c.b_l * eb_[i]);
      break;
    case Op::Zero:
      for (int i = 0; i <= n_; ++i)
        out[i] = v[i] - (s.i_zero[i] + c.a_0 * ea_[i] + c.b_0 * eb_[i]);
      break;
  }
}

std::vector<double> LineKernel::op(Op which, const std::vector<double>& v, bool weno, double c_a,
                                   double c_b) const {
  if (static_cast<int>(v.size()) != n_ + 1)
    throw Error(ErrorCode::Shape, "operand length does not match the line");
  auto s = convolve(v.data(), weno);
  auto c = closure(periodic_ ? ClosureKind::Periodic : ClosureKind::DerivativeData, v.data(), s,
                   c_a, c_b);
  std::vector<double> out(n_ + 1);
  apply(which, v.data(), s, c, out.data());
  return out;
}

void LineKernel::direct_sums(const double* v, bool weno, double* ir, double* il) const {
  std::vector<double> jr(n_ + 1), jl(n_ + 1);
  local_right(v, weno, jr.data());
  local_left(v, weno, jl.data());
  for (int i = 0; i <= n_; ++i) {
    double s = 0.0;
    for (int m = 1; m <= i; ++m) {
      double f = 1.0;
      for (int c = m; c < i; ++c) f *= decay_[c];
      s += f * jr[m];
    }
    ir[i] = s;
    s = 0.0;
    for (int m = i; m < n_; ++m) {
      double f = 1.0;
      for (int c = i; c < m; ++c) f *= decay_[c];
      s += f * jl[m];
    }
    il[i] = s;
  }
}

BiasedDerivatives LineKernel::biased(const std::vector<double>& phi, int k,
                                     const BoundaryDerivs* bd, bool use_filter) const {
  if (k < 1 || k > 3) throw Error(ErrorCode::InvalidOrder, "partial sum order must be 1, 2 or 3");
  const int n = n_ + 1;
  if (static_cast<int>(phi.size()) != n)
    throw Error(ErrorCode::Shape, "operand length does not match the line");
  if (!periodic_ && (bd == nullptr || bd->count < k))
    throw Error(ErrorCode::IncompleteClosure, "missing boundary derivative data");
  const double a = alpha_;
  const double scale = a / href_;
  const ClosureKind kind = periodic_ ? ClosureKind::Periodic : ClosureKind::DerivativeData;

  std::vector<double> sr(n, 1.0), sl(n, 1.0);
  if (use_filter && k > 1) filters(phi.data(), sr.data(), sl.data());

  BiasedDerivatives out;
  out.minus.assign(n, 0.0);
  out.plus.assign(n, 0.0);
  auto s1 = convolve(phi.data(), true);
  std::vector<double> w1(n), w2(n), w3(n), x0(n), tmp(n);
  for (int side = 0; side < 2; ++side) {
    const bool right = side == 0;
    const Op d = right ? Op::R : Op::L;
    const auto& ex = right ? ea_ : eb_;
    const double sgn = right ? 1.0 : -1.0;
    auto& o = right ? out.minus : out.plus;
    const auto& sig = right ? sr : sl;

    // Derivatives in units of href; level one carries the slope at the end
    // where this operator's integral starts.
    std::array<double, 4> dd{};
    double ca = 0.0, cb = 0.0;
    if (!periodic_) {
      for (int m = 1; m <= k; ++m) dd[m] = (right ? bd->a[m] : bd->b[m]) * std::pow(href_, m);
      if (right) ca = dd[1] / a;
      else cb = -dd[1] / a;
    }
    auto c1 = closure(kind, phi.data(), s1, ca, cb);
    apply(d, phi.data(), s1, c1, w1.data());
    if (k == 1) {
      for (int i = 0; i < n; ++i) o[i] = sgn * scale * w1[i];
      continue;
    }

    const double q = right ? -1.0 / a : 1.0 / a;
    double corr2 = 0.0, corr3 = 0.0;
    if (!periodic_) {
      double qm = q;
      for (int m = 2; m <= k; ++m) {
        qm *= q;
        corr2 += qm * dd[m];
        corr3 += (m - 1) * qm * dd[m];
      }
    }
    for (int i = 0; i < n; ++i) tmp[i] = w1[i] - corr2 * ex[i];
    auto s2 = convolve(tmp.data(), false, right, !right);
    auto c2 = closure(kind, tmp.data(), s2);
    apply(d, tmp.data(), s2, c2, w2.data());
    if (k == 2) {
      for (int i = 0; i < n; ++i) o[i] = sgn * scale * (w1[i] + sig[i] * w2[i]);
      continue;
    }
    for (int i = 0; i < n; ++i) tmp[i] = w2[i] + corr3 * ex[i];
    auto s3 = convolve(tmp.data(), false);
    auto c3 = closure(kind, tmp.data(), s3);
    apply(d, tmp.data(), s3, c3, w3.data());
    apply(Op::Zero, tmp.data(), s3, c3, x0.data());
    for (int i = 0; i < n; ++i)
      o[i] = sgn * scale * (w1[i] + sig[i] * (w2[i] + w3[i] - x0[i]));
  }
  if (periodic_) {
    out.minus[n_] = out.minus[0];
    out.plus[n_] = out.plus[0];
  }
  return out;
}

std::vector<double> LineKernel::second_derivative(const std::vector<double>& phi, int k,
                                                  const BoundaryDerivs* bd) const {
  if (k < 1 || k > 3) throw Error(ErrorCode::InvalidOrder, "partial sum order must be 1, 2 or 3");
  const int n = n_ + 1;
  if (static_cast<int>(phi.size()) != n)
    throw Error(ErrorCode::Shape, "operand length does not match the line");
  if (!periodic_ && (bd == nullptr || bd->count < 2))
    throw Error(ErrorCode::IncompleteClosure, "missing boundary second derivatives");
  const double a = alpha_;
  const ClosureKind kind = periodic_ ? ClosureKind::Periodic : ClosureKind::DerivativeData;
  std::vector<double> v = phi, w(n), sum(n, 0.0);
  for (int p = 1; p <= k; ++p) {
    auto s = convolve(v.data(), false);
    double ca = 0.0, cb = 0.0;
    if (!periodic_ && p == 1) {
      ca = -bd->a[2] * href_ * href_ / (a * a);
      cb = -bd->b[2] * href_ * href_ / (a * a);
    }
    auto c = closure(kind, v.data(), s, ca, cb);
    apply(Op::Zero, v.data(), s, c, w.data());
    for (int i = 0; i < n; ++i) sum[i] += w[i];
    v.swap(w);
  }
  const double scale = -(a / href_) * (a / href_);
  for (auto& x : sum) x *= scale;
  if (periodic_) sum[n_] = sum[0];
  return sum;
}

BiasedDerivatives biased_derivatives_periodic(const LineKernel& k, const std::vector<double>& phi,
                                              int order, bool use_filter) {
  if (!k.periodic()) throw Error(ErrorCode::InvalidParameter, "line is not periodic");
  return k.biased(phi, order, nullptr, use_filter);
}

BiasedDerivatives biased_derivatives_nonperiodic(const LineKernel& k,
                                                 const std::vector<double>& phi, int order,
                                                 const BoundaryDerivs& bd, bool use_filter) {
  if (k.periodic()) throw Error(ErrorCode::InvalidParameter, "line is periodic");
  return k.biased(phi, order, &bd, use_filter);
}

double LineKernel::boundary_spacing() const {
  return alpha_ > 0.0 ? 1.0 / alpha_ : 0.0;
}

namespace {

// Indices of np nodes counted from one end whose distances from that end
// are at least j * spacing, shrinking the spacing until the stencil fits.
std::vector<int> spread_stencil(const LineGeometry& g, int np, double spacing, bool from_b) {
  const int n = g.n_cells() + 1;
  auto dist = [&](int j) {
    return from_b ? g.pos[n - 1] - g.pos[n - 1 - j] : g.pos[j] - g.pos[0];
  };
  std::vector<int> idx(np);
  for (double d = std::max(spacing, 1.0); ; d *= 0.5) {
    int j = 0;
    bool ok = true;
    for (int q = 0; q < np; ++q) {
      while (j < n && dist(j) < q * d * (1.0 - 1e-9)) ++j;
      if (j >= n || (q > 0 && j <= idx[q - 1])) {
        ok = false;
        break;
      }
      idx[q] = j;
    }
    if (ok) return idx;
    if (d < 1e-14) break;
  }
  for (int q = 0; q < np; ++q) idx[q] = q;
  return idx;
}

}  // namespace

BoundaryDerivs boundary_derivatives(const LineGeometry& g, const double* v, int count,
                                    double spacing) {
  BoundaryDerivs bd;
  bd.count = count;
  const int n = g.n_cells() + 1;
  std::vector<double> off;
  for (int m = 1; m <= count; ++m) {
    // The m-th derivative enters with weight alpha^-m, so order count+1-m
    // keeps the sums at order count; wider stencils buy accuracy nobody uses
    // and their large weights destabilise long steps.
    int np = std::min(m + std::max(1, count + 1 - m), n);
    if (np <= m) {
      bd.a[m] = bd.b[m] = 0.0;
      continue;
    }
    double hm = std::pow(g.href, m);
    off.resize(np);
    auto ia = spread_stencil(g, np, spacing, false);
    for (int j = 0; j < np; ++j) off[j] = g.pos[ia[j]] - g.pos[0];
    auto ca = undivided_diff_coeffs(m, off);
    double sum = 0.0;
    for (int j = 0; j < np; ++j) sum += ca[j] * v[ia[j]];
    bd.a[m] = sum / hm;
    auto ib = spread_stencil(g, np, spacing, true);
    for (int j = 0; j < np; ++j) off[j] = g.pos[n - 1 - ib[j]] - g.pos[n - 1];
    auto cb = undivided_diff_coeffs(m, off);
    sum = 0.0;
    for (int j = 0; j < np; ++j) sum += cb[j] * v[n - 1 - ib[j]];
    bd.b[m] = sum / hm;
  }
  return bd;
}

}  // namespace hjk
