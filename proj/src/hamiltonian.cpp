#include "hjk/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "hjk/error.hpp"

namespace hjk {

namespace {

double max_abs(double lo, double hi) { return std::max(std::abs(lo), std::abs(hi)); }

double min_abs(double lo, double hi) {
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return std::min(std::abs(lo), std::abs(hi));
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double max_abs_cos(double lo, double hi) {
  if (hi - lo >= kPi) return 1.0;
  // Extremes of |cos| sit at multiples of pi.
  double k = std::ceil(lo / kPi);
  if (k * kPi <= hi) return 1.0;
  return std::max(std::abs(std::cos(lo)), std::abs(std::cos(hi)));
}

double max_abs_sin(double lo, double hi) { return max_abs_cos(lo - kPi / 2, hi - kPi / 2); }

HamiltonianModel sampled_model(std::string name, int arity, HamiltonianFn h) {
  HamiltonianModel m;
  m.name = std::move(name);
  m.arity = arity;
  m.h = h;
  m.space_dependent = true;
  m.speed = [h, arity](const Box& b, const Point& pt) {
    constexpr int n = 33;
    std::array<double, 2> best{0.0, 0.0};
    const int nq = arity == 2 ? n : 1;
    for (int a = 0; a < n; ++a) {
      double p = b.p_lo + (b.p_hi - b.p_lo) * a / (n - 1);
      for (int c = 0; c < nq; ++c) {
        double q = nq == 1 ? 0.0 : b.q_lo + (b.q_hi - b.q_lo) * c / (n - 1);
        double dp = 1e-6 * std::max(1.0, std::abs(p));
        best[0] = std::max(best[0], std::abs(h(p + dp, q, pt) - h(p - dp, q, pt)) / (2 * dp));
        if (arity == 2) {
          double dq = 1e-6 * std::max(1.0, std::abs(q));
          best[1] = std::max(best[1], std::abs(h(p, q + dq, pt) - h(p, q - dq, pt)) / (2 * dq));
        }
      }
    }
    return std::array<double, 2>{1.1 * best[0], 1.1 * best[1]};
  };
  return m;
}

std::vector<std::string> model_names() {
  return {"linear",  "burgers",         "nonconvex_quartic",  "linear2d",
          "burgers2d", "cos2d",         "optimal_control",    "sin2d",
          "geometric_optics", "propagating_surface"};
}

HamiltonianModel make_model(const std::string& name) {
  HamiltonianModel m;
  m.name = name;
  if (name == "linear") {
    m.h = [](double p, double, const Point&) { return p; };
    m.speed = [](const Box&, const Point&) { return std::array<double, 2>{1.0, 0.0}; };
  } else if (name == "burgers") {
    m.h = [](double p, double, const Point&) { return 0.5 * (p + 1.0) * (p + 1.0); };
    m.speed = [](const Box& b, const Point&) {
      return std::array<double, 2>{max_abs(b.p_lo + 1.0, b.p_hi + 1.0), 0.0};
    };
  } else if (name == "nonconvex_quartic") {
    m.h = [](double p, double, const Point&) { return 0.25 * (p * p - 1.0) * (p * p - 4.0); };
    m.speed = [](const Box& b, const Point&) {
      auto d = [](double p) { return std::abs(p * p * p - 2.5 * p); };
      double s = std::max(d(b.p_lo), d(b.p_hi));
      const double c = std::sqrt(2.5 / 3.0);
      for (double p : {-c, c})
        if (p >= b.p_lo && p <= b.p_hi) s = std::max(s, d(p));
      return std::array<double, 2>{s, 0.0};
    };
  } else if (name == "linear2d") {
    m.arity = 2;
    m.h = [](double p, double q, const Point&) { return p + q + 1.0; };
    m.speed = [](const Box&, const Point&) { return std::array<double, 2>{1.0, 1.0}; };
  } else if (name == "burgers2d") {
    m.arity = 2;
    m.h = [](double p, double q, const Point&) { return 0.5 * (p + q + 1.0) * (p + q + 1.0); };
    m.speed = [](const Box& b, const Point&) {
      double s = max_abs(b.p_lo + b.q_lo + 1.0, b.p_hi + b.q_hi + 1.0);
      return std::array<double, 2>{s, s};
    };
  } else if (name == "cos2d") {
    m.arity = 2;
    m.h = [](double p, double q, const Point&) { return -std::cos(p + q + 1.0); };
    m.speed = [](const Box& b, const Point&) {
      double s = max_abs_sin(b.p_lo + b.q_lo + 1.0, b.p_hi + b.q_hi + 1.0);
      return std::array<double, 2>{s, s};
    };
  } else if (name == "optimal_control") {
    m.arity = 2;
    m.space_dependent = true;
    m.h = [](double p, double q, const Point& x) {
      double sy = std::sin(x.y);
      return sy * p + (std::sin(x.x) + sign(q)) * q - 0.5 * sy * sy - 1.0 + std::cos(x.x);
    };
    m.speed = [](const Box&, const Point& x) {
      return std::array<double, 2>{std::abs(std::sin(x.y)), std::abs(std::sin(x.x)) + 1.0};
    };
  } else if (name == "sin2d") {
    m.arity = 2;
    m.h = [](double p, double q, const Point&) { return std::sin(p + q); };
    m.speed = [](const Box& b, const Point&) {
      double s = max_abs_cos(b.p_lo + b.q_lo, b.p_hi + b.q_hi);
      return std::array<double, 2>{s, s};
    };
  } else if (name == "geometric_optics" || name == "propagating_surface") {
    m.arity = 2;
    const double sgn = name == "geometric_optics" ? 1.0 : -1.0;
    m.h = [sgn](double p, double q, const Point&) { return sgn * std::sqrt(p * p + q * q + 1.0); };
    m.speed = [](const Box& b, const Point&) {
      double P = max_abs(b.p_lo, b.p_hi), Q = max_abs(b.q_lo, b.q_hi);
      double pm = min_abs(b.p_lo, b.p_hi), qm = min_abs(b.q_lo, b.q_hi);
      return std::array<double, 2>{P / std::sqrt(P * P + qm * qm + 1.0),
                                   Q / std::sqrt(Q * Q + pm * pm + 1.0)};
    };
  } else {
    std::string known;
    for (const auto& n : model_names()) known += " " + n;
    throw Error(ErrorCode::UnknownProblem, "unknown model '" + name + "'; known:" + known);
  }
  return m;
}

HamiltonianModel reinit_model(std::function<double(double, double)> phi0) {
  HamiltonianModel m;
  m.name = "reinit";
  m.arity = 2;
  m.space_dependent = true;
  m.h = [phi0](double p, double q, const Point& x) {
    return sign(phi0(x.x, x.y)) * (std::sqrt(p * p + q * q) - 1.0);
  };
  m.speed = [](const Box&, const Point&) { return std::array<double, 2>{1.0, 1.0}; };
  return m;
}

TransformedHamiltonian transform(const HamiltonianModel& m, const std::vector<double>& jx,
                                 const std::vector<double>& jy) {
  TransformedHamiltonian t;
  t.base = &m;
  t.inv_jx.resize(jx.size());
  for (size_t i = 0; i < jx.size(); ++i) {
    if (!(jx[i] > 0.0)) throw Error(ErrorCode::DegenerateMapping, "nonpositive jacobian");
    t.inv_jx[i] = 1.0 / jx[i];
  }
  t.inv_jy.resize(jy.size());
  for (size_t j = 0; j < jy.size(); ++j) {
    if (!(jy[j] > 0.0)) throw Error(ErrorCode::DegenerateMapping, "nonpositive jacobian");
    t.inv_jy[j] = 1.0 / jy[j];
  }
  return t;
}

double local_speed_1d(const HamiltonianModel& m, double um, double up, const Point& pt,
                      double inv_j) {
  Box b;
  b.p_lo = std::min(um, up) * inv_j;
  b.p_hi = std::max(um, up) * inv_j;
  return m.speed(b, pt)[0] * inv_j;
}

std::array<double, 2> local_speed_2d(const HamiltonianModel& m, double um, double up, double vm,
                                     double vp, const Point& pt, double inv_jx, double inv_jy) {
  Box b;
  b.p_lo = std::min(um, up) * inv_jx;
  b.p_hi = std::max(um, up) * inv_jx;
  b.q_lo = std::min(vm, vp) * inv_jy;
  b.q_hi = std::max(vm, vp) * inv_jy;
  auto s = m.speed(b, pt);
  return {s[0] * inv_jx, s[1] * inv_jy};
}

double llf_flux_1d(const HamiltonianModel& m, double um, double up, double alpha_h,
                   const Point& pt, double inv_j) {
  return m.h(0.5 * (um + up) * inv_j, 0.0, pt) - alpha_h * 0.5 * (up - um);
}

double llf_flux_2d(const HamiltonianModel& m, double um, double up, double vm, double vp,
                   double ax, double ay, const Point& pt, double inv_jx, double inv_jy) {
  return m.h(0.5 * (um + up) * inv_jx, 0.5 * (vm + vp) * inv_jy, pt) - ax * 0.5 * (up - um) -
         ay * 0.5 * (vp - vm);
}

std::array<double, 2> max_wave_speed(const HamiltonianModel& m, const Box& box, const Point& pt,
                                     double max_inv_jx, double max_inv_jy) {
  if (!(box.p_lo <= box.p_hi) || !(box.q_lo <= box.q_hi) || !std::isfinite(box.p_lo) ||
      !std::isfinite(box.p_hi) || !std::isfinite(box.q_lo) || !std::isfinite(box.q_hi))
    throw Error(ErrorCode::InvalidRange, "empty or non-finite argument range");
  auto s = m.speed(box, pt);
  return {s[0] * max_inv_jx, s[1] * max_inv_jy};
}

}  // namespace hjk
