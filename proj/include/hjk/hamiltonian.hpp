#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hjk {

/// Position and time at which a space- or time-dependent model is evaluated.
struct Point {
  double x = 0.0, y = 0.0, t = 0.0;
};

/// Argument ranges for the gradient components.
struct Box {
  double p_lo = 0.0, p_hi = 0.0;
  double q_lo = 0.0, q_hi = 0.0;
};

using HamiltonianFn = std::function<double(double p, double q, const Point&)>;
using SpeedFn = std::function<std::array<double, 2>(const Box&, const Point&)>;

/// H(p) or H(p, q) with bounds on |dH/dp| and |dH/dq| over boxes. One-argument
/// models ignore q.
struct HamiltonianModel {
  std::string name;
  int arity = 1;
  HamiltonianFn h;
  SpeedFn speed;
  bool space_dependent = false;

  double operator()(double p, double q, const Point& pt) const { return h(p, q, pt); }
  double operator()(double p) const { return h(p, 0.0, Point{}); }
};

/// Model whose speed bound comes from central differences of H sampled on a
/// 33-point grid per axis, inflated by 10%.
HamiltonianModel sampled_model(std::string name, int arity, HamiltonianFn h);

/// Built-in models by registry name.
HamiltonianModel make_model(const std::string& name);
std::vector<std::string> model_names();
/// sign(phi0(x, y)) (|grad phi| - 1).
HamiltonianModel reinit_model(std::function<double(double, double)> phi0);

/// Exact sign: -1, 0 or 1.
inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

/// max |cos s| and max |sin s| over [lo, hi].
double max_abs_cos(double lo, double hi);
double max_abs_sin(double lo, double hi);

/// Model evaluated in computational coordinates: H~(u, v) = H(u / J_x, v / J_y).
struct TransformedHamiltonian {
  const HamiltonianModel* base = nullptr;
  std::vector<double> inv_jx;
  std::vector<double> inv_jy;

  double operator()(int i, int j, double u, double v, const Point& pt) const {
    return base->h(u * inv_jx[i], v * (inv_jy.empty() ? 1.0 : inv_jy[j]), pt);
  }
};

TransformedHamiltonian transform(const HamiltonianModel& m, const std::vector<double>& jx,
                                 const std::vector<double>& jy = {});

/// Bound on |dH~/du| over [min(u-, u+), max(u-, u+)]; inv_j is xi_x.
double local_speed_1d(const HamiltonianModel& m, double um, double up, const Point& pt,
                      double inv_j = 1.0);
std::array<double, 2> local_speed_2d(const HamiltonianModel& m, double um, double up, double vm,
                                     double vp, const Point& pt, double inv_jx = 1.0,
                                     double inv_jy = 1.0);

double llf_flux_1d(const HamiltonianModel& m, double um, double up, double alpha_h,
                   const Point& pt, double inv_j = 1.0);
double llf_flux_2d(const HamiltonianModel& m, double um, double up, double vm, double vp,
                   double alpha_x, double alpha_y, const Point& pt, double inv_jx = 1.0,
                   double inv_jy = 1.0);

/// Speed bound over a box of physical gradients, converted to computational
/// units with the largest metric factor given.
std::array<double, 2> max_wave_speed(const HamiltonianModel& m, const Box& box, const Point& pt,
                                     double max_inv_jx = 1.0, double max_inv_jy = 1.0);

}  // namespace hjk
