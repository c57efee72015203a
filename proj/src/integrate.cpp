#include "hjk/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "hjk/error.hpp"

namespace hjk {

double select_beta(int order, int dimension) {
  if (order < 1 || order > 3) throw Error(ErrorCode::InvalidOrder, "order must be 1, 2 or 3");
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::InvalidParameter, "dimension must be 1 or 2");
  static constexpr double one[3] = {2.0, 1.0, 1.243};
  static constexpr double two[3] = {1.0, 0.5, 0.6};
  return dimension == 1 ? one[order - 1] : two[order - 1];
}

double cfl_dt(double cfl, std::span<const double> h, std::span<const double> c, CflRule rule) {
  if (h.size() != c.size() || h.empty())
    throw Error(ErrorCode::Shape, "one speed per grid direction");
  if (!(cfl > 0.0)) throw Error(ErrorCode::InvalidParameter, "CFL must be positive");
  double rate = 0.0;
  for (size_t d = 0; d < h.size(); ++d) {
    if (!(c[d] > 0.0) || !std::isfinite(c[d]))
      throw Error(ErrorCode::InvalidSpeed, "wave speed must be positive and finite");
    double r = c[d] / h[d];
    rate = rule == CflRule::Sum ? rate + r : std::max(rate, r);
  }
  return cfl / rate;
}

TimeController::TimeController(double cfl, double t_final, CflRule rule)
    : cfl_(cfl), t_final_(t_final), rule_(rule) {
  if (!(cfl > 0.0)) throw Error(ErrorCode::InvalidParameter, "CFL must be positive");
  if (!(t_final >= 0.0)) throw Error(ErrorCode::InvalidParameter, "final time must be >= 0");
}

double TimeController::next_dt(std::span<const double> h, std::span<const double> c) {
  c_.assign(c.begin(), c.end());
  for (auto& v : c_) v = std::max(v, kMinSpeed);
  dt_ = cfl_dt(cfl_, h, c_, rule_);
  last_ = false;
  if (t_ + dt_ * (1.0 + 1e-9) >= t_final_) {
    dt_ = t_final_ - t_;
    last_ = true;
  }
  return dt_;
}

void TimeController::advance() {
  t_ = last_ ? t_final_ : t_ + dt_;
}

double StageTime::sample(const std::function<double(double)>& g) const {
  if (plain || (c1 == 0.0 && c2 == 0.0)) return g(time());
  // Central differences; step sizes balance truncation against round-off.
  const double scale = std::max(1.0, std::abs(t0));
  const double h1 = 6e-6 * scale, h2 = 1.2e-4 * scale;
  const double g0 = g(t0);
  const double gt = (g(t0 + h1) - g(t0 - h1)) / (2.0 * h1);
  const double gtt = c2 != 0.0 ? (g(t0 + h2) - 2.0 * g0 + g(t0 - h2)) / (h2 * h2) : 0.0;
  return g0 + c1 * dt * gt + c2 * dt * dt * gtt;
}

void ssp_rk_step(std::vector<double>& phi, double t, double dt, int order, const RhsFn& rhs,
                 const StageFn& stage) {
  if (order < 1 || order > 3) throw Error(ErrorCode::InvalidOrder, "order must be 1, 2 or 3");
  const size_t n = phi.size();
  const StageTime end(t + dt);
  std::vector<double> l(n), u1(n);
  rhs(phi, StageTime(t), l);
  for (size_t i = 0; i < n; ++i) u1[i] = phi[i] + dt * l[i];
  if (order == 1) {
    if (stage) stage(u1, end);
    phi.swap(u1);
    return;
  }
  // u1 = u + dt u'
  const StageTime s1(t, dt, 1.0, 0.0);
  if (stage) stage(u1, s1);
  rhs(u1, s1, l);
  if (order == 2) {
    // phi + 1/2 (u1 + dt L(u1) - phi)
    for (size_t i = 0; i < n; ++i) phi[i] += 0.5 * ((u1[i] + dt * l[i]) - phi[i]);
    if (stage) stage(phi, end);
    return;
  }
  // u2 = u + dt/2 u' + dt^2/4 u''
  const StageTime s2(t, dt, 0.5, 0.25);
  std::vector<double> u2(n);
  for (size_t i = 0; i < n; ++i) u2[i] = phi[i] + 0.25 * ((u1[i] + dt * l[i]) - phi[i]);
  if (stage) stage(u2, s2);
  rhs(u2, s2, l);
  for (size_t i = 0; i < n; ++i) phi[i] += (2.0 / 3.0) * ((u2[i] + dt * l[i]) - phi[i]);
  if (stage) stage(phi, end);
}

}  // namespace hjk
