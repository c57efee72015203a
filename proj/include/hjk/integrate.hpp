#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hjk {

/// Largest stable beta for the order-k scheme; 2D values are the halved ones.
double select_beta(int order, int dimension);

/// How per-direction speeds combine into one step: Max uses the largest
/// c_d/h_d, Sum adds them.
enum class CflRule { Max, Sum };

double cfl_dt(double cfl, std::span<const double> spacing, std::span<const double> c_max,
              CflRule rule = CflRule::Sum);

/// Floor applied to degenerate (flat-state) wave speeds.
inline constexpr double kMinSpeed = 1e-12;

class TimeController {
 public:
  TimeController(double cfl, double t_final, CflRule rule = CflRule::Sum);

  /// Step size for the current speeds, clamped so the run lands on t_final.
  double next_dt(std::span<const double> spacing, std::span<const double> c_max);
  /// Advances t by the last dt; snaps exactly onto t_final on the final step.
  void advance();
  bool done() const { return t_ >= t_final_; }

  double t() const { return t_; }
  double dt() const { return dt_; }
  double cfl() const { return cfl_; }
  double t_final() const { return t_final_; }
  const std::vector<double>& c_max() const { return c_; }

 private:
  double cfl_;
  double t_final_;
  CflRule rule_;
  double t_ = 0.0;
  double dt_ = 0.0;
  bool last_ = false;
  std::vector<double> c_;
};

/// Time level of a Runge-Kutta stage. Inner stages approximate
/// u(t0) + c1 dt u' + c2 dt^2 u'' rather than u at one instant, so boundary data
/// for them must follow the same expansion or the scheme loses order at inflow
/// boundaries when dt is large.
struct StageTime {
  double t0 = 0.0;
  double dt = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool plain = true;  // an ordinary time level t0

  StageTime(double t = 0.0) : t0(t) {}
  StageTime(double t0_, double dt_, double c1_, double c2_)
      : t0(t0_), dt(dt_), c1(c1_), c2(c2_), plain(false) {}

  double time() const { return t0 + c1 * dt; }
  operator double() const { return time(); }
  /// Time-dependent data consistent with this level.
  double sample(const std::function<double(double)>& g) const;
};

using RhsFn = std::function<void(const std::vector<double>& phi, const StageTime& t,
                                 std::vector<double>& out)>;
/// Called on each stage result (boundary data goes here).
using StageFn = std::function<void(std::vector<double>& phi, const StageTime& t)>;

/// One SSP Runge-Kutta step of order 1, 2 or 3 in Shu-Osher form.
void ssp_rk_step(std::vector<double>& phi, double t, double dt, int order, const RhsFn& rhs,
                 const StageFn& stage = {});

}  // namespace hjk
