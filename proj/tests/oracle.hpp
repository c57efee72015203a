#pragma once

// Reference computations used by several test files. Nothing here calls into
// the library.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Composite five-point Gauss-Legendre on [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        int panels = 200) {
  static const double g[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                              0.4786286704993665, 0.2369268850561891};
  double s = 0.0, step = (hi - lo) / panels;
  for (int m = 0; m < panels; ++m) {
    double l = lo + m * step, c = l + 0.5 * step;
    for (int q = 0; q < 5; ++q) s += 0.5 * step * w[q] * f(c + 0.5 * step * g[q]);
  }
  return s;
}

/// Observed orders log2(e[i] / e[i+1]).
inline std::vector<double> orders(const std::vector<double>& e) {
  std::vector<double> o;
  for (size_t i = 0; i + 1 < e.size(); ++i) o.push_back(std::log2(e[i] / e[i + 1]));
  return o;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace oracle
