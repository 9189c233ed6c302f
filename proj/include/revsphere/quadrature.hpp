#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "revsphere/errors.hpp"

namespace revsphere {

namespace quad_detail {

// Gauss-Kronrod 7-15 nodes on the positive half of [-1, 1].
inline constexpr double gk_node[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr double gk_wk[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299786,
    0.0229353220105292,
};
// Gauss-7 weights for nodes 0, 2, 4, 6 of the list above.
inline constexpr double gk_wg[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

template <typename F>
void gk15(F&& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double sk = gk_wk[0] * f0;
  double sg = gk_wg[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double v = f(c - h * gk_node[i]) + f(c + h * gk_node[i]);
    sk += gk_wk[i] * v;
    if ((i & 1) == 0) sg += gk_wg[i / 2] * v;
  }
  result = sk * h;
  err = std::abs(sk - sg) * std::abs(h);
}

}  // namespace quad_detail

// Adaptive Gauss-Kronrod integration. Splits the interval with the worst
// error estimate until the summed estimate drops below abs_tol + rel_tol*|I|.
template <typename F>
double integrate_gk(F&& f, double a, double b, double abs_tol = 1e-12,
                    double rel_tol = 1e-12, int max_intervals = 4000) {
  if (a == b) return 0.0;
  struct Seg {
    double a, b, val, err;
  };
  std::vector<Seg> segs;
  segs.reserve(64);
  double val, err;
  quad_detail::gk15(f, a, b, val, err);
  segs.push_back({a, b, val, err});
  double total = val, total_err = err;
  while (total_err > abs_tol + rel_tol * std::abs(total)) {
    if (static_cast<int>(segs.size()) >= max_intervals)
      throw solver_failure("integrate_gk: interval budget exhausted");
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    const Seg s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (mid == s.a || mid == s.b) break;  // interval at roundoff floor
    Seg left{s.a, mid, 0, 0}, right{mid, s.b, 0, 0};
    quad_detail::gk15(f, left.a, left.b, left.val, left.err);
    quad_detail::gk15(f, right.a, right.b, right.val, right.err);
    segs[worst] = left;
    segs.push_back(right);
    total = total_err = 0.0;
    for (const auto& sg : segs) {
      total += sg.val;
      total_err += sg.err;
    }
  }
  return total;
}

// Tanh-sinh quadrature on [a, b]. The double-exponential weight decay makes
// it robust for integrands with sharp but integrable end behavior. Node
// spacing halves per level until two successive totals agree to tol.
template <typename F>
double integrate_tanh_sinh(F&& f, double a, double b, double tol = 1e-12,
                           int max_level = 10) {
  if (a == b) return 0.0;
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  constexpr double half_pi = 1.5707963267948966;
  constexpr double t_max = 4.0;
  // w(t)*[f at the pair of symmetric nodes]; 0 once x reaches +-1.
  auto eval_pair = [&](double t) -> double {
    const double u = half_pi * std::sinh(t);
    const double ch = std::cosh(u);
    const double x = std::tanh(u);
    if (1.0 - x <= 0.0) return 0.0;
    const double w = half_pi * std::cosh(t) / (ch * ch);
    return w * (f(c + s * x) + f(c - s * x));
  };
  double h = 1.0;
  // raw = sum of w*f over current node set; integral = s*h*raw.
  double raw = half_pi * f(c);
  for (double t = h; t <= t_max; t += h) raw += eval_pair(t);
  double result = s * h * raw;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double odd = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) odd += eval_pair(t);
    raw += odd;
    const double next = s * h * raw;
    if (level >= 3 && std::abs(next - result) <= tol * (std::abs(next) + 1.0))
      return next;
    result = next;
  }
  return result;
}

}  // namespace revsphere
