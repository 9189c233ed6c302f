#pragma once

// Dormand-Prince 5(4) with step control and per-step dense output.
// Accepted steps are handed to an observer holding endpoint values and
// derivatives; cubic Hermite interpolation over a step is the documented
// accuracy contract, and event times are sharpened by re-integrating from
// the step start rather than by polishing the interpolant.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "revsphere/errors.hpp"

namespace revsphere {

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
struct OdeStep {
  double t0 = 0.0, t1 = 0.0;
  OdeState<N> y0{}, y1{}, f0{}, f1{};

  double span() const { return t1 - t0; }

  // Cubic Hermite value at t in [t0, t1].
  OdeState<N> eval(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    return out;
  }
};

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: choose automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2000000;
};

namespace ode_detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace ode_detail

// Integrates y' = rhs(t, y) from (t0, y0) to t_end (t_end > t0).
// observer(step) is called after every accepted step; returning false stops
// the run early. Returns the final state (at t_end, or at the stop point).
template <std::size_t N, typename RHS, typename Observer>
OdeState<N> integrate_ode(RHS&& rhs, double t0, const OdeState<N>& y0,
                          double t_end, const OdeOptions& opts,
                          Observer&& observer) {
  using namespace ode_detail;
  if (!(t_end >= t0)) throw solver_failure("integrate_ode: t_end < t0");
  OdeState<N> y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double t = t0;
  rhs(t, y, k1);
  if (t_end == t0) return y;

  double h = opts.h_init;
  if (h <= 0.0) {
    // Scaled-norm ratio of state to slope; crude but only seeds the controller.
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.atol + opts.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    h = (d0 > 0.0 && d1 > 0.0) ? 0.01 * std::sqrt(d0 / d1)
                               : 1e-3 * (t_end - t0);
    h = std::max(h, 1e-6 * (t_end - t0));
  }
  h = std::min({h, opts.h_max, t_end - t0});

  const double h_floor = 1e-14 * std::max(1.0, std::abs(t_end));
  for (long step = 0; step < opts.max_steps; ++step) {
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0) {
      OdeStep<N> rec;
      rec.t0 = t;
      rec.t1 = t + h;
      rec.y0 = y;
      rec.y1 = ynew;
      rec.f0 = k1;
      rec.f1 = k7;
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (!observer(rec)) return y;
      if (last || t >= t_end) return y;
    }
    const double factor =
        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::min(h, opts.h_max);
    if (err > 1.0 && h < h_floor)
      throw solver_failure("integrate_ode: step size underflow");
  }
  throw solver_failure("integrate_ode: step budget exhausted");
}

// Convenience: integrate to t_end, discarding intermediate steps.
template <std::size_t N, typename RHS>
OdeState<N> integrate_to(RHS&& rhs, double t0, const OdeState<N>& y0,
                         double t_end, const OdeOptions& opts) {
  return integrate_ode(rhs, t0, y0, t_end, opts,
                       [](const OdeStep<N>&) { return true; });
}

// Fixed-step classical RK4; the cheap workhorse for coarse scans.
// observer(t, y) is called after every step.
template <std::size_t N, typename RHS, typename Observer>
OdeState<N> rk4_integrate(RHS&& rhs, double t0, const OdeState<N>& y0,
                          double t_end, long n_steps, Observer&& observer) {
  OdeState<N> y = y0, k1, k2, k3, k4, ytmp;
  const double h = (t_end - t0) / static_cast<double>(n_steps);
  double t = t0;
  for (long s = 0; s < n_steps; ++s) {
    rhs(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * k3[i];
    rhs(t + h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = t0 + h * static_cast<double>(s + 1);
    if (!observer(t, y)) break;
  }
  return y;
}

}  // namespace revsphere
