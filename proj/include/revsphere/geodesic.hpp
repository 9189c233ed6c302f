#pragma once

// Unit-speed geodesics of dr^2 + m(r)^2 dtheta^2 in the reduced state
// (r, theta, phi), where phi in [0, pi] is the angle from the outward
// meridian direction:
//   r' = cos phi,  theta' = s sin phi / m,  phi' = -(m'/m) sin phi
// with s = +-1 the fixed turning sign. m sin phi is the Clairaut constant.
// Meridians (nu = 0) are traced in closed form, including pole crossings;
// every geodesic through a pole is a meridian, so the ODE never sees m = 0.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "revsphere/errors.hpp"
#include "revsphere/ode.hpp"
#include "revsphere/profile.hpp"
#include "revsphere/roots.hpp"

namespace revsphere {

struct GeodesicState {
  SurfacePoint point;
  double phi = 0.0;  // [0, pi]; at a pole only 0 (outward) is meaningful
  double nu = 0.0;   // signed Clairaut constant m sin(phi) * turn sign
};

inline GeodesicState make_geodesic_state(const SurfaceModel& model, double r,
                                         double theta, double phi,
                                         int turn_sign = +1) {
  if (!(phi >= 0.0 && phi <= pi))
    throw std::invalid_argument("geodesic state: phi outside [0, pi]");
  GeodesicState st;
  st.point.r = r;
  st.point.theta = wrap_angle(theta);
  st.point.theta_defined = !model.is_pole(r);
  st.phi = phi;
  st.nu = model.is_pole(r) ? 0.0
                           : (turn_sign >= 0 ? 1.0 : -1.0) * model.m(r) *
                                 std::sin(phi);
  return st;
}

struct GeodesicSample {
  double t = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct GeodesicPath {
  GeodesicState initial;
  GeodesicState final_state;
  double length = 0.0;
  double max_step = 0.0;  // guaranteed bound on sample spacing
  std::vector<GeodesicSample> samples;
  std::vector<double> pole_crossings;  // meridians only
};

struct GeodesicOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.0;  // 0: 2a/64
  bool record_samples = true;
};

// Trace a meridian ray: from (r0, theta0) with phi = 0 (toward r = 2a) or
// phi = pi (toward r = 0). From a pole, the initial theta names the meridian.
inline GeodesicPath trace_meridian(const SurfaceModel& model,
                                   const GeodesicState& start, double length,
                                   const GeodesicOptions& opts) {
  const double L = model.two_a();
  const double r0 = std::min(std::max(start.point.r, 0.0), L);
  const double dir = start.phi < 0.5 * pi ? 1.0 : -1.0;

  GeodesicPath path;
  path.initial = start;
  path.length = length;
  path.max_step = opts.max_step > 0.0 ? opts.max_step : L / 64.0;

  auto at = [&](double t, GeodesicSample& smp) {
    // Reflected coordinate: bounce between 0 and 2a starting at r0.
    double pos = r0, d = dir, left = t;
    int parity = 0;
    for (;;) {
      const double to_pole = d > 0 ? (L - pos) : pos;
      if (to_pole >= left) break;
      left -= to_pole;
      pos = d > 0 ? L : 0.0;
      d = -d;
      parity ^= 1;
    }
    smp.t = t;
    smp.r = pos + d * left;
    if (smp.r < 0.0) smp.r = 0.0;
    if (smp.r > L) smp.r = L;
    smp.theta = wrap_angle(start.point.theta + parity * pi);
    smp.phi = d > 0 ? 0.0 : pi;
  };

  // Pole crossing times.
  {
    double t_next = dir > 0 ? (L - r0) : r0;
    while (t_next <= length + 1e-15) {
      if (t_next > 1e-15) path.pole_crossings.push_back(t_next);
      t_next += L;
    }
  }

  if (opts.record_samples) {
    const long n = std::max<long>(1, std::lround(std::ceil(length / path.max_step)));
    path.samples.reserve(n + 1);
    for (long i = 0; i <= n; ++i) {
      GeodesicSample smp;
      at(length * static_cast<double>(i) / static_cast<double>(n), smp);
      path.samples.push_back(smp);
    }
  }

  GeodesicSample end;
  at(length, end);
  path.final_state.point.r = end.r;
  path.final_state.point.theta = end.theta;
  path.final_state.point.theta_defined = !model.is_pole(end.r);
  path.final_state.phi = end.phi;
  path.final_state.nu = 0.0;
  return path;
}

// Integrate a geodesic of given length. Meridians take the closed form
// above; all other rays run through the adaptive integrator with sample
// spacing bounded by max_step.
inline GeodesicPath integrate_geodesic(const SurfaceModel& model,
                                       const GeodesicState& start,
                                       double length,
                                       const GeodesicOptions& opts = {}) {
  if (!(length >= 0.0) || !std::isfinite(length))
    throw std::invalid_argument("integrate_geodesic: bad length");
  const double L = model.two_a();
  const double nu_floor = 1e-12 * model.max_m();
  if (model.is_pole(start.point.r) || std::abs(start.nu) <= nu_floor)
    return trace_meridian(model, start, length, opts);

  const double sgn = start.nu >= 0.0 ? 1.0 : -1.0;
  auto rhs = [&model, sgn](double, const OdeState<3>& y, OdeState<3>& dy) {
    double m, m1;
    model.eval(y[0], &m, &m1, nullptr);
    const double sp = std::sin(y[2]);
    dy[0] = std::cos(y[2]);
    dy[1] = sgn * sp / m;
    dy[2] = -m1 * sp / m;
  };

  GeodesicPath path;
  path.initial = start;
  path.length = length;
  path.max_step = opts.max_step > 0.0 ? opts.max_step : L / 64.0;

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  oo.h_max = path.max_step;

  OdeState<3> y0{start.point.r, start.point.theta, start.phi};
  if (opts.record_samples)
    path.samples.push_back({0.0, y0[0], wrap_angle(y0[1]), y0[2]});
  const auto yT = integrate_ode(
      rhs, 0.0, y0, length, oo, [&](const OdeStep<3>& s) {
        if (opts.record_samples)
          path.samples.push_back({s.t1, s.y1[0], wrap_angle(s.y1[1]), s.y1[2]});
        return true;
      });

  path.final_state.point.r = yT[0];
  path.final_state.point.theta = wrap_angle(yT[1]);
  path.final_state.point.theta_defined = true;
  path.final_state.phi = std::min(std::max(yT[2], 0.0), pi);
  path.final_state.nu = start.nu;
  return path;
}

// Meridian from the pole r = 0 along a named meridian plane.
inline GeodesicPath meridian(const SurfaceModel& model, double theta,
                             double length, const GeodesicOptions& opts = {}) {
  GeodesicState st;
  st.point.r = 0.0;
  st.point.theta = wrap_angle(theta);
  st.point.theta_defined = false;
  st.phi = 0.0;
  st.nu = 0.0;
  return trace_meridian(model, st, length, opts);
}

// Largest observed |m sin(phi) - |nu|| over the stored samples.
inline double clairaut_drift(const SurfaceModel& model,
                             const GeodesicPath& path) {
  const double nu = std::abs(path.initial.nu);
  double worst = 0.0;
  for (const auto& s : path.samples)
    worst = std::max(worst,
                     std::abs(model.m(s.r) * std::sin(s.phi) - nu));
  return worst;
}

struct ConjugateResult {
  std::optional<double> time;  // first zero of the Jacobi field, if found
  bool at_endpoint = false;    // zero within tolerance of the search end
  double y_end = 0.0;          // Jacobi value at the search end
};

// First conjugate time along the ray from `start`, searching (0, t_max].
// Integrates y'' + G(r(t)) y = 0, y(0) = 0, y'(0) = 1 jointly with the
// geodesic; zeros are bracketed on accepted steps and sharpened by
// re-integration. A zero within end_tol of t_max sets at_endpoint.
inline ConjugateResult first_conjugate_time(const SurfaceModel& model,
                                            const GeodesicState& start,
                                            double t_max,
                                            const GeodesicOptions& opts = {},
                                            double zero_tol = 1e-9,
                                            double end_tol = 1e-9) {
  ConjugateResult res;
  const double nu_floor = 1e-12 * model.max_m();
  const bool is_meridian =
      model.is_pole(start.point.r) || std::abs(start.nu) <= nu_floor;

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  oo.h_max = model.two_a() / 64.0;

  double bracket_a = -1.0, bracket_b = -1.0;

  if (is_meridian) {
    // r(t) follows the analytic fold; only the scalar Jacobi pair is
    // integrated.
    const double L = model.two_a();
    const double r0 = std::min(std::max(start.point.r, 0.0), L);
    const double dir0 = start.phi < 0.5 * pi ? 1.0 : -1.0;
    auto r_at = [&](double t) {
      double pos = r0, d = dir0, left = t;
      for (;;) {
        const double to_pole = d > 0 ? (L - pos) : pos;
        if (to_pole >= left) return pos + d * left;
        left -= to_pole;
        pos = d > 0 ? L : 0.0;
        d = -d;
      }
    };
    auto rhs = [&](double t, const OdeState<2>& y, OdeState<2>& dy) {
      dy[0] = y[1];
      dy[1] = -model.curvature(r_at(t)) * y[0];
    };
    OdeState<2> y0{0.0, 1.0};
    OdeState<2> y_end{0.0, 0.0};
    y_end = integrate_ode(rhs, 0.0, y0, t_max, oo, [&](const OdeStep<2>& s) {
      if (s.t0 > 0.0 && s.y0[0] * s.y1[0] < 0.0) {
        bracket_a = s.t0;
        bracket_b = s.t1;
        return false;
      }
      return true;
    });
    res.y_end = y_end[0];
    if (bracket_a >= 0.0) {
      // Re-integrate within the bracket for the zero.
      OdeState<2> ya = integrate_to(rhs, 0.0, y0, bracket_a, oo);
      auto yval = [&](double t) {
        return integrate_to(rhs, bracket_a, ya, t, oo)[0];
      };
      res.time = brent(yval, bracket_a, bracket_b, zero_tol);
    }
  } else {
    const double sgn = start.nu >= 0.0 ? 1.0 : -1.0;
    auto rhs = [&](double, const OdeState<5>& y, OdeState<5>& dy) {
      double m, m1;
      model.eval(y[0], &m, &m1, nullptr);
      const double sp = std::sin(y[2]);
      dy[0] = std::cos(y[2]);
      dy[1] = sgn * sp / m;
      dy[2] = -m1 * sp / m;
      dy[3] = y[4];
      dy[4] = -model.curvature(y[0]) * y[3];
    };
    OdeState<5> y0{start.point.r, start.point.theta, start.phi, 0.0, 1.0};
    OdeState<5> ya{};
    bool have_bracket = false;
    const auto yT =
        integrate_ode(rhs, 0.0, y0, t_max, oo, [&](const OdeStep<5>& s) {
          if (s.t0 > 0.0 && s.y0[3] * s.y1[3] < 0.0) {
            bracket_a = s.t0;
            bracket_b = s.t1;
            ya = s.y0;
            have_bracket = true;
            return false;
          }
          return true;
        });
    res.y_end = yT[3];
    if (have_bracket) {
      auto yval = [&](double t) {
        return integrate_to(rhs, bracket_a, ya, t, oo)[3];
      };
      res.time = brent(yval, bracket_a, bracket_b, zero_tol);
    }
  }

  if (!res.time && std::abs(res.y_end) <= end_tol) {
    res.time = t_max;
    res.at_endpoint = true;
  } else if (res.time && t_max - *res.time <= end_tol) {
    res.at_endpoint = true;
  }
  return res;
}

inline ConjugateResult first_conjugate_time(const SurfaceModel& model,
                                            const GeodesicPath& path,
                                            const GeodesicOptions& opts = {}) {
  return first_conjugate_time(model, path.initial, path.length, opts);
}

}  // namespace revsphere
