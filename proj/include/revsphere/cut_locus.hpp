#pragma once

// Cut locus of a point, computed per departure direction: along each ray the
// minimality loss time is bisected with the distance solver, capped by the
// first conjugate time. Witnesses are classified into a single point (round
// case) or a subarc of the opposite meridian, whose radial endpoints are
// refined by golden-section search over the departure angle.
//
// Supported only when the radial curvature is monotone on the half meridian
// (or constant); outside that class the locus need not lie on the opposite
// meridian and the witness refinement would be unsound.

#include <cmath>
#include <vector>

#include "revsphere/distance.hpp"
#include "revsphere/errors.hpp"
#include "revsphere/geodesic.hpp"
#include "revsphere/profile.hpp"

namespace revsphere {

struct CutWitness {
  double phi = 0.0;    // departure angle at the base point
  double t_cut = 0.0;  // cut time along the ray
  SurfacePoint point;
  bool conjugate = false;  // cut time coincides with the conjugate time
};

struct CutLocusResult {
  SurfacePoint base;
  bool single_point = false;
  SurfacePoint point;            // set when single_point
  double r_lo = 0.0, r_hi = 0.0; // radial extent of the witnesses
  double theta_opposite = 0.0;   // base theta + pi, wrapped
  double max_theta_deviation = 0.0;
  std::vector<CutWitness> witnesses;
};

namespace cut_detail {

// Ray state at time t, re-integrated from the nearest earlier stored sample.
inline GeodesicState ray_state(const SurfaceModel& model,
                               const GeodesicPath& path, double t,
                               const GeodesicOptions& go) {
  if (std::abs(path.initial.nu) <= 1e-12 * model.max_m())
    return trace_meridian(model, path.initial, t, {}).final_state;
  const auto& smp = path.samples;
  std::size_t i = 0;
  {
    std::size_t lo = 0, hi = smp.size();
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (smp[mid].t <= t) lo = mid; else hi = mid;
    }
    i = lo;
  }
  GeodesicState st;
  st.point = SurfacePoint{smp[i].r, smp[i].theta, true};
  st.phi = smp[i].phi;
  st.nu = path.initial.nu;
  const double dt = t - smp[i].t;
  if (dt <= 1e-13) return st;
  GeodesicOptions g = go;
  g.record_samples = false;
  return integrate_geodesic(model, st, dt, g).final_state;
}

struct DirSolve {
  CutWitness w;
};

inline CutWitness cut_direction(const SurfaceModel& model,
                                const SurfacePoint& x, double phi,
                                const DistanceOptions& inner, double t_tol) {
  const double L = model.two_a();
  auto st = make_geodesic_state(model, x.r, x.theta, phi, +1);
  GeodesicOptions go;
  go.max_step = L / 256.0;
  const double t_cap = L * (1.0 + 1e-9);
  const auto conj = first_conjugate_time(model, st, t_cap, go);
  double hi = conj.time ? std::min(*conj.time, t_cap) : t_cap;
  const auto path = integrate_geodesic(model, st, hi, go);

  const double slack = std::max(5e-8, 25.0 * inner.tol);
  auto minimal = [&](double t) {
    const auto p = ray_state(model, path, t, go).point;
    const double d = distance(model, x, p, inner).distance;
    return d >= t - slack;
  };

  double t_cut;
  if (minimal(hi * (1.0 - 1e-12))) {
    t_cut = hi;  // the conjugate point itself is the cut point
  } else {
    double lo = 1e-3 * L;
    while (lo > 1e-9 * L && !minimal(lo)) lo *= 0.25;
    double a = lo, b = hi;
    while (b - a > t_tol) {
      const double mid = 0.5 * (a + b);
      (minimal(mid) ? a : b) = mid;
    }
    t_cut = 0.5 * (a + b);
  }

  CutWitness w;
  w.phi = phi;
  w.t_cut = t_cut;
  w.point = ray_state(model, path, t_cut, go).point;
  w.conjugate = conj.time && t_cut >= *conj.time - std::max(1e-6, 2.0 * t_tol);
  return w;
}

}  // namespace cut_detail

inline CutLocusResult cut_locus(const SurfaceModel& model,
                                const SurfacePoint& x, int grid = 64,
                                const DistanceOptions& inner =
                                    DistanceOptions::fast(1e-9)) {
  if (!model.curvature_monotone() && !model.curvature_constant())
    throw unsupported_model(
        "cut_locus: radial curvature must be monotone on the half meridian");
  const double L = model.two_a();
  CutLocusResult res;
  res.base = x;

  if (model.is_pole(x.r)) {
    // The cut locus of a pole is the opposite pole.
    res.single_point = true;
    const bool north = x.r <= 0.5 * L;
    res.point = SurfacePoint{north ? L : 0.0, 0.0, false};
    res.r_lo = res.r_hi = res.point.r;
    res.theta_opposite = 0.0;
    CutWitness w;
    w.phi = north ? 0.0 : pi;
    w.t_cut = L;
    w.point = res.point;
    w.conjugate = true;
    res.witnesses.push_back(w);
    return res;
  }

  res.theta_opposite = wrap_angle(x.theta + pi);
  const double t_tol = 1e-7 * L;

  DistanceOptions in = inner;
  in.want_paths = false;
  for (int j = 0; j <= grid; ++j) {
    const double phi = pi * static_cast<double>(j) / grid;
    res.witnesses.push_back(
        cut_detail::cut_direction(model, x, phi, in, t_tol));
  }

  double r_min = res.witnesses.front().point.r, r_max = r_min;
  int j_min = 0, j_max = 0;
  double dev = 0.0;
  for (int j = 0; j <= grid; ++j) {
    const auto& w = res.witnesses[j];
    if (w.point.r < r_min) { r_min = w.point.r; j_min = j; }
    if (w.point.r > r_max) { r_max = w.point.r; j_max = j; }
    if (!model.is_pole(w.point.r))
      dev = std::max(dev,
                     std::abs(wrap_angle(w.point.theta - res.theta_opposite)));
  }
  res.max_theta_deviation = dev;

  if (r_max - r_min <= 1e-5 * L && dev <= 1e-4) {
    res.single_point = true;
    res.point = SurfacePoint{0.5 * (r_min + r_max), res.theta_opposite, true};
    res.r_lo = r_min;
    res.r_hi = r_max;
    return res;
  }

  // Subarc: refine the radial endpoints over the departure angle.
  auto witness_r = [&](double phi) {
    return cut_detail::cut_direction(model, x, phi, in, t_tol).point.r;
  };
  const double dphi = pi / grid;
  auto refine = [&](int j0, int sign) {
    const double a = std::max(0.0, pi * j0 / grid - dphi);
    const double b = std::min(pi, pi * j0 / grid + dphi);
    auto f = [&](double p) { return sign * witness_r(p); };
    return sign * golden_min(f, a, b, 1e-4).second;
  };
  res.r_lo = std::min(r_min, refine(j_min, +1));
  res.r_hi = std::max(r_max, refine(j_max, -1));
  return res;
}

}  // namespace revsphere
