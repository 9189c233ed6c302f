#pragma once

// Independent distance oracle for test fixtures. Uses only SurfaceModel
// evaluation; no ODE, quadrature, or root machinery from the library.
//
// Stage 1: Dijkstra on a polar grid (16-neighbor stencil, pole rows collapsed
// to single nodes) finds the right funnel: a coarse length, the winding of
// theta along the way, and the departure direction at the source.
// Stage 2: a fixed-step RK4 shoot of the reduced geodesic system, seeded from
// the grid path, is sharpened by a secant iteration on the departure angle
// until the ray passes through the target. Crossings of the target parallel
// are read off a cubic Hermite reconstruction inside the bracketing step, so
// the length converges at the integrator's O(h^4).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "revsphere/profile.hpp"

namespace oracle {

struct RefResult {
  double length = 0.0;
  double err_est = 0.0;
  double min_r = 0.0;  // closest pole approach of the refined ray
};

namespace ref_detail {

inline double seg_len(const revsphere::SurfaceModel& mod, double ra, double ta,
                      double rb, double tb) {
  const double mm = mod.m(0.5 * (ra + rb));
  const double dr = rb - ra, dt = tb - ta;
  return std::sqrt(dr * dr + mm * mm * dt * dt);
}

// Dijkstra over the polar grid. Returns the node path from x to y as
// (r, theta) pairs, theta in [0, 2pi).
inline std::vector<std::pair<double, double>> grid_path(
    const revsphere::SurfaceModel& mod, double r1, double th1, double r2,
    double th2, int nr, int nth) {
  const double L = mod.two_a();
  const auto wrap_idx = [&](int j) { return ((j % nth) + nth) % nth; };
  // Node 0: pole r=0; node 1: pole r=L; interior (i,j) -> 2 + (i-1)*nth + j,
  // i in [1, nr-1].
  const auto node = [&](int i, int j) { return 2 + (i - 1) * nth + wrap_idx(j); };
  const int n_nodes = 2 + (nr - 1) * nth;
  const double dr = L / nr, dth = revsphere::two_pi / nth;

  // Snap endpoints to grid nodes (error absorbed by the refinement stage,
  // which starts from the exact endpoints).
  const auto snap = [&](double r, double th) {
    int i = std::clamp(static_cast<int>(std::lround(r / dr)), 0, nr);
    if (i == 0) return 0;
    if (i == nr) return 1;
    const int j = wrap_idx(static_cast<int>(std::lround(th / dth)));
    return node(i, j);
  };
  const int src = snap(r1, th1), dst = snap(r2, th2);

  std::vector<double> dist(n_nodes, 1e300);
  std::vector<std::int32_t> parent(n_nodes, -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});

  const auto coords = [&](int id) -> std::pair<double, double> {
    if (id == 0) return {0.0, 0.0};
    if (id == 1) return {L, 0.0};
    const int k = id - 2;
    return {(k / nth + 1) * dr, (k % nth) * dth};
  };

  const int stencil[16][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                              {1, 1},  {1, -1}, {-1, 1}, {-1, -1},
                              {1, 2},  {1, -2}, {-1, 2}, {-1, -2},
                              {2, 1},  {2, -1}, {-2, 1}, {-2, -1}};

  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] * (1.0 + 1e-15)) continue;
    if (u == dst) break;
    const auto [ru, tu] = coords(u);
    auto relax = [&](int v, double w) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        parent[v] = u;
        pq.push({dist[v], v});
      }
    };
    if (u == 0 || u == 1) {
      const int i = u == 0 ? 1 : nr - 1;
      for (int j = 0; j < nth; ++j) relax(node(i, j), dr);
      continue;
    }
    const int k = u - 2, iu = k / nth + 1, ju = k % nth;
    for (const auto& s : stencil) {
      const int iv = iu + s[0];
      if (iv <= 0) {
        if (iv == 0 && s[1] == 0) relax(0, dr);
        continue;
      }
      if (iv >= nr) {
        if (iv == nr && s[1] == 0) relax(1, dr);
        continue;
      }
      const int jv = ju + s[1];
      const auto [rv, tv] = coords(node(iv, jv));
      double dtw = tv - tu;
      if (dtw > revsphere::pi) dtw -= revsphere::two_pi;
      if (dtw < -revsphere::pi) dtw += revsphere::two_pi;
      const double mm = mod.m(0.5 * (ru + rv));
      relax(node(iv, jv),
            std::sqrt((rv - ru) * (rv - ru) + mm * mm * dtw * dtw));
    }
  }
  if (parent[dst] < 0 && dst != src)
    throw std::runtime_error("grid_path: target unreachable");

  std::vector<std::pair<double, double>> path;
  for (int v = dst; v >= 0; v = parent[v]) {
    path.push_back(coords(v));
    if (v == src) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct Cross {
  double t, theta;
};

struct ShootOut {
  std::vector<Cross> xs;
  double min_r = 0.0;
};

// Cubic Hermite value on [0, h] given endpoint values and derivatives.
inline double hermite(double ya, double da, double yb, double db, double h,
                      double u) {
  const double s = u / h;
  const double s2 = s * s, s3 = s2 * s;
  return ya * (2 * s3 - 3 * s2 + 1) + da * h * (s3 - 2 * s2 + s) +
         yb * (-2 * s3 + 3 * s2) + db * h * (s3 - s2);
}

// Classic fixed-step RK4 on (r, theta, phi); records every crossing of the
// target parallel r = r2, including double crossings hidden inside one step
// when the ray turns just past r2 (caught via the Hermite extremum).
inline ShootOut shoot(const revsphere::SurfaceModel& mod, double r1, double phi,
                      double r2, double t_max, int n) {
  const double L = mod.two_a();
  auto deriv = [&](const double y[3], double dy[3]) {
    const double rr = std::clamp(y[0], 1e-9 * L, L * (1.0 - 1e-9));
    double m, m1;
    mod.eval(rr, &m, &m1, nullptr);
    const double sp = std::sin(y[2]);
    dy[0] = std::cos(y[2]);
    dy[1] = sp / m;
    dy[2] = -m1 * sp / m;
  };
  ShootOut out;
  out.min_r = std::min(r1, L - r1);
  const double h = t_max / n;
  double y[3] = {r1, 0.0, phi};
  double dy0[3];
  deriv(y, dy0);
  for (int i = 0; i < n; ++i) {
    double k1[3], k2[3], k3[3], k4[3], yt[3];
    for (int c = 0; c < 3; ++c) k1[c] = dy0[c];
    for (int c = 0; c < 3; ++c) yt[c] = y[c] + 0.5 * h * k1[c];
    deriv(yt, k2);
    for (int c = 0; c < 3; ++c) yt[c] = y[c] + 0.5 * h * k2[c];
    deriv(yt, k3);
    for (int c = 0; c < 3; ++c) yt[c] = y[c] + h * k3[c];
    deriv(yt, k4);
    double yn[3];
    for (int c = 0; c < 3; ++c)
      yn[c] = y[c] + h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    double dyn[3];
    deriv(yn, dyn);

    const double t0 = i * h;
    const double fa = y[0] - r2, fb = yn[0] - r2;
    auto emit = [&](double ua, double ub) {
      // Newton on the Hermite cubic for r(t0+u) = r2, then theta there.
      double u = 0.5 * (ua + ub);
      for (int it = 0; it < 40; ++it) {
        const double f = hermite(y[0], dy0[0], yn[0], dyn[0], h, u) - r2;
        const double eps = 1e-7 * h;
        const double f1 = (hermite(y[0], dy0[0], yn[0], dyn[0], h, u + eps) -
                           hermite(y[0], dy0[0], yn[0], dyn[0], h, u - eps)) /
                          (2 * eps);
        if (f1 == 0.0) break;
        const double un = std::clamp(u - f / f1, ua, ub);
        if (std::abs(un - u) < 1e-14 * h) {
          u = un;
          break;
        }
        u = un;
      }
      out.xs.push_back(
          {t0 + u, hermite(y[1], dy0[1], yn[1], dyn[1], h, u)});
    };
    if (fa * fb < 0.0) {
      emit(0.0, h);
    } else if (dy0[0] * dyn[0] < 0.0 && fa != 0.0) {
      // Turning point inside the step: locate the extremum of the Hermite
      // cubic; if it overshoots r2 there are two crossings in this step.
      double ue = 0.5 * h;
      for (int it = 0; it < 40; ++it) {
        const double eps = 1e-7 * h;
        const double d1 = (hermite(y[0], dy0[0], yn[0], dyn[0], h, ue + eps) -
                           hermite(y[0], dy0[0], yn[0], dyn[0], h, ue - eps)) /
                          (2 * eps);
        const double d2 =
            (hermite(y[0], dy0[0], yn[0], dyn[0], h, ue + eps) -
             2 * hermite(y[0], dy0[0], yn[0], dyn[0], h, ue) +
             hermite(y[0], dy0[0], yn[0], dyn[0], h, ue - eps)) /
            (eps * eps);
        if (d2 == 0.0) break;
        const double un = std::clamp(ue - d1 / d2, 0.0, h);
        if (std::abs(un - ue) < 1e-13 * h) {
          ue = un;
          break;
        }
        ue = un;
      }
      const double re = hermite(y[0], dy0[0], yn[0], dyn[0], h, ue);
      if ((re - r2) * fa < 0.0) {
        emit(0.0, ue);
        emit(ue, h);
      }
      out.min_r = std::min(out.min_r, std::min(re, L - re));
    }
    out.min_r = std::min(out.min_r, std::min(yn[0], L - yn[0]));
    for (int c = 0; c < 3; ++c) y[c] = yn[c];
    for (int c = 0; c < 3; ++c) dy0[c] = dyn[c];
    if (y[0] <= 0.0 || y[0] >= L) break;
  }
  return out;
}

// Theta of the crossing nearest the wanted span, or NaN if there is none.
// Theta is strictly increasing along any ray, so this selection stays
// continuous through tangencies where nearest-in-time tracking loses the
// family (crossing times slide rapidly as a turning point nears r2).
inline double theta_near(const ShootOut& so, double span, double* t_at) {
  const Cross* best = nullptr;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& c : so.xs) {
    const double d = std::abs(c.theta - span);
    if (d < bd) {
      bd = d;
      best = &c;
    }
  }
  if (!best) return std::numeric_limits<double>::quiet_NaN();
  if (t_at) *t_at = best->t;
  return best->theta;
}

// Secant solve for the departure angle whose ray meets (r2, span); returns
// the arc length, NaN on failure. The grid-path seed angle can be off by a
// few tenths (stencil moves are sparse in direction near a meridian), so a
// coarse sweep around the seed supplies the starting bracket.
inline double solve_length(const revsphere::SurfaceModel& mod, double r1,
                           double r2, double span, double phi_seed,
                           double t_seed, int n, double* min_r_out) {
  const double t_max = 1.3 * t_seed;
  const double lo = 1e-9, hi = revsphere::pi - 1e-9;
  double t_hit = 0.0, min_r = r1;
  auto g = [&](double phi, int steps) {
    const auto so = shoot(mod, r1, phi, r2, t_max, steps);
    const double th = theta_near(so, span, &t_hit);
    min_r = so.min_r;
    return th - span;
  };

  const int ns = 65;
  const int cheap = std::max(1024, n / 16);
  std::vector<double> sp(ns), sg(ns);
  for (int k = 0; k < ns; ++k) {
    sp[k] = std::clamp(phi_seed - 0.5 + k / (ns - 1.0), lo, hi);
    sg[k] = g(sp[k], cheap);
  }
  struct Start {
    double a, b, dist;
  };
  std::vector<Start> starts;
  for (int k = 0; k + 1 < ns; ++k) {
    if (sp[k] == sp[k + 1]) continue;
    if (std::isfinite(sg[k]) && std::isfinite(sg[k + 1]) &&
        sg[k] * sg[k + 1] <= 0.0)
      starts.push_back({sp[k], sp[k + 1],
                        std::abs(0.5 * (sp[k] + sp[k + 1]) - phi_seed)});
  }
  std::sort(starts.begin(), starts.end(),
            [](const Start& x, const Start& y) { return x.dist < y.dist; });
  if (starts.size() > 3) starts.resize(3);
  if (starts.empty()) {
    // No bracket: start at the finite node nearest the seed and let the
    // secant walk (covers roots hiding inside a tangency sliver).
    int kb = -1;
    for (int k = 0; k < ns; ++k)
      if (std::isfinite(sg[k]) &&
          (kb < 0 || std::abs(sp[k] - phi_seed) < std::abs(sp[kb] - phi_seed)))
        kb = k;
    if (kb < 0) return std::numeric_limits<double>::quiet_NaN();
    starts.push_back({sp[kb], std::clamp(sp[kb] + (sg[kb] > 0 ? -1e-4 : 1e-4),
                                         lo, hi),
                      0.0});
  }

  for (const auto& st : starts) {
    double p0 = st.a, g0 = g(p0, n);
    double p1 = st.b, g1 = g(p1, n);
    double t1 = t_hit, mr1 = min_r;
    if (!std::isfinite(g0)) continue;
    for (int it = 0; it < 80; ++it) {
      if (!std::isfinite(g1)) {
        p1 = 0.5 * (p0 + p1);
        g1 = g(p1, n);
        t1 = t_hit;
        mr1 = min_r;
        continue;
      }
      if (std::abs(g1) < 1e-12 || std::abs(p1 - p0) < 1e-16) break;
      double step = g1 * (p1 - p0) / (g1 - g0);
      if (!std::isfinite(step) || std::abs(step) > 0.1)
        step = std::copysign(0.1, step);
      p0 = p1;
      g0 = g1;
      p1 = std::clamp(p1 - step, lo, hi);
      g1 = g(p1, n);
      t1 = t_hit;
      mr1 = min_r;
    }
    if (!std::isfinite(g1) || std::abs(g1) > 1e-8) continue;
    // The solved geodesic must be the one the grid path suggested.
    if (std::abs(t1 - t_seed) > 0.25 * t_seed + 0.05 * mod.two_a()) continue;
    if (min_r_out) *min_r_out = mr1;
    // First-variation correction absorbs the residual span miss.
    const double nu = mod.m(r1) * std::sin(p1);
    return t1 + nu * (-g1);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace ref_detail

// Distance between (r1, th1) and (r2, th2), interior points only.
inline RefResult reference_distance(const revsphere::SurfaceModel& mod,
                                    double r1, double th1, double r2,
                                    double th2, int n_steps = 32768) {
  using namespace ref_detail;
  const double LL = mod.two_a();
  auto path = grid_path(mod, r1, th1, r2, th2, 720, 720);
  if (path.size() < 2) throw std::runtime_error("reference_distance: degenerate path");

  for (const auto& nd : path) {
    if (nd.first > 0.0 && nd.first < LL) continue;
    // The grid path runs through a pole; theta unwrapping breaks there, and
    // the through-pole meridian need not be minimal. Compare it against the
    // swing family that rounds the pole, seeded just off the meridian.
    const bool north = nd.first == 0.0;
    const double mer = north ? r1 + r2 : 2.0 * LL - r1 - r2;
    double sp = std::abs(std::remainder(th2 - th1, revsphere::two_pi));
    RefResult res;
    res.length = mer;
    res.err_est = 1e-12 * (1.0 + mer);
    res.min_r = 0.0;  // the meridian passes through the pole
    const double seed = north ? revsphere::pi - 0.3 : 0.3;
    for (double span : {sp, revsphere::two_pi - sp}) {
      double mr = r1;
      const double lf =
          solve_length(mod, r1, r2, span, seed, mer, n_steps, &mr);
      const double lh =
          solve_length(mod, r1, r2, span, seed, mer, n_steps / 2, nullptr);
      if (!std::isfinite(lf) || !std::isfinite(lh) || lf >= res.length)
        continue;
      res.length = lf;
      res.err_est = std::abs(lf - lh) + 1e-12 * (1.0 + lf);
      res.min_r = mr;
    }
    return res;
  }

  // Unwrap theta along the grid path to fix the winding, and measure the
  // coarse length and departure direction.
  std::vector<double> r(path.size()), th(path.size());
  r[0] = path[0].first;
  th[0] = path[0].second;
  double coarse = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    r[i] = path[i].first;
    double d = path[i].second - path[i - 1].second;
    if (d > revsphere::pi) d -= revsphere::two_pi;
    if (d < -revsphere::pi) d += revsphere::two_pi;
    th[i] = th[i - 1] + d;
    coarse += seg_len(mod, r[i - 1], th[i - 1], r[i], th[i]);
  }
  double span = th.back() - th.front();
  double de = (th2 - th1) - span;
  while (de > revsphere::pi) de -= revsphere::two_pi;
  while (de < -revsphere::pi) de += revsphere::two_pi;
  span += de;

  // Mirror symmetry: solve with a non-negative span, phi in (0, pi).
  const double sgn = span < 0 ? -1.0 : 1.0;
  span *= sgn;

  const double dr0 = r[1] - r[0];
  double dt0 = sgn * (th[1] - th[0]);
  double phi_seed = std::atan2(mod.m(std::max(r1, 1e-6 * mod.two_a())) * dt0,
                               dr0);
  phi_seed = std::clamp(phi_seed, 1e-6, revsphere::pi - 1e-6);

  RefResult res;
  double mr = r1;
  const double l_fine =
      solve_length(mod, r1, r2, span, phi_seed, coarse, n_steps, &mr);
  const double l_half =
      solve_length(mod, r1, r2, span, phi_seed, coarse, n_steps / 2, nullptr);
  if (!std::isfinite(l_fine) || !std::isfinite(l_half))
    throw std::runtime_error("reference_distance: refinement failed");
  res.length = l_fine;
  res.err_est = std::abs(l_fine - l_half) + 1e-12 * (1.0 + l_fine);
  res.min_r = mr;
  return res;
}

}  // namespace oracle
