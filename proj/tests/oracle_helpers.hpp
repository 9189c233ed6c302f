#pragma once

// Oracles for the test suite. Everything here recomputes expected values
// from first principles (closed forms, quadrature, brute-force search) and
// must stay independent of the library's own solver paths.

#include <cmath>
#include <functional>

namespace oracle {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// ---- Spheroid with equatorial radius a and polar semi-axis b ----
// Parametrized by latitude angle u in [0, pi] from pole to pole:
//   position (a sin u cos v, a sin u sin v, b cos u)
//   ds/du = w(u) = sqrt(a^2 cos^2 u + b^2 sin^2 u)
//   Gauss curvature K(u) = b^2 / w(u)^4

inline double spheroid_w(double a, double b, double u) {
  const double c = std::cos(u), s = std::sin(u);
  return std::sqrt(a * a * c * c + b * b * s * s);
}

inline double spheroid_curvature(double a, double b, double u) {
  const double w = spheroid_w(a, b, u);
  return b * b / (w * w * w * w);
}

// Meridian arc length from the pole via composite Simpson (independent of
// the library quadrature).
inline double spheroid_arclen(double a, double b, double u, int n = 4000) {
  if (u <= 0.0) return 0.0;
  if (n % 2) ++n;
  const double h = u / n;
  double s = spheroid_w(a, b, 0.0) + spheroid_w(a, b, u);
  for (int i = 1; i < n; ++i)
    s += spheroid_w(a, b, i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Latitude at a given meridian arc length, by bisection on spheroid_arclen.
inline double spheroid_latitude(double a, double b, double r, int n = 4000) {
  double lo = 0.0, hi = pi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spheroid_arclen(a, b, mid, n) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- Unit-sphere trigonometry (curvature H rescales lengths) ----

// Great-circle distance on curvature-H round sphere between colatitude/
// longitude pairs, via the spherical law of cosines.
inline double sphere_distance(double H, double r1, double th1, double r2,
                              double th2) {
  const double s = std::sqrt(H);
  const double c = std::cos(s * r1) * std::cos(s * r2) +
                   std::sin(s * r1) * std::sin(s * r2) * std::cos(th2 - th1);
  return std::acos(std::min(1.0, std::max(-1.0, c))) / s;
}

// Angle at vertex A of the spherical triangle with side lengths a (opposite
// A), b, c adjacent, on curvature H.
inline double sphere_angle(double H, double opp, double adj1, double adj2) {
  const double s = std::sqrt(H);
  const double ca = std::cos(s * opp), cb = std::cos(s * adj1),
               cc = std::cos(s * adj2);
  const double sb = std::sin(s * adj1), sc = std::sin(s * adj2);
  double x = (ca - cb * cc) / (sb * sc);
  x = std::min(1.0, std::max(-1.0, x));
  return std::acos(x);
}

// Angle at vertex A between the great-circle arcs toward B and C, measured
// in the embedding: project B and C onto the tangent plane at A and take
// the angle between the projections. Vertices are colatitude/longitude
// pairs on the curvature-H sphere; no trigonometric identity involved.
inline double sphere_vertex_angle(double H, double rA, double thA, double rB,
                                  double thB, double rC, double thC) {
  const double s = std::sqrt(H);
  auto embed = [&](double r, double th, double* p) {
    p[0] = std::sin(s * r) * std::cos(th);
    p[1] = std::sin(s * r) * std::sin(th);
    p[2] = std::cos(s * r);
  };
  double A[3], B[3], C[3];
  embed(rA, thA, A);
  embed(rB, thB, B);
  embed(rC, thC, C);
  auto tangent = [&](const double* q, double* t) {
    const double dot = q[0] * A[0] + q[1] * A[1] + q[2] * A[2];
    double n = 0.0;
    for (int i = 0; i < 3; ++i) {
      t[i] = q[i] - dot * A[i];
      n += t[i] * t[i];
    }
    n = std::sqrt(n);
    for (int i = 0; i < 3; ++i) t[i] /= n;
  };
  double u[3], v[3];
  tangent(B, u);
  tangent(C, v);
  double dm = 0.0, dp = 0.0;
  for (int i = 0; i < 3; ++i) {
    dm += (u[i] - v[i]) * (u[i] - v[i]);
    dp += (u[i] + v[i]) * (u[i] + v[i]);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

}  // namespace oracle
