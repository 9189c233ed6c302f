#pragma once

// The n-dimensional model carries the metric dr^2 + m(r)^2 dTheta^2 with
// Theta ranging over the unit (n-1)-sphere. Any two points lie in a common
// slice {directions in a fixed 2-plane}, which is the fixed-point set of an
// isometry and hence totally geodesic, isometric to the 2D surface. All
// production computations reduce to that slice: the direction separation
// becomes the 2D angular coordinate and the 2D solver does the rest. No
// n-dimensional ODE is integrated outside test oracles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "revsphere/distance.hpp"
#include "revsphere/errors.hpp"
#include "revsphere/profile.hpp"
#include "revsphere/rng.hpp"

namespace revsphere {

// Point of the n-model: radius plus a unit direction in R^n. The direction
// carries no information at a pole and is flagged off there.
struct NModelPoint {
  double r = 0.0;
  std::vector<double> direction;
  bool direction_defined = true;
};

namespace nmodel_detail {

inline double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm(const std::vector<double>& u) {
  return std::sqrt(dot(u, u));
}

// Rescales to unit length; directions are renormalized after every piece of
// arithmetic so the separation formula below stays meaningful.
inline std::vector<double> unit(std::vector<double> u) {
  const double n = norm(u);
  if (!(n > 1e-14))
    throw validation_error("NModelPoint: direction has no usable length");
  for (double& x : u) x /= n;
  return u;
}

inline void check_point(const SurfaceModel& model, int n,
                        const NModelPoint& p, const char* who) {
  if (n < 2) throw validation_error(std::string(who) + ": dimension < 2");
  if (!(p.r >= 0.0 && p.r <= model.two_a()))
    throw validation_error(std::string(who) + ": r outside [0, 2a]");
  if (model.is_pole(p.r)) return;
  if (!p.direction_defined ||
      p.direction.size() != static_cast<std::size_t>(n))
    throw validation_error(std::string(who) +
                           ": direction is not a vector in R^n");
}

}  // namespace nmodel_detail

// Angle between two unit directions on the (n-1)-sphere. The two-argument
// arctangent form is stable at both ends: near-equal and near-antipodal
// directions lose nothing to cancellation.
inline double direction_angle(const std::vector<double>& u,
                              const std::vector<double>& v) {
  if (u.size() != v.size())
    throw validation_error("direction_angle: dimension mismatch");
  const std::vector<double> a = nmodel_detail::unit(u);
  const std::vector<double> b = nmodel_detail::unit(v);
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mi = a[i] - b[i], pi_ = a[i] + b[i];
    dm += mi * mi;
    dp += pi_ * pi_;
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

inline NModelPoint make_nmodel_point(double r, std::vector<double> direction) {
  NModelPoint p;
  p.r = r;
  p.direction = nmodel_detail::unit(std::move(direction));
  p.direction_defined = true;
  return p;
}

inline NModelPoint nmodel_pole(double r) {
  NModelPoint p;
  p.r = r;
  p.direction_defined = false;
  return p;
}

// Projects the pair onto their common slice and hands the 2D solver the
// points (r_X, 0) and (r_Y, separation).
inline DistanceResult nmodel_distance(const SurfaceModel& model, int n,
                                      const NModelPoint& X,
                                      const NModelPoint& Y,
                                      const DistanceOptions& opts = {}) {
  nmodel_detail::check_point(model, n, X, "nmodel_distance");
  nmodel_detail::check_point(model, n, Y, "nmodel_distance");
  const bool px = model.is_pole(X.r), py = model.is_pole(Y.r);
  double delta = 0.0;
  if (!px && !py) delta = direction_angle(X.direction, Y.direction);
  const SurfacePoint a{X.r, 0.0, !px};
  const SurfacePoint b{Y.r, delta, !py};
  return distance(model, a, b, opts);
}

// Sectional curvature of a radial plane at radius r. Radial planes through
// a point at radius r all have curvature G(r) = -m''(r)/m(r), the Gaussian
// curvature of the 2D slice, independent of n.
inline double radial_plane_curvature(const SurfaceModel& model, double r) {
  if (!(r > 0.0 && r < model.two_a()))
    throw std::invalid_argument(
        "radial_plane_curvature: r outside (0, 2a)");
  return model.curvature(r);
}

// Haar-distributed orthogonal matrix (rows orthonormal), built by
// Gram-Schmidt on a Gaussian matrix. Reflections are included; every
// orthogonal map of directions is an isometry of the n-model fixing the
// poles.
inline std::vector<std::vector<double>> random_orthogonal(int n, Rng& rng) {
  if (n < 1) throw validation_error("random_orthogonal: dimension < 1");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  while (rows.size() < static_cast<std::size_t>(n)) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.normal();
    for (const auto& q : rows) {
      const double c = nmodel_detail::dot(v, q);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
    const double len = nmodel_detail::norm(v);
    if (len < 1e-8) continue;  // near-dependent draw, redo this row
    for (double& x : v) x /= len;
    rows.push_back(std::move(v));
  }
  return rows;
}

inline std::vector<double> apply_linear(
    const std::vector<std::vector<double>>& A, const std::vector<double>& v) {
  std::vector<double> out(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i].size() != v.size())
      throw validation_error("apply_linear: dimension mismatch");
    out[i] = nmodel_detail::dot(A[i], v);
  }
  return nmodel_detail::unit(std::move(out));
}

// Geodesic triangle in the n-model with one vertex fixed at the south pole.
// Sides p-x and p-y are radial; side x-y comes from the slice spanned by
// the two directions. The angle at the pole is the direction separation.
struct NModelTriangle {
  NModelPoint x, y;
  double side_px = 0.0, side_py = 0.0, side_xy = 0.0;
  double angle_p = 0.0, angle_x = 0.0, angle_y = 0.0;
};

// Area-weighted interior point with an isotropic direction; pole draws are
// rejected so the direction is always meaningful.
inline NModelPoint nmodel_sample_point(const SurfaceModel& model, int n,
                                       Rng& rng) {
  if (n < 2) throw validation_error("nmodel_sample_point: dimension < 2");
  NModelPoint p;
  do {
    p.r = model.sample_radius(rng);
  } while (model.is_pole(p.r));
  std::vector<double> v(static_cast<std::size_t>(n));
  double len = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    len = nmodel_detail::norm(v);
  } while (len < 1e-8);
  for (double& x : v) x /= len;
  p.direction = std::move(v);
  p.direction_defined = true;
  return p;
}

inline NModelTriangle nmodel_triangle_sample(
    const SurfaceModel& model, int n, std::uint64_t seed,
    const DistanceOptions& opts = DistanceOptions::fast()) {
  if (n < 2) throw validation_error("nmodel_triangle_sample: dimension < 2");
  Rng rng(Rng::derive(seed, 0x71a));
  NModelTriangle tri;
  tri.x = nmodel_sample_point(model, n, rng);
  tri.y = nmodel_sample_point(model, n, rng);
  tri.angle_p = direction_angle(tri.x.direction, tri.y.direction);
  tri.side_px = tri.x.r;  // radial closed form from the pole
  tri.side_py = tri.y.r;
  tri.side_xy = nmodel_distance(model, n, tri.x, tri.y, opts).distance;

  const SurfacePoint pole{0.0, 0.0, false};
  const SurfacePoint sx{tri.x.r, 0.0, true};
  const SurfacePoint sy{tri.y.r, tri.angle_p, true};
  tri.angle_x = angle_at(model, sx, pole, sy, opts);
  tri.angle_y = angle_at(model, sy, pole, sx, opts);
  return tri;
}

}  // namespace revsphere
