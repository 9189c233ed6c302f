#pragma once

// Comparison triangles and the verification suite built on them.
//
// A triangle with apex p at the pole is rebuilt inside a model surface by
// inverting its x-y side over the angular separation (monotonicity of the
// separation is verified first, with a dense-scan fallback), after which
// the angles of the space under test are compared vertex by vertex against
// the model's. The suite checks the desk-scale consequences for a model
// rescaled to pole distance pi: the perimeter bound 2 pi, the diameter,
// cut-locus confinement to the opposite half meridian, the pole distance
// sum, and the meridian conjugate time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "revsphere/cut_locus.hpp"
#include "revsphere/distance.hpp"
#include "revsphere/errors.hpp"
#include "revsphere/geodesic.hpp"
#include "revsphere/nmodel.hpp"
#include "revsphere/profile.hpp"
#include "revsphere/rng.hpp"

namespace revsphere {

struct TriangleSides {
  double d_px = 0.0, d_py = 0.0, d_xy = 0.0;
};

// Triangle as measured on the space under test: side lengths from the base
// point plus the three angles, at p, at x, and at y.
struct TriangleData {
  TriangleSides sides;
  double angle_p = 0.0, angle_x = 0.0, angle_y = 0.0;
};

inline TriangleData triangle_data(const NModelTriangle& t) {
  TriangleData d;
  d.sides = {t.side_px, t.side_py, t.side_xy};
  d.angle_p = t.angle_p;
  d.angle_x = t.angle_x;
  d.angle_y = t.angle_y;
  return d;
}

// Comparison triangle realized in a model surface: p at the pole, x on the
// zero meridian, y at angular separation delta_theta.
struct TriangleConfig {
  TriangleSides sides;       // requested side lengths
  double delta_theta = 0.0;  // separation realizing d_xy
  SurfacePoint p, x, y;
  double realized_xy = 0.0;
  double angle_p = 0.0, angle_x = 0.0, angle_y = 0.0;
};

// Random triangle with its apex at the pole; x and y are area weighted.
inline TriangleSides sample_pole_triangle(
    const SurfaceModel& model, Rng& rng,
    const DistanceOptions& opts = DistanceOptions::fast()) {
  const SurfacePoint x = model.sample_point(rng);
  const SurfacePoint y = model.sample_point(rng);
  TriangleSides s;
  s.d_px = x.r;
  s.d_py = y.r;
  s.d_xy = distance(model, x, y, opts).distance;
  return s;
}

// Finds delta in [0, pi] with d((d_px, 0), (d_py, delta)) = d_xy and reads
// off the angles. The separation-monotonicity assumption behind plain
// bisection is verified on a coarse grid first; if it fails, a dense scan
// locates a sign change and bisection runs inside that cell.
inline TriangleConfig comparison_triangle(
    const SurfaceModel& model, const TriangleSides& sides, double tol = 1e-7,
    const DistanceOptions& inner = DistanceOptions::fast(1e-9)) {
  const double L = model.two_a();
  if (!(sides.d_px > 0.0 && sides.d_py > 0.0 && sides.d_xy > 0.0))
    throw validation_error("comparison_triangle: sides must be positive");
  if (sides.d_px > L || sides.d_py > L)
    throw validation_error(
        "comparison_triangle: radial side exceeds the pole distance");

  auto at = [&](double delta) {
    return distance(model, {sides.d_px, 0.0, true},
                    {sides.d_py, delta, true}, inner)
        .distance;
  };
  const double lo = std::abs(sides.d_px - sides.d_py);
  const double hi = at(pi);
  if (sides.d_xy < lo - tol || sides.d_xy > hi + tol) {
    std::ostringstream os;
    os << "comparison_triangle: no separation realizes d_xy=" << sides.d_xy
       << "; feasible range [" << lo << ", " << hi << "]";
    throw validation_error(os.str());
  }
  const double target = std::min(std::max(sides.d_xy, lo), hi);

  double a = 0.0, b = pi;
  if (!verify_delta_monotonicity(model, sides.d_px, sides.d_py, 24, inner)) {
    const int scan = 256;
    double fa = at(0.0) - target;
    for (int i = 1; i <= scan; ++i) {
      const double t = pi * i / scan;
      const double ft = at(t) - target;
      if (fa == 0.0 || (fa < 0.0) != (ft < 0.0)) {
        a = pi * (i - 1) / scan;
        b = t;
        break;
      }
      fa = ft;
    }
  }
  for (int i = 0; i < 60 && b - a > 1e-13; ++i) {
    const double mid = 0.5 * (a + b);
    const double f = at(mid) - target;
    if (std::abs(f) < 0.01 * tol) {
      a = b = mid;
      break;
    }
    (f < 0.0 ? a : b) = mid;
  }
  const double delta = 0.5 * (a + b);

  TriangleConfig cfg;
  cfg.sides = sides;
  cfg.delta_theta = delta;
  cfg.p = SurfacePoint{0.0, 0.0, false};
  cfg.x = SurfacePoint{sides.d_px, 0.0, true};
  cfg.y = SurfacePoint{sides.d_py, delta, true};
  cfg.realized_xy = at(delta);
  cfg.angle_p = angle_at(model, cfg.p, cfg.x, cfg.y, inner);
  cfg.angle_x = angle_at(model, cfg.x, cfg.p, cfg.y, inner);
  cfg.angle_y = angle_at(model, cfg.y, cfg.p, cfg.x, inner);
  return cfg;
}

// Angles of the triangle with the given sides on the round sphere of
// curvature k, by the spherical law of cosines; returns {at_p, at_x, at_y}.
inline std::array<double, 3> spherical_triangle_angles(
    double k, const TriangleSides& sides) {
  const double s = std::sqrt(k);
  auto angle = [&](double opp, double b, double c) {
    const double sb = std::sin(s * b), sc = std::sin(s * c);
    double cosv =
        (std::cos(s * opp) - std::cos(s * b) * std::cos(s * c)) / (sb * sc);
    cosv = std::min(1.0, std::max(-1.0, cosv));
    return std::acos(cosv);
  };
  return {angle(sides.d_xy, sides.d_px, sides.d_py),
          angle(sides.d_py, sides.d_px, sides.d_xy),
          angle(sides.d_px, sides.d_py, sides.d_xy)};
}

// Closed-form triangle on the round sphere of curvature k with apex at the
// pole: vertices at radii r1, r2 and angular separation delta.
inline TriangleData spherical_triangle(double k, double r1, double r2,
                                       double delta) {
  const double s = std::sqrt(k);
  const double c1 = std::cos(s * r1), s1 = std::sin(s * r1);
  const double c2 = std::cos(s * r2), s2 = std::sin(s * r2);
  const double u[3] = {s1, 0.0, c1};
  const double v[3] = {s2 * std::cos(delta), s2 * std::sin(delta), c2};
  double dm = 0.0, dp = 0.0;
  for (int i = 0; i < 3; ++i) {
    dm += (u[i] - v[i]) * (u[i] - v[i]);
    dp += (u[i] + v[i]) * (u[i] + v[i]);
  }
  TriangleData t;
  t.sides = {r1, r2, 2.0 / s * std::atan2(std::sqrt(dm), std::sqrt(dp))};
  const auto ang = spherical_triangle_angles(k, t.sides);
  t.angle_p = ang[0];
  t.angle_x = ang[1];
  t.angle_y = ang[2];
  return t;
}

// Space under test: enough structure to certify the curvature hypothesis
// (radial curvature at each distance from the base point) and, when
// available, to measure a triangle with given sides on the space itself.
struct TestSpace {
  std::string name;
  double diameter = 0.0;
  std::function<double(double)> radial_curvature;
  std::function<TriangleData(const TriangleSides&)> measure;  // may be empty
};

inline TestSpace round_sphere_space(double k) {
  if (!(k > 0.0))
    throw validation_error("round_sphere_space: curvature must be positive");
  TestSpace ts;
  std::ostringstream os;
  os << "sphere(" << k << ")";
  ts.name = os.str();
  ts.diameter = pi / std::sqrt(k);
  ts.radial_curvature = [k](double) { return k; };
  ts.measure = [k](const TriangleSides& s) {
    TriangleData t;
    t.sides = s;
    const auto ang = spherical_triangle_angles(k, s);
    t.angle_p = ang[0];
    t.angle_x = ang[1];
    t.angle_y = ang[2];
    return t;
  };
  return ts;
}

namespace comparison_detail {

// G extended to the closed interval by its pole limits, clamped outside.
inline double radial_curvature_of(const SurfaceModel& model, double r) {
  const double L = model.two_a();
  if (r <= 0.0 || r >= L) return model.pole_curvature();
  return model.curvature(r);
}

}  // namespace comparison_detail

inline TestSpace surface_space(
    const SurfaceModel& model,
    const DistanceOptions& inner = DistanceOptions::fast(1e-9)) {
  TestSpace ts;
  ts.name = model.name();
  ts.diameter = model.two_a();
  ts.radial_curvature = [model](double r) {
    return comparison_detail::radial_curvature_of(model, r);
  };
  ts.measure = [model, inner](const TriangleSides& s) {
    const auto cfg = comparison_triangle(model, s, 1e-7, inner);
    TriangleData t;
    t.sides = s;
    t.angle_p = cfg.angle_p;
    t.angle_x = cfg.angle_x;
    t.angle_y = cfg.angle_y;
    return t;
  };
  return ts;
}

// The n-dimensional model over the same profile; triangles on it arrive
// already measured (slice reduction), so no measure hook is needed.
inline TestSpace nmodel_space(const SurfaceModel& model, int n) {
  if (n < 2) throw validation_error("nmodel_space: dimension < 2");
  TestSpace ts;
  std::ostringstream os;
  os << model.name() << " model, n=" << n;
  ts.name = os.str();
  ts.diameter = model.two_a();
  ts.radial_curvature = [model](double r) {
    return comparison_detail::radial_curvature_of(model, r);
  };
  return ts;
}

// Certifies the hypothesis: the test space's radial curvature dominates the
// model's radial curvature function on a sampled grid of distances.
inline void check_curvature_domination(const TestSpace& test,
                                       const SurfaceModel& model,
                                       int grid = 1000, double tol = 1e-9) {
  const double top = std::min(test.diameter, model.two_a());
  for (int i = 0; i <= grid; ++i) {
    const double r = top * i / grid;
    const double gm = comparison_detail::radial_curvature_of(model, r);
    const double gt = test.radial_curvature(r);
    if (gt < gm - tol) {
      std::ostringstream os;
      os << "curvature hypothesis violated: test space " << test.name
         << " has radial curvature " << gt << " < " << gm << " at r=" << r;
      throw validation_error(os.str());
    }
  }
}

struct TriangleRecord {
  TriangleSides sides;
  std::array<double, 3> test_angles{};   // at p, x, y on the space under test
  std::array<double, 3> model_angles{};  // comparison triangle in the model
  std::array<double, 3> margins{};       // test minus model, per vertex
  bool feasible = true;
  bool pass = false;
};

// One angle-comparison check: margins test - model at p, x, y must all
// clear -tol. An infeasible comparison triangle is recorded, not thrown;
// given a certified hypothesis it would contradict the side transfer.
inline TriangleRecord check_angle_comparison(
    const TestSpace& test, const SurfaceModel& model, const TriangleData& tri,
    double tol = 1e-5,
    const DistanceOptions& inner = DistanceOptions::fast(1e-9)) {
  check_curvature_domination(test, model);

  TriangleRecord rec;
  rec.sides = tri.sides;
  rec.test_angles = {tri.angle_p, tri.angle_x, tri.angle_y};
  TriangleConfig cfg;
  try {
    cfg = comparison_triangle(model, tri.sides, 1e-7, inner);
  } catch (const validation_error&) {
    rec.feasible = false;
    rec.pass = false;
    return rec;
  }
  rec.model_angles = {cfg.angle_p, cfg.angle_x, cfg.angle_y};
  rec.pass = true;
  for (int i = 0; i < 3; ++i) {
    rec.margins[i] = rec.test_angles[i] - rec.model_angles[i];
    if (rec.margins[i] < -tol) rec.pass = false;
  }
  return rec;
}

inline TriangleRecord check_angle_comparison(
    const TestSpace& test, const SurfaceModel& model, const NModelTriangle& tri,
    double tol = 1e-5,
    const DistanceOptions& inner = DistanceOptions::fast(1e-9)) {
  return check_angle_comparison(test, model, triangle_data(tri), tol, inner);
}

// Perimeter slack in the units where the bound reads 2 pi: the sides are
// scaled by pi / (2a), so a nonnegative value certifies the bound for the
// model at hand whether or not it was rescaled beforehand.
inline double perimeter_margin(const SurfaceModel& model,
                               const TriangleSides& sides) {
  const double lam = pi / model.two_a();
  return lam * (2.0 * model.two_a() - (sides.d_px + sides.d_py + sides.d_xy));
}

inline double perimeter_check(const SurfaceModel& model,
                              const TriangleConfig& cfg) {
  TriangleSides realized = cfg.sides;
  realized.d_xy = cfg.realized_xy;
  return perimeter_margin(model, realized);
}

struct CheckRecord {
  std::string name;
  bool pass = false;
  double value = 0.0;  // headline number; its meaning is named in witness
  double tol = 0.0;
  std::string witness;
};

struct ComparisonReport {
  std::uint64_t seed = 0;
  std::vector<TriangleRecord> triangles;
  std::vector<CheckRecord> checks;
  std::vector<std::size_t> counterexamples;  // indices into triangles
  double max_interior_pair = 0.0;  // largest sampled non-pole pair distance
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return counterexamples.empty();
  }
};

// Five checks on a model rescaled to pole distance pi:
//   perimeter-bound          min slack of 2 pi over pole-apex triangles
//   diameter-equals-pi       sampled diameter against pi, pole witnesses
//   cut-locus-confinement    cut loci sit on the opposite half meridian
//   pole-distance-sum        d(p,x) + d(x,q) = pi over random x
//   meridian-conjugate-time  first conjugate time from the pole equals pi
inline ComparisonReport verify_lemma_suite(const SurfaceModel& model,
                                           int samples, std::uint64_t seed) {
  const double L = model.two_a();
  if (std::abs(L - pi) > 1e-9)
    throw validation_error(
        "verify_lemma_suite: model must be rescaled so the pole distance is "
        "pi");
  samples = std::max(samples, 1);
  ComparisonReport rep;
  rep.seed = seed;
  const auto inner = DistanceOptions::fast(1e-8);

  {
    Rng rng(Rng::derive(seed, 0xbea));
    double worst = std::numeric_limits<double>::infinity();
    TriangleSides worst_sides;
    for (int i = 0; i < samples; ++i) {
      const TriangleSides s = sample_pole_triangle(model, rng, inner);
      rep.max_interior_pair = std::max(rep.max_interior_pair, s.d_xy);
      const double margin = perimeter_margin(model, s);
      if (margin < worst) {
        worst = margin;
        worst_sides = s;
      }
    }
    CheckRecord c;
    c.name = "perimeter-bound";
    c.value = worst;
    c.tol = 1e-7;
    c.pass = worst >= -c.tol;
    std::ostringstream os;
    os << "min slack of 2 pi at sides (" << worst_sides.d_px << ", "
       << worst_sides.d_py << ", " << worst_sides.d_xy << ")";
    c.witness = os.str();
    rep.checks.push_back(std::move(c));
  }

  {
    const auto dia =
        diameter(model, std::min(samples, 300), Rng::derive(seed, 0xd1a),
                 inner);
    const double pole_gap =
        std::max(std::min(dia.witness_x.r, L - dia.witness_x.r),
                 std::min(dia.witness_y.r, L - dia.witness_y.r));
    CheckRecord c;
    c.name = "diameter-equals-pi";
    c.value = std::abs(dia.value - pi);
    c.tol = 1e-4;
    c.pass = c.value <= c.tol && pole_gap <= 1e-3;
    std::ostringstream os;
    os << "|diameter - pi|; witnesses at r=" << dia.witness_x.r
       << " and r=" << dia.witness_y.r;
    c.witness = os.str();
    rep.checks.push_back(std::move(c));
  }

  {
    Rng rng(Rng::derive(seed, 0xc07));
    const int bases = std::min(3, std::max(1, samples / 500));
    double worst = 0.0;
    std::ostringstream os;
    os << "max meridian deviation over base r = {";
    for (int i = 0; i < bases; ++i) {
      double r = 0.0;
      do {
        r = model.sample_radius(rng);
      } while (std::min(r, L - r) < 0.05 * L);
      const SurfacePoint x{r, rng.uniform(0.0, two_pi), true};
      const auto cl = cut_locus(model, x, 16, DistanceOptions::fast(1e-9));
      if (!cl.single_point) worst = std::max(worst, cl.max_theta_deviation);
      os << (i ? ", " : "") << r << (cl.single_point ? " (point)" : "");
    }
    os << "}";
    CheckRecord c;
    c.name = "cut-locus-confinement";
    c.value = worst;
    c.tol = 1e-3;
    c.pass = worst <= c.tol;
    c.witness = os.str();
    rep.checks.push_back(std::move(c));
  }

  {
    Rng rng(Rng::derive(seed, 0x50e));
    const int count = std::min(samples, 1000);
    double worst = 0.0, worst_r = 0.0;
    for (int i = 0; i < count; ++i) {
      const SurfacePoint x = model.sample_point(rng);
      const double to_p = distance(model, SurfacePoint{0.0, 0.0, false}, x,
                                   inner)
                              .distance;
      const double to_q =
          distance(model, x, SurfacePoint{L, 0.0, false}, inner).distance;
      const double defect = std::abs(to_p + to_q - pi);
      if (defect > worst) {
        worst = defect;
        worst_r = x.r;
      }
    }
    CheckRecord c;
    c.name = "pole-distance-sum";
    c.value = worst;
    c.tol = 1e-7;
    c.pass = worst <= c.tol;
    std::ostringstream os;
    os << "max |d(p,x) + d(x,q) - pi|, worst at r=" << worst_r;
    c.witness = os.str();
    rep.checks.push_back(std::move(c));
  }

  {
    const auto st = make_geodesic_state(model, 0.0, 0.0, 0.0);
    const auto conj = first_conjugate_time(model, st, 1.25 * L, {});
    CheckRecord c;
    c.name = "meridian-conjugate-time";
    c.value = conj.time ? std::abs(*conj.time - pi)
                        : std::numeric_limits<double>::infinity();
    c.tol = 1e-8;
    c.pass = c.value <= c.tol;
    std::ostringstream os;
    if (conj.time)
      os << "|first conjugate time - pi| along a meridian, t=" << *conj.time;
    else
      os << "no conjugate point found before t=" << 1.25 * L;
    c.witness = os.str();
    rep.checks.push_back(std::move(c));
  }

  return rep;
}

struct RigidityReport {
  int pairs = 0;
  double max_defect = 0.0;
  double tol = 1e-5;
  bool pass = false;
  std::uint64_t seed = 0;
};

// Realizes the candidate isometry of the equality case: radii fixed, every
// direction pushed through one random orthogonal map (poles go to poles).
// Distances must be preserved pair by pair.
inline RigidityReport rigidity_isometry_check(
    const SurfaceModel& model, int n, int pairs, std::uint64_t seed,
    const DistanceOptions& opts = DistanceOptions::fast(1e-9),
    double tol = 1e-5) {
  if (n < 2) throw validation_error("rigidity_isometry_check: dimension < 2");
  RigidityReport rep;
  rep.pairs = pairs;
  rep.seed = seed;
  rep.tol = tol;
  Rng rng(Rng::derive(seed, 0x150));
  const auto I = random_orthogonal(n, rng);
  auto mapped = [&](const NModelPoint& P) {
    if (!P.direction_defined) return P;
    NModelPoint Q;
    Q.r = P.r;
    Q.direction = apply_linear(I, P.direction);
    Q.direction_defined = true;
    return Q;
  };
  const double L = model.two_a();
  for (int k = 0; k < pairs; ++k) {
    NModelPoint X, Y;
    if (k == 0) {
      // The far pole is the unique farthest point; the isometry must fix
      // the pole pair.
      X = nmodel_pole(0.0);
      Y = nmodel_pole(L);
    } else if (k == 1) {
      X = nmodel_pole(L);
      Y = nmodel_sample_point(model, n, rng);
    } else {
      X = nmodel_sample_point(model, n, rng);
      Y = nmodel_sample_point(model, n, rng);
    }
    const double base = nmodel_distance(model, n, X, Y, opts).distance;
    const double moved =
        nmodel_distance(model, n, mapped(X), mapped(Y), opts).distance;
    rep.max_defect = std::max(rep.max_defect, std::abs(moved - base));
  }
  rep.pass = rep.max_defect <= tol;
  return rep;
}

}  // namespace revsphere
