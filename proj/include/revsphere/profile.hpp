#pragma once

// Surface models of revolution on [0, 2a]: metric dr^2 + m(r)^2 dtheta^2
// with poles at r = 0 and r = 2a. A model supplies the warping profile m,
// its first two derivatives, the radial curvature G = -m''/m, and enough
// precomputed structure (critical radii of m, area table) for the geodesic
// and distance layers. Profiles are reflection symmetric: m(2a - r) = m(r).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "revsphere/errors.hpp"
#include "revsphere/interp.hpp"
#include "revsphere/quadrature.hpp"
#include "revsphere/rng.hpp"
#include "revsphere/roots.hpp"

namespace revsphere {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Wrap to (-pi, pi].
inline double wrap_angle(double x) {
  double w = std::remainder(x, two_pi);
  if (w <= -pi) w += two_pi;
  return w;
}

enum class ProfileKind { sphere, ellipsoid, exotic, table };

inline const char* profile_kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::sphere: return "sphere";
    case ProfileKind::ellipsoid: return "ellipsoid";
    case ProfileKind::exotic: return "exotic";
    case ProfileKind::table: return "table";
  }
  return "?";
}

struct SurfacePoint {
  double r = 0.0;
  double theta = 0.0;
  bool theta_defined = true;  // false at poles, where theta is meaningless
};

namespace profile_detail {

class Impl {
 public:
  virtual ~Impl() = default;
  virtual double domain_end() const = 0;
  virtual void eval(double r, double* m, double* m1, double* m2) const = 0;
  virtual ProfileKind kind() const = 0;
};

class SphereImpl final : public Impl {
 public:
  explicit SphereImpl(double curvature) : h_(curvature), sh_(std::sqrt(curvature)) {
    if (!(curvature > 0.0))
      throw std::invalid_argument("sphere profile: curvature must be > 0");
  }
  double domain_end() const override { return pi / sh_; }
  void eval(double r, double* m, double* m1, double* m2) const override {
    const double s = std::sin(sh_ * r), c = std::cos(sh_ * r);
    if (m) *m = s / sh_;
    if (m1) *m1 = c;
    if (m2) *m2 = -sh_ * s;
  }
  ProfileKind kind() const override { return ProfileKind::sphere; }
  double curvature() const { return h_; }

 private:
  double h_, sh_;
};

// One-parameter family m(t) = (sqrt(3)/10) (9 sin(t sqrt(3)/9) + 7 sin(t sqrt(3)/3))
// on [0, 3 sqrt(3) pi]. Radial curvature decreases from 11/45 at the poles
// to -1 on the equator; the profile has a hump on each side of a narrow
// waist, so it is deliberately not unimodal.
class ExoticImpl final : public Impl {
 public:
  double domain_end() const override { return 3.0 * std::sqrt(3.0) * pi; }
  void eval(double r, double* m, double* m1, double* m2) const override {
    const double s3 = std::sqrt(3.0);
    const double u9 = s3 * r / 9.0, u3 = s3 * r / 3.0;
    const double k = s3 / 10.0;
    if (m) *m = k * (9.0 * std::sin(u9) + 7.0 * std::sin(u3));
    if (m1) *m1 = 0.3 * (std::cos(u9) + (7.0 / 3.0) * std::cos(u3));
    if (m2) *m2 = -k * ((std::sin(u9) + 7.0 * std::sin(u3)) / 3.0);
  }
  ProfileKind kind() const override { return ProfileKind::exotic; }
};

// Prolate/oblate spheroid with equatorial radius a_eq and polar semi-axis
// b_polar, parametrized by arc length. The latitude u(r) is recovered from
// a dense Hermite table of r(u) (derivative dr/du = w(u) known exactly),
// refined by Newton; m and its derivatives then evaluate in closed form in u.
class EllipsoidImpl final : public Impl {
 public:
  EllipsoidImpl(double a_eq, double b_polar, int grid) : a_(a_eq), b_(b_polar) {
    if (!(a_eq > 0.0) || !(b_polar > 0.0))
      throw std::invalid_argument("ellipsoid profile: semi-axes must be > 0");
    if (grid < 16) throw std::invalid_argument("ellipsoid profile: grid too small");
    const int n = grid;
    u_.resize(n + 1);
    r_.resize(n + 1);
    w_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      u_[i] = pi * static_cast<double>(i) / n;
      w_[i] = w(u_[i]);
    }
    r_[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      double seg, err;
      quad_detail::gk15([this](double u) { return w(u); }, u_[i], u_[i + 1], seg,
                        err);
      r_[i + 1] = r_[i] + seg;
    }
    len_ = r_[n];
    // Uniform-r index for inversion starting guesses.
    lookup_.resize(n + 1);
    int j = 0;
    for (int i = 0; i <= n; ++i) {
      const double target = len_ * static_cast<double>(i) / n;
      while (j + 1 < n && r_[j + 1] < target) ++j;
      lookup_[i] = j;
    }
  }

  double domain_end() const override { return len_; }

  void eval(double r, double* m, double* m1, double* m2) const override {
    const double u = invert(r);
    const double s = std::sin(u), c = std::cos(u);
    const double ww = w(u);
    if (m) *m = a_ * s;
    if (m1) *m1 = a_ * c / ww;
    if (m2) {
      const double dw = (b_ * b_ - a_ * a_) * s * c / ww;
      *m2 = (-a_ * s / ww - a_ * c * dw / (ww * ww)) / ww;
    }
  }

  ProfileKind kind() const override { return ProfileKind::ellipsoid; }
  double a_eq() const { return a_; }
  double b_polar() const { return b_; }
  int grid() const { return static_cast<int>(u_.size()) - 1; }

  // Latitude from arc length; Hermite guess plus Newton on the table.
  double invert(double r) const {
    const int n = static_cast<int>(u_.size()) - 1;
    if (r <= 0.0) return 0.0;
    if (r >= len_) return pi;
    int i = lookup_[static_cast<int>(r / len_ * n)];
    while (i + 1 < n && r_[i + 1] < r) ++i;
    while (i > 0 && r_[i] > r) --i;
    // Hermite interpolation of u over [r_i, r_{i+1}] with du/dr = 1/w.
    const double h = r_[i + 1] - r_[i];
    const double t = (r - r_[i]) / h;
    const double d0 = 1.0 / w_[i], d1 = 1.0 / w_[i + 1];
    const double du = u_[i + 1] - u_[i];
    const double c2 = 3.0 * du - h * (2.0 * d0 + d1);
    const double c3 = -2.0 * du + h * (d0 + d1);
    double u = u_[i] + t * (h * d0 + t * (c2 + t * c3));
    for (int it = 0; it < 2; ++it) u -= (rf(i, u) - r) / w(u);
    return u < 0.0 ? 0.0 : (u > pi ? pi : u);
  }

 private:
  double w(double u) const {
    const double s = std::sin(u), c = std::cos(u);
    return std::sqrt(a_ * a_ * c * c + b_ * b_ * s * s);
  }

  // Forward arc length via the Hermite table in u (derivative = w).
  double rf(int i, double u) const {
    const int n = static_cast<int>(u_.size()) - 1;
    while (i + 1 < n && u_[i + 1] < u) ++i;
    while (i > 0 && u_[i] > u) --i;
    const double h = u_[i + 1] - u_[i];
    const double t = (u - u_[i]) / h;
    const double dr = r_[i + 1] - r_[i];
    const double c2 = 3.0 * dr - h * (2.0 * w_[i] + w_[i + 1]);
    const double c3 = -2.0 * dr + h * (w_[i] + w_[i + 1]);
    return r_[i] + t * (h * w_[i] + t * (c2 + t * c3));
  }

  double a_, b_, len_ = 0.0;
  std::vector<double> u_, r_, w_;
  std::vector<int> lookup_;
};

class TableImpl final : public Impl {
 public:
  explicit TableImpl(std::vector<std::array<double, 2>> samples) {
    if (samples.size() < 8)
      throw validation_error("table profile: need at least 8 samples");
    std::vector<double> x, y;
    x.reserve(samples.size());
    y.reserve(samples.size());
    for (const auto& s : samples) {
      x.push_back(s[0]);
      y.push_back(s[1]);
    }
    table_ = HermiteTable(x, y, pchip_derivatives(x, y));
    if (std::abs(x.front()) > 1e-12 * x.back())
      throw validation_error("table profile: first sample must be at r = 0");
  }
  double domain_end() const override { return table_.back(); }
  void eval(double r, double* m, double* m1, double* m2) const override {
    if (m) *m = table_.eval(r);
    if (m1) *m1 = table_.deriv(r);
    if (m2) *m2 = table_.second(r);
  }
  ProfileKind kind() const override { return ProfileKind::table; }

 private:
  HermiteTable table_;
};

// Metric scaling by lambda: m_hat(r) = lambda * m(r / lambda).
class ScaledImpl final : public Impl {
 public:
  ScaledImpl(std::shared_ptr<const Impl> base, double lambda)
      : base_(std::move(base)), lam_(lambda) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("rescale: factor must be > 0");
  }
  double domain_end() const override { return lam_ * base_->domain_end(); }
  void eval(double r, double* m, double* m1, double* m2) const override {
    double bm, bm1, bm2;
    base_->eval(r / lam_, m ? &bm : nullptr, m1 ? &bm1 : nullptr,
                m2 ? &bm2 : nullptr);
    if (m) *m = lam_ * bm;
    if (m1) *m1 = bm1;
    if (m2) *m2 = bm2 / lam_;
  }
  ProfileKind kind() const override { return base_->kind(); }
  const std::shared_ptr<const Impl>& base() const { return base_; }
  double lambda() const { return lam_; }

 private:
  std::shared_ptr<const Impl> base_;
  double lam_;
};

}  // namespace profile_detail

// Profile evaluator handle: domain end 2a, m and two derivatives, kind tag.
class ProfileCurve {
 public:
  ProfileCurve() = default;
  explicit ProfileCurve(std::shared_ptr<const profile_detail::Impl> impl)
      : impl_(std::move(impl)) {}

  double domain_end() const { return impl_->domain_end(); }
  ProfileKind kind() const { return impl_->kind(); }

  double m(double r) const {
    double v;
    impl_->eval(r, &v, nullptr, nullptr);
    return v;
  }
  double m1(double r) const {
    double v;
    impl_->eval(r, nullptr, &v, nullptr);
    return v;
  }
  double m2(double r) const {
    double v;
    impl_->eval(r, nullptr, nullptr, &v);
    return v;
  }
  void eval(double r, double* m, double* m1, double* m2) const {
    impl_->eval(r, m, m1, m2);
  }

  const std::shared_ptr<const profile_detail::Impl>& impl() const { return impl_; }

 private:
  std::shared_ptr<const profile_detail::Impl> impl_;
};

// A full model: profile plus cached analysis. Immutable once built.
class SurfaceModel {
 public:
  SurfaceModel() = default;
  SurfaceModel(ProfileCurve profile, std::string name, double rescale_factor = 1.0)
      : profile_(std::move(profile)),
        name_(std::move(name)),
        rescale_(rescale_factor) {
    finalize();
  }

  const std::string& name() const { return name_; }
  ProfileKind kind() const { return profile_.kind(); }
  const ProfileCurve& profile() const { return profile_; }
  double rescale_factor() const { return rescale_; }

  double two_a() const { return two_a_; }
  double equator() const { return 0.5 * two_a_; }

  double m(double r) const { return profile_.m(check(r)); }
  double m1(double r) const { return profile_.m1(check(r)); }
  double m2(double r) const { return profile_.m2(check(r)); }
  void eval(double r, double* m, double* m1, double* m2) const {
    profile_.eval(check(r), m, m1, m2);
  }

  // Radial curvature G(r) = -m''(r)/m(r); near the poles the ratio is
  // replaced by a quadratic-in-r blend into the one-sided limit.
  double curvature(double r) const {
    const double rr = check(r);
    const double s = std::min(rr, two_a_ - rr);
    if (s < pole_band_) {
      const double q = s / pole_band_;
      return pole_G_ + (band_G_ - pole_G_) * q * q;
    }
    double m, m2v;
    profile_.eval(rr, &m, nullptr, &m2v);
    return -m2v / m;
  }

  double pole_curvature() const { return pole_G_; }
  double max_m() const { return m_max_; }
  double total_area() const { return area_; }

  bool curvature_monotone() const { return monotone_G_; }
  bool curvature_constant() const { return constant_G_; }

  // Critical radii of m in (0, 2a), equator included, sorted.
  const std::vector<double>& critical_radii() const { return crit_; }

  bool is_pole(double r) const {
    return r <= pole_eps_ || r >= two_a_ - pole_eps_;
  }
  bool is_pole(const SurfacePoint& p) const { return is_pole(p.r); }

  // Connected component of {m >= nu} containing r0 (nu > 0, m(r0) >= nu).
  struct Band {
    double lo, hi;
  };
  Band band(double r0, double nu) const {
    Band b;
    b.lo = edge_root(r0, nu, -1);
    b.hi = edge_root(r0, nu, +1);
    return b;
  }

  // Exact minimum of m over [r1, r2] (monotone between cached knots).
  double min_m_between(double r1, double r2) const {
    if (r1 > r2) std::swap(r1, r2);
    double mn = std::min(m(r1), m(r2));
    for (double c : crit_)
      if (c > r1 && c < r2) mn = std::min(mn, m(c));
    return mn;
  }

  double sample_radius(Rng& rng) const {
    const double target = rng.uniform() * area_cdf_.back();
    auto it = std::upper_bound(area_cdf_.begin(), area_cdf_.end(), target);
    std::size_t i = it == area_cdf_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - area_cdf_.begin()) - 1;
    if (i >= area_cdf_.size() - 1) i = area_cdf_.size() - 2;
    const double frac = (target - area_cdf_[i]) /
                        std::max(area_cdf_[i + 1] - area_cdf_[i], 1e-300);
    const double h = two_a_ / static_cast<double>(area_cdf_.size() - 1);
    return h * (static_cast<double>(i) + frac);
  }

  // Area-weighted random point (theta uniform).
  SurfacePoint sample_point(Rng& rng) const {
    SurfacePoint p;
    p.r = sample_radius(rng);
    p.theta = rng.uniform(0.0, two_pi);
    return p;
  }

 private:
  double check(double r) const {
    if (!(r >= -1e-12 * two_a_) || !(r <= two_a_ * (1.0 + 1e-12)))
      throw std::invalid_argument("SurfaceModel: r outside [0, 2a]");
    return r < 0.0 ? 0.0 : (r > two_a_ ? two_a_ : r);
  }

  // Root of m = nu walking from r0 in direction dir; monotone segments
  // between knots make bracketing exact.
  double edge_root(double r0, double nu, int dir) const {
    std::vector<double> knots;
    knots.push_back(0.0);
    knots.insert(knots.end(), crit_.begin(), crit_.end());
    knots.push_back(two_a_);
    if (dir > 0) {
      double lo = r0;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (knots[i] <= r0) continue;
        const double hi = knots[i];
        if (m(hi) < nu)
          return brent([&](double r) { return m(r) - nu; }, lo, hi,
                       1e-14 * two_a_);
        lo = hi;
      }
      return two_a_;
    }
    double hi = r0;
    for (std::size_t i = knots.size(); i-- > 0;) {
      if (knots[i] >= r0) continue;
      const double lo = knots[i];
      if (m(lo) < nu)
        return brent([&](double r) { return m(r) - nu; }, lo, hi, 1e-14 * two_a_);
      hi = lo;
    }
    return 0.0;
  }

  void finalize() {
    two_a_ = profile_.domain_end();
    if (!(two_a_ > 0.0) || !std::isfinite(two_a_))
      throw validation_error("SurfaceModel: bad domain length");
    pole_eps_ = 1e-12 * two_a_;
    pole_band_ = 1e-5 * two_a_;

    // Critical radii of m on (0, a], mirrored to (a, 2a).
    const double a = 0.5 * two_a_;
    const int n = 4096;
    const double lo = 1e-6 * two_a_;
    double prev_r = lo, prev_d = profile_.m1(prev_r);
    std::vector<double> half;
    for (int i = 1; i <= n; ++i) {
      const double r = lo + (a - lo) * static_cast<double>(i) / n;
      const double d = profile_.m1(r);
      if ((prev_d > 0.0) != (d > 0.0) && prev_d != 0.0)
        half.push_back(
            brent([this](double x) { return profile_.m1(x); }, prev_r, r,
                  1e-14 * two_a_));
      prev_r = r;
      prev_d = d;
    }
    crit_.clear();
    for (double c : half)
      if (c < a * (1.0 - 1e-9)) crit_.push_back(c);
    std::vector<double> mirrored;
    for (auto it = crit_.rbegin(); it != crit_.rend(); ++it)
      mirrored.push_back(two_a_ - *it);
    crit_.push_back(a);
    crit_.insert(crit_.end(), mirrored.begin(), mirrored.end());

    m_max_ = 0.0;
    for (double c : crit_) m_max_ = std::max(m_max_, profile_.m(c));

    // Pole curvature: one-sided differences on G(h) = -m''(h)/m(h),
    // Richardson-extrapolated; the two poles are averaged.
    auto g_near = [this](double r) {
      double m, m2v;
      profile_.eval(r, &m, nullptr, &m2v);
      return -m2v / m;
    };
    const double h = 1e-3 * two_a_;
    const double g0 =
        (4.0 * g_near(0.5 * h) - g_near(h)) / 3.0;
    const double g1 =
        (4.0 * g_near(two_a_ - 0.5 * h) - g_near(two_a_ - h)) / 3.0;
    pole_G_ = 0.5 * (g0 + g1);
    band_G_ = g_near(pole_band_);

    // Monotonicity of G on (0, a] from delta = 1e-3 * 2a.
    const double delta = 1e-3 * two_a_;
    const int gm = 2048;
    double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
    bool decreasing = true;
    double gprev = 0.0;
    for (int i = 0; i <= gm; ++i) {
      const double r = delta + (a - delta) * static_cast<double>(i) / gm;
      const double g = g_near(r);
      gmin = std::min(gmin, g);
      gmax = std::max(gmax, g);
      if (i > 0 && g > gprev + 1e-10 * (1.0 + std::abs(gprev))) decreasing = false;
      gprev = g;
    }
    const double gscale = std::max({1.0, std::abs(gmin), std::abs(gmax)});
    constant_G_ = (gmax - gmin) <= 1e-8 * gscale;
    monotone_G_ = decreasing && !constant_G_;

    // Area table: cumulative trapezoid of m(r) on a uniform grid.
    const int an = 4096;
    area_cdf_.assign(an + 1, 0.0);
    double mp = profile_.m(0.0);
    for (int i = 1; i <= an; ++i) {
      const double r = two_a_ * static_cast<double>(i) / an;
      const double mc = profile_.m(r);
      area_cdf_[i] = area_cdf_[i - 1] + 0.5 * (mp + mc) * (two_a_ / an);
      mp = mc;
    }
    area_ = two_pi * area_cdf_.back();
  }

  ProfileCurve profile_;
  std::string name_;
  double rescale_ = 1.0;
  double two_a_ = 0.0;
  double pole_eps_ = 0.0, pole_band_ = 0.0;
  double pole_G_ = 0.0, band_G_ = 0.0;
  double m_max_ = 0.0, area_ = 0.0;
  bool monotone_G_ = false, constant_G_ = false;
  std::vector<double> crit_;
  std::vector<double> area_cdf_;
};

inline SurfaceModel make_sphere_profile(double curvature) {
  return SurfaceModel(
      ProfileCurve(std::make_shared<profile_detail::SphereImpl>(curvature)),
      "sphere");
}

inline SurfaceModel make_ellipsoid_profile(double a_eq, double b_polar,
                                           int grid = 4096) {
  return SurfaceModel(ProfileCurve(std::make_shared<profile_detail::EllipsoidImpl>(
                          a_eq, b_polar, grid)),
                      "ellipsoid");
}

inline SurfaceModel make_exotic_profile() {
  return SurfaceModel(ProfileCurve(std::make_shared<profile_detail::ExoticImpl>()),
                      "exotic");
}

inline SurfaceModel make_table_profile(std::vector<std::array<double, 2>> samples,
                                       std::string name = "table") {
  return SurfaceModel(ProfileCurve(std::make_shared<profile_detail::TableImpl>(
                          std::move(samples))),
                      std::move(name));
}

inline double gaussian_curvature(const SurfaceModel& model, double r) {
  return model.curvature(r);
}

// G as a plain callable, for comparison-space plumbing.
inline auto radial_curvature_function(const SurfaceModel& model) {
  return [model](double r) { return model.curvature(r); };
}

// Scale the metric by lambda; lengths multiply by lambda, curvature by
// 1/lambda^2. The cached analysis is rebuilt from scratch.
inline SurfaceModel rescale_model(const SurfaceModel& model, double lambda) {
  return SurfaceModel(
      ProfileCurve(std::make_shared<profile_detail::ScaledImpl>(
          model.profile().impl(), lambda)),
      model.name(), model.rescale_factor() * lambda);
}

// Normalize so the pole distance becomes pi.
inline SurfaceModel rescale_model(const SurfaceModel& model) {
  return rescale_model(model, pi / model.two_a());
}

struct CurvatureReport {
  std::string name;
  ProfileKind kind = ProfileKind::sphere;
  double domain_end = 0.0;
  double rescale_factor = 1.0;
  double pole_curvature = 0.0;
  double equator_curvature = 0.0;
  double min_curvature = 0.0, max_curvature = 0.0;
  double max_m = 0.0;
  double total_area = 0.0;
  double profile_symmetry_defect = 0.0;
  double curvature_symmetry_defect = 0.0;
  bool monotone_on_half = false;
  bool constant_curvature = false;
  std::vector<std::array<double, 2>> samples;  // (r, G)
};

// Structural checks (throws validation_error) plus a numeric summary.
// grid controls the symmetry sweep; report_samples the exported G samples.
inline CurvatureReport validate_model(const SurfaceModel& model, int grid = 10000,
                                      int report_samples = 128) {
  const double L = model.two_a();
  const double scale_m = std::max(1.0, model.max_m());

  if (std::abs(model.m(0.0)) > 1e-10 * scale_m ||
      std::abs(model.m(L)) > 1e-10 * scale_m)
    throw validation_error("validate_model: m must vanish at both poles");
  {
    // Unit-speed meridians force m'(0) = 1; table data may be slightly off.
    const double tol = model.kind() == ProfileKind::table ? 1e-3 : 1e-6;
    if (std::abs(model.m1(0.0) - 1.0) > tol ||
        std::abs(model.m1(L) + 1.0) > tol)
      throw validation_error("validate_model: |m'| must be 1 at the poles");
  }

  CurvatureReport rep;
  rep.name = model.name();
  rep.kind = model.kind();
  rep.domain_end = L;
  rep.rescale_factor = model.rescale_factor();
  rep.pole_curvature = model.pole_curvature();
  rep.equator_curvature = model.curvature(model.equator());
  rep.max_m = model.max_m();
  rep.total_area = model.total_area();
  rep.monotone_on_half = model.curvature_monotone();
  rep.constant_curvature = model.curvature_constant();

  double sym = 0.0, gsym = 0.0;
  double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
  for (int i = 1; i < grid; ++i) {
    const double r = L * static_cast<double>(i) / grid;
    const double mv = model.m(r);
    if (!(mv >= -1e-12 * scale_m) || !std::isfinite(mv))
      throw validation_error("validate_model: m must be positive inside (0, 2a)");
    sym = std::max(sym, std::abs(model.m(L - r) - mv));
    const double g = model.curvature(r);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    if (mv > 1e-3 * scale_m)
      gsym = std::max(gsym, std::abs(model.curvature(L - r) - g));
  }
  rep.profile_symmetry_defect = sym;
  rep.curvature_symmetry_defect = gsym;
  rep.min_curvature = gmin;
  rep.max_curvature = gmax;
  {
    const double tol = model.kind() == ProfileKind::table ? 1e-6 : 1e-8;
    if (sym > tol * scale_m)
      throw validation_error("validate_model: profile not reflection symmetric");
  }

  rep.samples.reserve(report_samples + 1);
  for (int i = 0; i <= report_samples; ++i) {
    const double r = L * static_cast<double>(i) / report_samples;
    rep.samples.push_back({r, model.curvature(r)});
  }
  return rep;
}

}  // namespace revsphere
