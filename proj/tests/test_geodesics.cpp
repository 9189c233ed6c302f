#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "oracle_helpers.hpp"
#include "revsphere/geodesic.hpp"
#include "revsphere/ode.hpp"
#include "revsphere/profile.hpp"
#include "revsphere/rng.hpp"

using namespace revsphere;

namespace {

// Great-circle endpoint on the unit sphere via the 3D embedding; fully
// independent of the library's coordinate ODE.
struct SphereRay {
  double r, theta, phi;
  int sign;
};
std::array<double, 3> sphere_endpoint(const SphereRay& ray, double t) {
  const double sr = std::sin(ray.r), cr = std::cos(ray.r);
  const double st = std::sin(ray.theta), ct = std::cos(ray.theta);
  const std::array<double, 3> p{sr * ct, sr * st, cr};
  const std::array<double, 3> er{cr * ct, cr * st, -sr};
  const std::array<double, 3> et{-st, ct, 0.0};
  const double cp = std::cos(ray.phi), sp = std::sin(ray.phi) * ray.sign;
  std::array<double, 3> v{cp * er[0] + sp * et[0], cp * er[1] + sp * et[1],
                          cp * er[2] + sp * et[2]};
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = std::cos(t) * p[i] + std::sin(t) * v[i];
  return out;
}

}  // namespace

TEST_CASE("geodesics on the unit sphere are great circles", "[geodesics]") {
  auto mod = make_sphere_profile(1.0);
  const SphereRay rays[] = {
      {1.1, 0.3, 0.7, +1}, {2.0, -1.0, 1.2, -1}, {0.4, 2.2, 1.5, +1},
      {1.57, 0.0, 0.05, +1},
  };
  for (const auto& ray : rays) {
    auto st = make_geodesic_state(mod, ray.r, ray.theta, ray.phi, ray.sign);
    for (double t : {0.7, 1.9, 2.9}) {
      auto path = integrate_geodesic(mod, st, t);
      const auto q = sphere_endpoint(ray, t);
      const double r_exp = std::acos(std::min(1.0, std::max(-1.0, q[2])));
      const double th_exp = std::atan2(q[1], q[0]);
      CHECK(path.final_state.point.r == Catch::Approx(r_exp).margin(1e-9));
      CHECK(wrap_angle(path.final_state.point.theta - th_exp) ==
            Catch::Approx(0.0).margin(1e-9));
    }
  }
}

TEST_CASE("clairaut constant is conserved", "[geodesics]") {
  for (auto mod : {make_ellipsoid_profile(1.0, 2.0), make_exotic_profile()}) {
    Rng rng(11);
    for (int i = 0; i < 12; ++i) {
      const double r0 = rng.uniform(0.1, 0.9) * mod.two_a();
      const double phi = rng.uniform(0.05, pi - 0.05);
      auto st = make_geodesic_state(mod, r0, rng.uniform(0.0, two_pi), phi,
                                    rng.uniform() < 0.5 ? 1 : -1);
      auto path = integrate_geodesic(mod, st, 2.0 * mod.two_a());
      // Drift bounded by 100x the integrator tolerance.
      CHECK(clairaut_drift(mod, path) < 100.0 * 1e-10);
      // m(r) >= |nu| along the ray: turning points only touch the bound.
      double worst = 0.0;
      for (const auto& s : path.samples)
        worst = std::min(worst, mod.m(s.r) - std::abs(st.nu));
      CHECK(worst > -1e-10);
    }
  }
}

TEST_CASE("second-order form agrees with the reduced system", "[geodesics]") {
  // Oracle: geodesic equations for (r, theta, r', theta') without the
  // unit-speed reduction, integrated by fixed-step RK4.
  auto mod = make_ellipsoid_profile(1.0, 2.0);
  auto st = make_geodesic_state(mod, 0.35 * mod.two_a(), 0.4, 1.1);
  const double T = 1.5 * mod.two_a();

  auto rhs = [&](double, const OdeState<4>& y, OdeState<4>& dy) {
    double m, m1;
    mod.eval(y[0], &m, &m1, nullptr);
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = m * m1 * y[3] * y[3];
    dy[3] = -2.0 * (m1 / m) * y[2] * y[3];
  };
  const double m0 = mod.m(st.point.r);
  OdeState<4> y{st.point.r, st.point.theta, std::cos(st.phi),
                std::sin(st.phi) / m0};
  double speed_drift = 0.0;
  const auto yT = rk4_integrate(rhs, 0.0, y, T, 40000,
                                [&](double, const OdeState<4>& s) {
                                  const double mm = mod.m(s[0]);
                                  const double sp = std::sqrt(
                                      s[2] * s[2] + mm * mm * s[3] * s[3]);
                                  speed_drift =
                                      std::max(speed_drift, std::abs(sp - 1.0));
                                  return true;
                                });
  CHECK(speed_drift < 1e-10);

  auto path = integrate_geodesic(mod, st, T);
  CHECK(path.final_state.point.r == Catch::Approx(yT[0]).margin(1e-7));
  CHECK(wrap_angle(path.final_state.point.theta - yT[1]) ==
        Catch::Approx(0.0).margin(1e-7));
}

TEST_CASE("reversed rays return to the start", "[geodesics]") {
  for (auto mod : {make_ellipsoid_profile(1.0, 2.0), make_exotic_profile()}) {
    Rng rng(5);
    for (int i = 0; i < 8; ++i) {
      const double r0 = rng.uniform(0.15, 0.85) * mod.two_a();
      const double th0 = rng.uniform(0.0, two_pi);
      auto st = make_geodesic_state(mod, r0, th0, rng.uniform(0.2, pi - 0.2));
      const double T = rng.uniform(0.5, 1.8) * mod.two_a();
      auto fwd = integrate_geodesic(mod, st, T);
      auto back_state = make_geodesic_state(
          mod, fwd.final_state.point.r, fwd.final_state.point.theta,
          pi - fwd.final_state.phi, fwd.final_state.nu >= 0.0 ? -1 : +1);
      auto back = integrate_geodesic(mod, back_state, T);
      CHECK(back.final_state.point.r == Catch::Approx(r0).margin(1e-7));
      CHECK(wrap_angle(back.final_state.point.theta - th0) ==
            Catch::Approx(0.0).margin(1e-7));
    }
  }
}

TEST_CASE("meridians fold across the poles", "[geodesics]") {
  auto mod = make_ellipsoid_profile(1.0, 2.0);
  const double L = mod.two_a();
  auto st = make_geodesic_state(mod, 0.3 * L, 1.0, 0.0);
  auto path = integrate_geodesic(mod, st, 0.9 * L);
  // Up through the far pole: r = 2a - (t - (2a - r0)) afterwards.
  REQUIRE(path.pole_crossings.size() == 1);
  CHECK(path.pole_crossings[0] == Catch::Approx(0.7 * L).epsilon(1e-12));
  CHECK(path.final_state.point.r == Catch::Approx(L - 0.2 * L).epsilon(1e-12));
  CHECK(wrap_angle(path.final_state.point.theta - (1.0 + pi)) ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(path.final_state.phi == Catch::Approx(pi).margin(0.0));

  // Sample spacing respects max_step.
  for (std::size_t i = 1; i < path.samples.size(); ++i)
    CHECK(path.samples[i].t - path.samples[i - 1].t <=
          path.max_step * (1.0 + 1e-12));

  auto loop = meridian(mod, 0.5, 2.0 * L);
  CHECK(loop.final_state.point.r == Catch::Approx(0.0).margin(1e-12));
  CHECK(loop.pole_crossings.size() == 2);

  auto half = meridian(mod, 0.5, L);
  CHECK(half.final_state.point.r == Catch::Approx(L).margin(1e-12));
  CHECK_FALSE(half.final_state.point.theta_defined);
}

TEST_CASE("jacobi field along a pole meridian equals m", "[geodesics]") {
  for (auto mod : {make_ellipsoid_profile(1.0, 2.0), make_exotic_profile()}) {
    const double L = mod.two_a();
    // y'' + G(t) y = 0 from the pole: solution is m(t) itself.
    auto rhs = [&](double t, const OdeState<2>& y, OdeState<2>& dy) {
      dy[0] = y[1];
      dy[1] = -mod.curvature(t) * y[0];
    };
    OdeOptions oo;
    oo.rtol = 1e-12;
    oo.atol = 1e-14;
    double rel_err = 0.0;
    OdeState<2> y{0.0, 1.0};
    double t_prev = 0.0;
    for (int k = 1; k <= 9; ++k) {
      const double t = 0.1 * k * L;
      y = integrate_to(rhs, t_prev, y, t, oo);
      t_prev = t;
      rel_err = std::max(rel_err, std::abs(y[0] - mod.m(t)) / mod.m(t));
    }
    CHECK(rel_err < 1e-8);
  }
}

TEST_CASE("meridian conjugate time is the pole distance", "[geodesics]") {
  for (auto mod : {make_sphere_profile(1.0), make_ellipsoid_profile(1.0, 2.0),
                   make_exotic_profile()}) {
    auto res = first_conjugate_time(mod, meridian(mod, 0.0, 1.0).initial,
                                    1.3 * mod.two_a());
    REQUIRE(res.time.has_value());
    CHECK_FALSE(res.at_endpoint);
    CHECK(*res.time == Catch::Approx(mod.two_a()).margin(1e-8));
  }
}

TEST_CASE("sphere conjugate points sit at distance pi", "[geodesics]") {
  auto mod = make_sphere_profile(1.0);
  auto st = make_geodesic_state(mod, 1.2, 0.0, 0.8);
  auto res = first_conjugate_time(mod, st, 2.0 * pi);
  REQUIRE(res.time.has_value());
  CHECK(*res.time == Catch::Approx(pi).margin(1e-7));

  // Search ending exactly at the conjugate time reports the endpoint flag.
  auto res_end = first_conjugate_time(mod, st, pi);
  REQUIRE(res_end.time.has_value());
  CHECK(res_end.at_endpoint);

  // Exotic waist has G = -1 < 0; no conjugate point within a short ray.
  auto exo = make_exotic_profile();
  auto st2 = make_geodesic_state(exo, exo.equator(), 0.0, 0.5 * pi);
  auto res2 = first_conjugate_time(exo, st2, 0.5 * exo.two_a());
  CHECK_FALSE(res2.at_endpoint);
}
