#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "revsphere/cut_locus.hpp"
#include "revsphere/profile.hpp"

using namespace revsphere;

TEST_CASE("sphere cut locus is the antipode", "[cutlocus]") {
  const auto mod = make_sphere_profile(1.0);
  const auto res = cut_locus(mod, {0.8, 0.3, true}, 16);
  REQUIRE(res.single_point);
  CHECK(res.point.r == Catch::Approx(pi - 0.8).margin(1e-5));
  CHECK(wrap_angle(res.point.theta - (0.3 + pi)) ==
        Catch::Approx(0.0).margin(1e-4));
  for (const auto& w : res.witnesses) {
    CHECK(w.t_cut == Catch::Approx(pi).margin(1e-6));
    CHECK(w.conjugate);
  }
}

TEST_CASE("prolate cut locus is a subarc of the opposite meridian",
          "[cutlocus]") {
  const auto mod = make_ellipsoid_profile(1.0, 2.0);
  const double L = mod.two_a();
  const auto res = cut_locus(mod, {0.3 * L, 0.0, true}, 16);
  CHECK(!res.single_point);
  CHECK(res.max_theta_deviation <= 1e-3);
  CHECK(res.r_lo < res.r_hi);
  // The arc straddles the antipode on the opposite meridian.
  CHECK(res.r_lo <= 0.7 * L + 1e-6);
  CHECK(res.r_hi >= 0.7 * L - 1e-6);
  CHECK(res.r_lo > 0.05 * L);
  CHECK(res.r_hi < 0.95 * L);
  CHECK(res.theta_opposite == Catch::Approx(pi).margin(1e-12));
  for (const auto& w : res.witnesses) {
    CHECK(w.t_cut > 0.0);
    CHECK(w.t_cut <= L * (1.0 + 1e-6));
  }
}

TEST_CASE("pole cut locus is the opposite pole", "[cutlocus]") {
  const auto mod = make_ellipsoid_profile(1.0, 2.0);
  const double L = mod.two_a();
  const auto res = cut_locus(mod, {0.0, 0.0, false}, 8);
  REQUIRE(res.single_point);
  CHECK(res.point.r == Catch::Approx(L).margin(1e-12));
  CHECK(!res.point.theta_defined);
}

TEST_CASE("non-monotone curvature is rejected", "[cutlocus]") {
  // A wiggly profile whose radial curvature oscillates on the half meridian.
  std::vector<std::array<double, 2>> samples;
  const int n = 800;
  for (int i = 0; i <= n; ++i) {
    const double r = pi * i / n;
    const double s2 = std::sin(2.0 * r);
    samples.push_back({r, std::sin(r) * (1.0 + 0.08 * s2 * s2)});
  }
  const auto mod = make_table_profile(samples, "wiggly");
  CHECK(!mod.curvature_monotone());
  CHECK_THROWS_AS(cut_locus(mod, {0.4 * pi, 0.0, true}, 8), unsupported_model);
}
