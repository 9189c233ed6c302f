#pragma once

// Minimal geodesic distance between surface points, solved by two
// independent routes.
//
// Quadrature route: for a connecting geodesic with Clairaut constant nu,
// theta and length accumulate along radial legs between turning points:
//   dtheta/dr = nu / (m sqrt(m^2 - nu^2)),  ds/dr = m / sqrt(m^2 - nu^2).
// Legs are integrated with the turning-point singularity substituted away
// (r = edge +- w^2 toward an edge, r = c + R sin xi across a full band
// oscillation), branches are enumerated by turning count, and the branch
// equation theta_B(nu) = span is solved per span in {delta, 2pi - delta}.
// The length of a root with residual angle miss eps is corrected to first
// order by dL = nu * eps, which is exact by the first variation formula.
//
// Shooting route: a phi-grid of rays from x is traced with a cheap
// fixed-step integrator, r = r_y crossings are bracketed in phi, and
// brackets are polished with the adaptive integrator.
//
// The profile need not be unimodal: {m >= nu} may split into several
// components (the waist-and-humps profile does this), so turning bands are
// computed per component and branch feasibility follows the band.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "revsphere/errors.hpp"
#include "revsphere/geodesic.hpp"
#include "revsphere/profile.hpp"
#include "revsphere/quadrature.hpp"
#include "revsphere/roots.hpp"

namespace revsphere {

struct DistanceOptions {
  double tol = 1e-9;       // tolerance on reported lengths
  double quad_tol = 1e-11; // leg integral tolerance (polish stage)
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
  int scan_grid = 512;     // shooting phi-grid
  int max_turns = 6;       // quadrature branch turning cap
  int max_minimizers = 8;
  bool use_quadrature = true;
  bool use_shooting = true;
  bool want_paths = true;

  static DistanceOptions defaults() { return {}; }
  // Quadrature-only settings for bulk queries (suites, bisection loops).
  static DistanceOptions fast(double tol = 1e-8) {
    DistanceOptions o;
    o.tol = tol;
    o.quad_tol = 1e-10;
    o.use_shooting = false;
    o.want_paths = false;
    return o;
  }
};

struct Minimizer {
  double length = 0.0;
  double phi = 0.0;        // departure angle at x
  int dir = +1;            // theta direction of travel
  double nu = 0.0;         // signed Clairaut constant (dir folded in)
  int turns = 0;           // radial turning points passed
  double theta_span = 0.0; // total |theta| accumulated
  char route = 'q';        // 'q' quadrature, 's' shooting, 'm' meridian
  double endpoint_error = 0.0;  // miss of the re-integrated endpoint
  std::optional<GeodesicPath> path;
};

struct DistanceResult {
  double distance = 0.0;
  double delta = 0.0;  // wrapped |theta_y - theta_x|
  std::vector<Minimizer> minimizers;
  int multiplicity = 0;
  bool saturated = false;        // continuum or more than the cap
  double route_agreement = -1.0; // max |L_q - L_s| over matched candidates
};

namespace dist_detail {

struct Candidate {
  double length = 0.0;
  double nu = 0.0;  // unsigned
  double phi = 0.0;
  bool down_first = false;
  int turns = 0;
  double span = 0.0;
  char route = 'q';
};

// Scalar integral with a tanh-sinh fallback when adaptive GK runs out of
// intervals (happens only for near-critical nu).
template <typename F>
double leg_integral(F&& f, double a, double b, double tol, int budget) {
  try {
    return integrate_gk(f, a, b, tol, 1e-12, budget);
  } catch (const solver_failure&) {
    return integrate_tanh_sinh(f, a, b, 10.0 * tol);
  }
}

// Per-pair quadrature context.
class QuadSolver {
 public:
  QuadSolver(const SurfaceModel& model, double r1, double r2)
      : mod_(model), r1_(r1), r2_(r2) {
    nu_cap_ = model.min_m_between(r1, r2);
  }

  struct LegVals {
    bool feasible = false;
    int regime = -1;       // band identity; brackets only join equal regimes
    double lo = 0, hi = 0; // band edges
    double A1 = 0, A2 = 0, H = 0;  // theta legs: edge->r1, edge->r2, full band
    double L1 = 0, L2 = 0, LH = 0; // length legs
  };

  double nu_cap() const { return nu_cap_; }

  // m^2 - nu^2 evaluated stably: near a band edge the difference is taken
  // from the edge Taylor expansion instead of the catastrophic subtraction.
  struct EdgeInfo {
    double r, m1, m2;
  };

  LegVals eval(double nu, double tol, int budget) const {
    LegVals v;
    if (!(nu > 0.0) || nu >= nu_cap_) return v;
    const auto band = mod_.band(std::min(r1_, r2_), nu);
    if (!(band.lo < std::min(r1_, r2_)) || !(band.hi > std::max(r1_, r2_))) {
      v.lo = band.lo;
      v.hi = band.hi;
      return v;  // endpoint exactly on an edge: degenerate, skip
    }
    return legs(band, nu, false, false, tol, budget);
  }

  // Limit values at nu = nu_cap when the cap is a tangency at an endpoint
  // radius: the tangent-side partial leg is empty (or the full band), the
  // others keep integrable inverse square root edges. Infeasible when the
  // cap sits at an interior critical height, where every span diverges.
  LegVals eval_cap(double tol, int budget) const {
    LegVals v;
    const double rmin = std::min(r1_, r2_), rmax = std::max(r1_, r2_);
    if (!(nu_cap_ > 0.0) || rmin == rmax) return v;
    const bool tan_lo = mod_.m(rmin) == nu_cap_;
    const bool tan_hi = mod_.m(rmax) == nu_cap_;
    if (!tan_lo && !tan_hi) return v;
    if ((tan_lo && std::abs(mod_.m1(rmin)) < 1e-10) ||
        (tan_hi && std::abs(mod_.m1(rmax)) < 1e-10))
      return v;
    auto band = mod_.band(rmin, nu_cap_);
    const double edge_eps = 1e-9 * mod_.two_a();
    if (tan_lo) {
      if (std::abs(band.lo - rmin) > edge_eps) return v;
      band.lo = rmin;
    } else if (!(band.lo < rmin)) {
      return v;
    }
    if (tan_hi) {
      if (std::abs(band.hi - rmax) > edge_eps) return v;
      band.hi = rmax;
    } else if (!(band.hi > rmax)) {
      return v;
    }
    return legs(band, nu_cap_, tan_lo, tan_hi, tol, budget);
  }

 private:
  LegVals legs(const SurfaceModel::Band& band, double nu, bool tan_lo,
               bool tan_hi, double tol, int budget) const {
    LegVals v;
    v.lo = band.lo;
    v.hi = band.hi;
    v.regime = regime_of(band);
    v.feasible = true;

    EdgeInfo elo{band.lo, mod_.m1(band.lo), mod_.m2(band.lo)};
    EdgeInfo ehi{band.hi, mod_.m1(band.hi), mod_.m2(band.hi)};
    const double width = band.hi - band.lo;

    // Full band oscillation, substituted r = c + R sin xi. Half-angle forms
    // keep the edge distances R (1 +- sin xi) exact down to the endpoints.
    const double c = 0.5 * (band.lo + band.hi), R = 0.5 * width;
    auto edge_dists = [&](double xi, double& d_lo, double& d_hi) {
      const double u = 0.25 * pi - 0.5 * xi;
      const double su = std::sin(u), cu = std::cos(u);
      d_lo = width * cu * cu;
      d_hi = width * su * su;
    };
    auto fphiH = [&](double xi) {
      double d_lo, d_hi;
      edge_dists(xi, d_lo, d_hi);
      return R * std::cos(xi) *
             kernel_phi(c + R * std::sin(xi), nu, elo, ehi, width, d_lo, d_hi);
    };
    auto flenH = [&](double xi) {
      double d_lo, d_hi;
      edge_dists(xi, d_lo, d_hi);
      return R * std::cos(xi) *
             kernel_len(c + R * std::sin(xi), nu, elo, ehi, width, d_lo, d_hi);
    };
    v.H = leg_integral(fphiH, -0.5 * pi, 0.5 * pi, tol, budget);
    v.LH = leg_integral(flenH, -0.5 * pi, 0.5 * pi, tol, budget);

    // Partial legs from the lower edge, substituted r = lo + w^2. Edge
    // distances are carried in the substituted variable; recovering them
    // from r by subtraction cancels catastrophically near the edges.
    auto partial = [&](double rpt, double& phi_out, double& len_out) {
      if (tan_lo && rpt == band.lo) {
        phi_out = 0.0;
        len_out = 0.0;
        return;
      }
      if (tan_hi && rpt == band.hi) {
        phi_out = v.H;
        len_out = v.LH;
        return;
      }
      const double wmax = std::sqrt(rpt - band.lo);
      auto fphi = [&](double w) {
        const double d_lo = w * w;
        return 2.0 * w * kernel_phi(band.lo + d_lo, nu, elo, ehi, width, d_lo,
                                    std::max(width - d_lo, 0.0));
      };
      auto flen = [&](double w) {
        const double d_lo = w * w;
        return 2.0 * w * kernel_len(band.lo + d_lo, nu, elo, ehi, width, d_lo,
                                    std::max(width - d_lo, 0.0));
      };
      phi_out = leg_integral(fphi, 0.0, wmax, tol, budget);
      len_out = leg_integral(flen, 0.0, wmax, tol, budget);
    };
    partial(r1_, v.A1, v.L1);
    if (r2_ == r1_) {
      v.A2 = v.A1;
      v.L2 = v.L1;
    } else {
      partial(r2_, v.A2, v.L2);
    }
    return v;
  }

 public:

  // Branch angle/length from leg values. turns = 0 is the monotone leg.
  static bool branch_value(const LegVals& v, int turns, bool down_first,
                           double r1, double r2, double& phi, double& len) {
    if (turns == 0) {
      if (r1 == r2) return false;
      phi = std::abs(v.A2 - v.A1);
      len = std::abs(v.L2 - v.L1);
      return true;
    }
    const bool odd = turns & 1;
    if (down_first) {
      phi = v.A1 + (turns - 1) * v.H + (odd ? v.A2 : v.H - v.A2);
      len = v.L1 + (turns - 1) * v.LH + (odd ? v.L2 : v.LH - v.L2);
    } else {
      phi = (v.H - v.A1) + (turns - 1) * v.H + (odd ? v.H - v.A2 : v.A2);
      len = (v.LH - v.L1) + (turns - 1) * v.LH + (odd ? v.LH - v.L2 : v.L2);
    }
    return true;
  }

 private:
  int regime_of(const SurfaceModel::Band& b) const {
    // Identify which inter-critical segments hold the edges.
    const auto& crit = mod_.critical_radii();
    int lo_seg = 0, hi_seg = 0;
    for (std::size_t i = 0; i < crit.size(); ++i) {
      if (crit[i] < b.lo) lo_seg = static_cast<int>(i) + 1;
      if (crit[i] < b.hi) hi_seg = static_cast<int>(i) + 1;
    }
    return lo_seg * 64 + hi_seg;
  }

  // Stable sqrt(m^2 - nu^2): near either edge the radicand switches to the
  // Taylor form (m + nu) * (|m'|d + m'' d^2 / 2) in the edge distance d.
  // Both distances come from the caller's substitution variable, exact down
  // to the edge.
  double stable_s(double r, double nu, const EdgeInfo& elo, const EdgeInfo& ehi,
                  double width, double d_lo, double d_hi) const {
    const double d_switch = 1e-5 * width;
    const double m = mod_.m(r);
    double rad;
    if (d_lo < d_switch || d_hi < d_switch) {
      const bool use_lo = d_lo <= d_hi;
      const EdgeInfo& e = use_lo ? elo : ehi;
      const double d = use_lo ? d_lo : d_hi;
      const double slope = std::abs(e.m1);
      rad = (m + nu) * std::max(slope * d + 0.5 * e.m2 * d * d, 0.0);
      // Fully degenerate edge (critical band): fall back to the direct form.
      if (rad <= 0.0) rad = std::max((m - nu) * (m + nu), 0.0);
    } else {
      rad = std::max((m - nu) * (m + nu), 0.0);
    }
    return std::sqrt(std::max(rad, 1e-300));
  }

  double kernel_phi(double r, double nu, const EdgeInfo& elo,
                    const EdgeInfo& ehi, double width, double d_lo,
                    double d_hi) const {
    const double m = mod_.m(r);
    return nu / (m * stable_s(r, nu, elo, ehi, width, d_lo, d_hi));
  }
  double kernel_len(double r, double nu, const EdgeInfo& elo,
                    const EdgeInfo& ehi, double width, double d_lo,
                    double d_hi) const {
    const double m = mod_.m(r);
    return m / stable_s(r, nu, elo, ehi, width, d_lo, d_hi);
  }

  const SurfaceModel& mod_;
  double r1_, r2_, nu_cap_ = 0.0;
};

// Scan-node layout in nu: uniform coverage, geometric tails at both ends,
// extra nodes astride each critical height of m.
inline std::vector<double> scan_nodes(const SurfaceModel& mod, double nu_cap) {
  std::vector<double> nodes;
  const int uniform = 24;
  for (int i = 1; i <= uniform; ++i)
    nodes.push_back(nu_cap * (static_cast<double>(i) - 0.5) / uniform);
  for (int k = 1; k <= 6; ++k) nodes.push_back(nu_cap * std::pow(10.0, -k));
  for (int k = 1; k <= 7; ++k)
    nodes.push_back(nu_cap * (1.0 - std::pow(10.0, -k)));
  for (double c : mod.critical_radii()) {
    const double h = mod.m(c);
    if (h > 0.0 && h < nu_cap)
      for (double eps : {1e-3, 1e-6}) {
        nodes.push_back(h * (1.0 - eps));
        nodes.push_back(h * (1.0 + eps));
      }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                             [&](double v) { return v <= 0.0 || v >= nu_cap; }),
              nodes.end());
  return nodes;
}

inline void quad_collect(const SurfaceModel& mod, double r1, double r2,
                         double span, const DistanceOptions& opts,
                         double length_cap, std::vector<Candidate>& out,
                         bool& flat_branch) {
  QuadSolver qs(mod, r1, r2);
  if (!(qs.nu_cap() > 0.0)) return;
  const double scan_tol = 1e-7;
  const int scan_budget = 120;

  auto nodes = scan_nodes(mod, qs.nu_cap());
  std::vector<QuadSolver::LegVals> vals(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    vals[i] = qs.eval(nodes[i], scan_tol, scan_budget);

  // Tangency cap node: exact limit values at nu = nu_cap when the cap sits
  // at an endpoint radius. Rays leaving almost tangent to the endpoint
  // parallel have roots between the last tail node and the cap; without
  // this node they fall through the scan.
  {
    const auto vcap = qs.eval_cap(scan_tol, scan_budget);
    if (vcap.feasible) {
      nodes.push_back(qs.nu_cap());
      vals.push_back(vcap);
    }
  }

  // Virtual node at nu = 0, holding the analytic meridian limits: each
  // theta leg collapses to the quarter turn picked up at its pole, each
  // length leg to the meridian segment. Branch values derived from these
  // are exact, so roots below the smallest real node still get bracketed.
  {
    QuadSolver::LegVals v0;
    v0.feasible = vals.empty() ? false : vals.front().feasible;
    v0.regime = vals.empty() ? -1 : vals.front().regime;
    v0.lo = 0.0;
    v0.hi = mod.two_a();
    v0.A1 = v0.A2 = 0.5 * pi;
    v0.H = pi;
    v0.L1 = r1;
    v0.L2 = r2;
    v0.LH = mod.two_a();
    nodes.insert(nodes.begin(), 0.0);
    vals.insert(vals.begin(), v0);
  }

  struct BranchId {
    int turns;
    bool down_first;
  };
  std::vector<BranchId> branches;
  branches.push_back({0, false});
  for (int n = 1; n <= opts.max_turns; ++n) {
    branches.push_back({n, false});
    branches.push_back({n, true});
  }

  for (const auto& br : branches) {
    int flat_run = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const auto& va = vals[i];
      const auto& vb = vals[i + 1];
      if (!va.feasible || !vb.feasible || va.regime != vb.regime) continue;
      double pa = 0, la = 0, pb = 0, lb = 0;
      if (!QuadSolver::branch_value(va, br.turns, br.down_first, r1, r2, pa, la))
        continue;
      QuadSolver::branch_value(vb, br.turns, br.down_first, r1, r2, pb, lb);
      if (std::min(la, lb) > length_cap) continue;

      // A branch hugging the target across many nodes marks a continuum.
      if (std::abs(pa - span) < 1e-7 && std::abs(pb - span) < 1e-7) {
        if (++flat_run >= 3) flat_branch = true;
      } else {
        flat_run = 0;
      }

      const double ga = pa - span;
      double gb = pb - span;
      double hi_node = nodes[i + 1];
      if (!(ga * gb < 0.0)) {
        // Roots undershooting the first real node are anchored by the exact
        // nu = 0 limit, but scan-level noise can hide the sign change when
        // the branch value barely moves off the limit. Near the limit,
        // re-test a few tail nodes at full tolerance before giving up.
        if (i != 0 || std::abs(ga) > 1e-6) continue;
        bool flipped = false;
        for (std::size_t j = 1; j < std::min<std::size_t>(nodes.size(), 5);
             ++j) {
          const auto vj = qs.eval(nodes[j], opts.quad_tol, 4000);
          if (!vj.feasible || vj.regime != va.regime) break;
          double pj = 0, lj = 0;
          QuadSolver::branch_value(vj, br.turns, br.down_first, r1, r2, pj,
                                   lj);
          if (std::min(la, lj) > length_cap) break;
          const double gj = pj - span;
          if (ga * gj < 0.0) {
            hi_node = nodes[j];
            gb = gj;
            flipped = true;
            break;
          }
          if (std::abs(gj) > 30.0 * opts.quad_tol) break;
        }
        if (!flipped) continue;
      }
      // Polish the root in nu at full tolerance.
      auto eval_full = [&](double nu) {
        return nu >= qs.nu_cap() ? qs.eval_cap(opts.quad_tol, 4000)
                                 : qs.eval(nu, opts.quad_tol, 4000);
      };
      auto g = [&](double nu) {
        const auto v = eval_full(nu);
        if (!v.feasible) return ga > 0 ? 1.0 : -1.0;  // stay on the near side
        double p = 0, l = 0;
        QuadSolver::branch_value(v, br.turns, br.down_first, r1, r2, p, l);
        return p - span;
      };
      double nu_root;
      try {
        nu_root = brent(g, nodes[i], hi_node, 1e-10 * qs.nu_cap(), 60);
      } catch (const solver_failure&) {
        continue;
      }
      const auto v = eval_full(nu_root);
      if (!v.feasible) continue;
      double p = 0, l = 0;
      QuadSolver::branch_value(v, br.turns, br.down_first, r1, r2, p, l);
      // First variation: dL = nu * dtheta at fixed endpoint radii.
      const double length = l + nu_root * (span - p);
      if (length > length_cap || !(length > 0.0)) continue;
      Candidate cand;
      cand.length = length;
      cand.nu = nu_root;
      cand.down_first = br.turns == 0 ? (r2 < r1) : br.down_first;
      cand.turns = br.turns;
      cand.span = span;
      cand.route = 'q';
      const double sphi = std::min(1.0, nu_root / mod.m(r1));
      cand.phi = cand.down_first ? pi - std::asin(sphi) : std::asin(sphi);
      out.push_back(cand);
    }
  }

  // Closed-parallel arcs: both points on a common critical circle.
  if (std::abs(r1 - r2) <= 1e-9 * mod.two_a()) {
    for (double c : mod.critical_radii())
      if (std::abs(r1 - c) <= 1e-9 * mod.two_a()) {
        const double len = mod.m(c) * span;
        if (len <= length_cap) {
          Candidate cand;
          cand.length = len;
          cand.nu = mod.m(c);
          cand.phi = 0.5 * pi;
          cand.turns = 0;
          cand.span = span;
          cand.route = 'q';
          out.push_back(cand);
        }
      }
  }
}

// ---- shooting route ----

struct Crossing {
  double t, theta;
};

// Cheap trace of the ray phi from (r1, 0): fixed-step RK4, crossings of
// r = r2 interpolated linearly within a step.
inline void scan_ray(const SurfaceModel& mod, double r1, double r2, double phi,
                     double t_cap, std::vector<Crossing>& out) {
  out.clear();
  const double L = mod.two_a();
  // Fixed steps overshoot sharp near-pole turnarounds of low-phi rays; the
  // m evaluation is clamped and such rays are abandoned (meridian-like
  // connections are handled in closed form).
  auto rhs = [&](double, const OdeState<3>& y, OdeState<3>& dy) {
    const double rr = std::clamp(y[0], 1e-9 * L, L * (1.0 - 1e-9));
    double m, m1;
    mod.eval(rr, &m, &m1, nullptr);
    const double sp = std::sin(y[2]);
    dy[0] = std::cos(y[2]);
    dy[1] = sp / m;
    dy[2] = -m1 * sp / m;
  };
  const long steps = 300;
  OdeState<3> y{r1, 0.0, phi};
  double t_prev = 0.0, r_prev = r1 - r2, th_prev = 0.0;
  rk4_integrate(rhs, 0.0, y, t_cap, steps,
                [&](double t, const OdeState<3>& s) {
                  if (s[0] <= 0.0 || s[0] >= L) return false;
                  const double f = s[0] - r2;
                  if (f == 0.0 || f * r_prev < 0.0) {
                    const double w = r_prev / (r_prev - f);
                    out.push_back(
                        {t_prev + w * (t - t_prev), th_prev + w * (s[1] - th_prev)});
                  }
                  t_prev = t;
                  r_prev = f;
                  th_prev = s[1];
                  return s[1] < two_pi + 0.3;
                });
}

// Accurate crossing list via the adaptive integrator; crossing times are
// sharpened by re-integrating within the bracketing step.
inline void trace_ray(const SurfaceModel& mod, double r1, double r2, double phi,
                      double t_cap, const DistanceOptions& opts,
                      std::vector<Crossing>& out) {
  out.clear();
  const double L = mod.two_a();
  auto rhs = [&](double, const OdeState<3>& y, OdeState<3>& dy) {
    const double rr = std::clamp(y[0], 1e-11 * L, L * (1.0 - 1e-11));
    double m, m1;
    mod.eval(rr, &m, &m1, nullptr);
    const double sp = std::sin(y[2]);
    dy[0] = std::cos(y[2]);
    dy[1] = sp / m;
    dy[2] = -m1 * sp / m;
  };
  OdeOptions oo;
  oo.rtol = opts.ode_rtol;
  oo.atol = opts.ode_atol;
  oo.h_max = L / 32.0;
  OdeState<3> y0{r1, 0.0, phi};
  const double nu = mod.m(std::clamp(r1, 1e-11 * L, L * (1.0 - 1e-11))) *
                    std::sin(phi);
  integrate_ode(rhs, 0.0, y0, t_cap, oo, [&](const OdeStep<3>& s) {
    auto push = [&](double ta, const OdeState<3>& ya, double tb) {
      auto f = [&](double t) { return integrate_to(rhs, ta, ya, t, oo)[0] - r2; };
      const double tc = brent(f, ta, tb, 1e-12 * L);
      const auto yc = integrate_to(rhs, ta, ya, tc, oo);
      out.push_back({tc, yc[1]});
    };
    const double fa = s.y0[0] - r2, fb = s.y1[0] - r2;
    if (fa * fb < 0.0) {
      push(s.t0, s.y0, s.t1);
    } else if (std::cos(s.y0[2]) * std::cos(s.y1[2]) < 0.0 && fa != 0.0) {
      // The step straddles a turning point of r; the turn can graze past r2
      // and back without an endpoint sign change. The turning radius is the
      // band edge for this ray's Clairaut constant, which decides exactly
      // whether a double crossing hides inside the step.
      const auto band =
          mod.band(std::clamp(s.y0[0], 1e-11 * L, L * (1.0 - 1e-11)), nu);
      const double r_turn = std::cos(s.y0[2]) < 0.0 ? band.lo : band.hi;
      if ((r_turn - r2) * fa < 0.0) {
        auto dr = [&](double t) {
          return std::cos(integrate_to(rhs, s.t0, s.y0, t, oo)[2]);
        };
        const double tm = brent(dr, s.t0, s.t1, 1e-12 * L);
        const auto ym = integrate_to(rhs, s.t0, s.y0, tm, oo);
        if ((ym[0] - r2) * fa < 0.0) {
          push(s.t0, s.y0, tm);
          push(tm, ym, s.t1);
        }
      }
    }
    if (s.y1[0] <= 1e-8 * L || s.y1[0] >= L * (1.0 - 1e-8)) return false;
    return s.y1[1] < two_pi + 0.3;
  });
}

// Crossing curves t(phi) are continuous, so crossings of adjacent rays are
// paired by nearest time rather than by list index; index pairing breaks
// whenever a tangency changes the crossing count between rays.
inline const Crossing* nearest_crossing(const std::vector<Crossing>& row,
                                        double t_ref, double t_window) {
  const Crossing* best = nullptr;
  double bd = t_window;
  for (const auto& c : row) {
    const double d = std::abs(c.t - t_ref);
    if (d < bd) {
      bd = d;
      best = &c;
    }
  }
  return best;
}

inline void shoot_collect(const SurfaceModel& mod, double r1, double r2,
                          const std::vector<double>& spans,
                          const DistanceOptions& opts, double length_cap,
                          std::vector<Candidate>& out) {
  const int grid = opts.scan_grid;
  if (grid < 8) return;
  const double t_cap = std::min(length_cap * 1.02 + 1e-6, 2.5 * mod.two_a());
  const double t_window = 0.15 * t_cap;
  const double dphi = pi / grid;

  std::vector<std::vector<Crossing>> rows(grid);
  std::vector<double> phis(grid);
  for (int k = 0; k < grid; ++k) {
    phis[k] = pi * (static_cast<double>(k) + 0.5) / grid;
    scan_ray(mod, r1, r2, phis[k], t_cap, rows[k]);
  }

  std::vector<Crossing> tmp;
  // Accurate span miss of the crossing nearest t_ref; NaN when the crossing
  // family is absent at this phi.
  auto gacc = [&](double phi, double t_ref, double span, Crossing* hit) {
    trace_ray(mod, r1, r2, phi, t_cap, opts, tmp);
    const Crossing* c = nearest_crossing(tmp, t_ref, t_window);
    if (!c) return std::numeric_limits<double>::quiet_NaN();
    if (hit) *hit = *c;
    return c->theta - span;
  };

  // A crossing pair is born at a tangency m(r2) = nu between two rays; a
  // span can be hit inside that sliver before the left ray sees the family.
  // The birth angle is located by bisection on family existence, then each
  // of the two newborn branches (tracked stably as the min-theta and
  // max-theta member of the tight pair) is bisected against the span.
  auto birth_probe = [&](double span, double phi_no, double phi_yes,
                         double t_ref, std::vector<Candidate>& found) {
    // Pair extremes at this phi, or false if the family is absent.
    auto family = [&](double phi, Crossing& cmin, Crossing& cmax) {
      trace_ray(mod, r1, r2, phi, t_cap, opts, tmp);
      bool any = false;
      for (const auto& c : tmp) {
        if (std::abs(c.t - t_ref) > t_window) continue;
        if (!any) {
          cmin = cmax = c;
          any = true;
          continue;
        }
        if (c.theta < cmin.theta) cmin = c;
        if (c.theta > cmax.theta) cmax = c;
      }
      return any;
    };
    double a = phi_no, b = phi_yes;
    Crossing mn{}, mx{};
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (a + b);
      (family(mid, mn, mx) ? b : a) = mid;
    }
    Crossing mn0{}, mx0{}, mn1{}, mx1{};
    if (!family(b, mn0, mx0) || !family(phi_yes, mn1, mx1)) return;

    auto emit = [&](double phi, const Crossing& hit) {
      const double nu = mod.m(r1) * std::sin(phi);
      const double length = hit.t + nu * (span - hit.theta);
      if (length > length_cap || !(length > 0.0)) return;
      Candidate cand;
      cand.length = length;
      cand.nu = nu;
      cand.phi = phi;
      cand.down_first = phi > 0.5 * pi;
      cand.turns = -1;
      cand.span = span;
      cand.route = 's';
      found.push_back(cand);
    };
    // upper = true follows the max-theta branch.
    auto solve_branch = [&](bool upper, double g0, double g1) {
      if (!(g0 * g1 < 0.0)) return;
      double lo = b, hi = phi_yes, glo = g0;
      Crossing best = upper ? mx0 : mn0;
      for (int it = 0; it < 45 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        Crossing cmn{}, cmx{};
        if (!family(mid, cmn, cmx)) {
          lo = mid;  // fell off the sliver edge; root is further in
          continue;
        }
        const Crossing& c = upper ? cmx : cmn;
        const double g = c.theta - span;
        best = c;
        if (glo * g <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          glo = g;
        }
        if (std::abs(g) < 1e-9) break;
      }
      emit(0.5 * (lo + hi), best);
    };
    solve_branch(true, mx0.theta - span, mx1.theta - span);
    solve_branch(false, mn0.theta - span, mn1.theta - span);
  };

  for (double span : spans) {
    std::vector<double> roots;
    for (int k = 0; k + 1 < grid; ++k) {
      // Families present on one side only: probe the birth sliver.
      for (const auto& cb : rows[k + 1])
        if (cb.t <= length_cap && std::abs(cb.theta - span) < 0.6 &&
            !nearest_crossing(rows[k], cb.t, t_window))
          birth_probe(span, phis[k], phis[k + 1], cb.t, out);
      for (const auto& ca : rows[k])
        if (ca.t <= length_cap && std::abs(ca.theta - span) < 0.6 &&
            !nearest_crossing(rows[k + 1], ca.t, t_window))
          birth_probe(span, phis[k + 1], phis[k], ca.t, out);

      for (const auto& ca : rows[k]) {
        if (ca.t > length_cap) continue;
        const Crossing* cb = nearest_crossing(rows[k + 1], ca.t, t_window);
        if (!cb || std::abs(cb->theta - ca.theta) > 1.0) continue;
        if (!((ca.theta - span) * (cb->theta - span) < 0.0)) continue;

        double t_ref = 0.5 * (ca.t + cb->t);
        double a = phis[k], b = phis[k + 1];
        double ga = gacc(a, t_ref, span, nullptr);
        double gb = gacc(b, t_ref, span, nullptr);
        if (!(ga * gb < 0.0)) {
          // Cheap and accurate traces can disagree right at a node; widen
          // once before giving up.
          a = std::max(1e-6, a - 0.75 * dphi);
          b = std::min(pi - 1e-6, b + 0.75 * dphi);
          ga = gacc(a, t_ref, span, nullptr);
          gb = gacc(b, t_ref, span, nullptr);
          if (!(ga * gb < 0.0)) continue;
        }
        Crossing hit{t_ref, 0.0};
        double mid = 0.5 * (a + b);
        while (b - a > 1e-7) {
          mid = 0.5 * (a + b);
          const double gm = gacc(mid, t_ref, span, &hit);
          if (std::isnan(gm)) break;
          t_ref = hit.t;
          (ga * gm <= 0.0 ? b : a) = mid;
          if (ga * gm > 0.0) ga = gm;
        }
        const double gm = gacc(mid, t_ref, span, &hit);
        if (std::isnan(gm)) continue;

        bool dup = false;
        for (double r : roots)
          if (std::abs(r - mid) < 5e-7) dup = true;
        if (dup) continue;
        roots.push_back(mid);

        const double nu = mod.m(r1) * std::sin(mid);
        const double length = hit.t + nu * (span - hit.theta);
        if (length > length_cap || !(length > 0.0)) continue;
        Candidate cand;
        cand.length = length;
        cand.nu = nu;
        cand.phi = mid;
        cand.down_first = mid > 0.5 * pi;
        cand.turns = -1;  // not tracked on this route
        cand.span = span;
        cand.route = 's';
        out.push_back(cand);
      }
    }
  }
}

}  // namespace dist_detail

// Full distance query. x and y are surface points; theta is ignored at poles.
inline DistanceResult distance(const SurfaceModel& model, const SurfacePoint& x,
                               const SurfacePoint& y,
                               const DistanceOptions& opts = {}) {
  using dist_detail::Candidate;
  const double L = model.two_a();
  DistanceResult res;

  auto add_meridian_path = [&](Minimizer& mz, double r_from, double theta_from,
                               double phi) {
    if (!opts.want_paths) return;
    GeodesicState st;
    st.point.r = r_from;
    st.point.theta = theta_from;
    st.point.theta_defined = !model.is_pole(r_from);
    st.phi = phi;
    st.nu = 0.0;
    mz.path = trace_meridian(model, st, mz.length, {});
  };

  // Pole endpoints: radial closed form.
  const bool xp = model.is_pole(x.r), yp = model.is_pole(y.r);
  if (xp || yp) {
    const bool x_north = xp && x.r <= 0.5 * L;
    const bool y_north = yp && y.r <= 0.5 * L;
    if (xp && yp) {
      res.distance = x_north == y_north ? 0.0 : L;
      res.delta = 0.0;
      if (res.distance > 0.0) {
        res.saturated = true;  // every meridian realizes the distance
        res.multiplicity = opts.max_minimizers;
        for (int k = 0; k < std::min(4, opts.max_minimizers); ++k) {
          Minimizer mz;
          mz.length = L;
          mz.phi = x_north ? 0.0 : pi;
          mz.route = 'm';
          mz.theta_span = 0.0;
          add_meridian_path(mz, x.r, two_pi * k / 4.0, mz.phi);
          res.minimizers.push_back(mz);
        }
      } else {
        res.multiplicity = 1;
      }
      return res;
    }
    const SurfacePoint& pole = xp ? x : y;
    const SurfacePoint& other = xp ? y : x;
    const bool north = pole.r <= 0.5 * L;
    res.distance = north ? other.r : L - other.r;
    res.delta = 0.0;
    res.multiplicity = 1;
    Minimizer mz;
    mz.length = res.distance;
    mz.route = 'm';
    mz.theta_span = 0.0;
    if (xp) {
      // From the pole outward along the meridian of y.
      mz.phi = north ? 0.0 : pi;
      add_meridian_path(mz, pole.r, other.theta, mz.phi);
    } else {
      // From x toward the pole.
      mz.phi = north ? pi : 0.0;
      add_meridian_path(mz, other.r, other.theta, mz.phi);
    }
    res.minimizers.push_back(mz);
    return res;
  }

  const double dth = wrap_angle(y.theta - x.theta);
  const double delta = std::abs(dth);
  const int sigma = dth >= 0.0 ? +1 : -1;
  res.delta = delta;

  if (delta == 0.0 && std::abs(x.r - y.r) == 0.0) {
    res.distance = 0.0;
    res.multiplicity = 1;
    return res;
  }

  const double tie = std::max(10.0 * opts.tol, 0.0);
  double length_cap = L * (1.0 + 1e-9) + 10.0 * opts.tol;

  std::vector<Candidate> cands;
  bool flat_branch = false;

  // Meridian specials.
  const double ang_eps = 1e-12;
  if (delta <= ang_eps) {
    if (std::abs(x.r - y.r) > 0.0) {
      Candidate c;
      c.length = std::abs(y.r - x.r);
      c.nu = 0.0;
      c.phi = y.r > x.r ? 0.0 : pi;
      c.turns = 0;
      c.span = 0.0;
      c.route = 'm';
      cands.push_back(c);
    }
  }
  if (std::abs(delta - pi) <= ang_eps || delta <= ang_eps) {
    // Through either pole; reaches the opposite meridian plane.
    const double span_here = std::abs(delta - pi) <= ang_eps ? pi : 0.0;
    if (span_here == pi) {
      Candidate down;
      down.length = x.r + y.r;
      down.phi = pi;
      down.turns = 0;
      down.span = pi;
      down.route = 'm';
      cands.push_back(down);
      Candidate up;
      up.length = (L - x.r) + (L - y.r);
      up.phi = 0.0;
      up.turns = 0;
      up.span = pi;
      up.route = 'm';
      cands.push_back(up);
    }
  }

  std::vector<double> spans;
  if (delta > ang_eps) spans.push_back(delta);
  if (two_pi - delta > ang_eps &&
      std::abs((two_pi - delta) - delta) > ang_eps)
    spans.push_back(two_pi - delta);
  else if (delta <= ang_eps)
    spans.push_back(two_pi);

  std::vector<Candidate> quad_cands, shoot_cands;
  if (opts.use_quadrature)
    for (double span : spans)
      dist_detail::quad_collect(model, x.r, y.r, span, opts, length_cap,
                                quad_cands, flat_branch);
  if (opts.use_shooting)
    dist_detail::shoot_collect(model, x.r, y.r, spans, opts, length_cap,
                               shoot_cands);
  // Whichever route was disabled becomes the safety net when the enabled
  // one comes up empty.
  if (quad_cands.empty() && shoot_cands.empty() && cands.empty()) {
    if (!opts.use_shooting) {
      DistanceOptions fb = opts;
      fb.scan_grid = fb.scan_grid >= 8 ? fb.scan_grid : 192;
      dist_detail::shoot_collect(model, x.r, y.r, spans, fb, length_cap,
                                 shoot_cands);
    } else if (!opts.use_quadrature) {
      for (double span : spans)
        dist_detail::quad_collect(model, x.r, y.r, span, opts, length_cap,
                                  quad_cands, flat_branch);
    }
  }

  // Route agreement on matched candidates; keep the quadrature value.
  double agree = -1.0;
  for (const auto& sc : shoot_cands) {
    bool matched = false;
    for (const auto& qc : quad_cands) {
      if (std::abs(qc.span - sc.span) < 1e-9 &&
          std::abs(qc.nu - sc.nu) < 1e-5 * model.max_m() &&
          std::abs(qc.length - sc.length) < 1e-3) {
        agree = std::max(agree, std::abs(qc.length - sc.length));
        matched = true;
        break;
      }
    }
    if (!matched) cands.push_back(sc);
  }
  res.route_agreement = agree;
  cands.insert(cands.end(), quad_cands.begin(), quad_cands.end());

  if (cands.empty())
    throw solver_failure("distance: no connecting geodesic found");

  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.length < b.length;
            });
  const double best = cands.front().length;
  const double tie_tol = std::max(tie, 1e-6 * best);

  // Instantiate directed minimizers within the tie band, deduplicated.
  std::vector<Minimizer> mins;
  int multiplicity = 0;
  for (const auto& c : cands) {
    if (c.length > best + tie_tol) break;
    std::vector<int> dirs;
    if (c.span <= ang_eps || c.nu == 0.0) {
      dirs = {+1};  // meridian; direction carried by phi
      if (c.span == 0.0 && std::abs(delta - pi) <= ang_eps) dirs = {+1};
    } else if (std::abs(c.span - pi) <= 1e-12 || delta <= ang_eps) {
      dirs = {+1, -1};  // mirror-symmetric target
    } else {
      dirs = {std::abs(c.span - delta) < 1e-9 ? sigma : -sigma};
    }
    for (int dir : dirs) {
      Minimizer mz;
      mz.length = c.length;
      mz.phi = c.phi;
      mz.dir = dir;
      mz.nu = dir * c.nu;
      mz.turns = c.turns;
      mz.theta_span = c.span;
      mz.route = c.route;
      // Dedup: same signed nu, same phi, same length.
      bool dup = false;
      for (const auto& e : mins)
        if (std::abs(e.length - mz.length) < 1e-7 * (1.0 + best) &&
            std::abs(e.nu - mz.nu) < 1e-6 * (model.max_m() + 1.0) &&
            std::abs(e.phi - mz.phi) < 1e-6)
          dup = true;
      if (dup) continue;
      ++multiplicity;
      if (static_cast<int>(mins.size()) < opts.max_minimizers)
        mins.push_back(mz);
    }
  }

  res.distance = best;
  res.multiplicity = multiplicity;
  res.saturated = flat_branch || multiplicity > opts.max_minimizers;
  res.minimizers = std::move(mins);

  if (opts.want_paths) {
    for (auto& mz : res.minimizers) {
      if (mz.nu == 0.0) {
        // Meridian minimizer, possibly through a pole.
        add_meridian_path(mz, x.r, x.theta, mz.phi);
        if (mz.path) {
          const auto& fs = mz.path->final_state;
          mz.endpoint_error =
              std::abs(fs.point.r - y.r) +
              (fs.point.theta_defined && y.theta_defined
                   ? model.m(y.r) * std::abs(wrap_angle(fs.point.theta - y.theta))
                   : 0.0);
        }
        continue;
      }
      auto st = make_geodesic_state(model, x.r, x.theta, mz.phi, mz.dir);
      GeodesicOptions go;
      go.rtol = opts.ode_rtol;
      go.atol = opts.ode_atol;
      mz.path = integrate_geodesic(model, st, mz.length, go);
      const auto& fs = mz.path->final_state;
      mz.endpoint_error =
          std::abs(fs.point.r - y.r) +
          model.m(y.r) * std::abs(wrap_angle(fs.point.theta - y.theta));
    }
  }
  return res;
}

inline double distance(const SurfaceModel& model, const SurfacePoint& x,
                       const SurfacePoint& y, double tol) {
  DistanceOptions opts;
  opts.tol = tol;
  return distance(model, x, y, opts).distance;
}

// Tangent-plane angle of the first minimizer toward `to`, measured from the
// outward meridian direction, signed by the travel direction.
inline double departure_angle(const SurfaceModel& model, const SurfacePoint& at,
                              const SurfacePoint& to,
                              const DistanceOptions& opts = {}) {
  auto res = distance(model, at, to, opts);
  if (res.minimizers.empty())
    throw solver_failure("departure_angle: no minimizer");
  const auto& mz = res.minimizers.front();
  return std::atan2(mz.dir * std::sin(mz.phi), std::cos(mz.phi));
}

// Angle at vertex x of the geodesic hinge x->y, x->z. At a pole the angle
// is the meridian separation.
inline double angle_at(const SurfaceModel& model, const SurfacePoint& x,
                       const SurfacePoint& y, const SurfacePoint& z,
                       const DistanceOptions& opts = {}) {
  if (model.is_pole(x.r)) {
    if (model.is_pole(y.r) || model.is_pole(z.r))
      throw std::invalid_argument("angle_at: degenerate hinge at a pole");
    return std::abs(wrap_angle(y.theta - z.theta));
  }
  DistanceOptions o = opts;
  o.want_paths = false;
  const double ay = departure_angle(model, x, y, o);
  const double az = departure_angle(model, x, z, o);
  return std::abs(wrap_angle(ay - az));
}

struct DiameterResult {
  double value = 0.0;
  SurfacePoint witness_x, witness_y;
  int samples = 0;
};

// Randomized diameter search: area-weighted pairs plus the pole pair,
// refined by a shrinking pattern search. The pole pair realizes 2a and is
// kept as the incumbent unless an interior pair beats it strictly.
inline DiameterResult diameter(const SurfaceModel& model, int samples = 300,
                               std::uint64_t seed = 1,
                               const DistanceOptions& opts =
                                   DistanceOptions::fast()) {
  const double L = model.two_a();
  DiameterResult best;
  best.samples = samples;
  best.witness_x = SurfacePoint{0.0, 0.0, false};
  best.witness_y = SurfacePoint{L, 0.0, false};
  best.value = L;  // pole pair, exact by the radial closed form

  Rng rng(Rng::derive(seed, 0xd1a));
  SurfacePoint bx = best.witness_x, by = best.witness_y;
  double bv = best.value;
  for (int i = 0; i < samples; ++i) {
    SurfacePoint p = model.sample_point(rng);
    SurfacePoint q = model.sample_point(rng);
    const double d = distance(model, p, q, opts).distance;
    if (d > bv) {
      bv = d;
      bx = p;
      by = q;
    }
  }

  if (bv > best.value) {
    // Pattern-search refinement in (r_x, r_y, delta).
    double r1 = bx.r, r2 = by.r, dl = std::abs(wrap_angle(by.theta - bx.theta));
    double step = 0.05 * L;
    auto eval = [&](double a, double b, double d) {
      a = std::min(std::max(a, 0.0), L);
      b = std::min(std::max(b, 0.0), L);
      d = std::min(std::max(d, 0.0), pi);
      return distance(model, {a, 0.0, true}, {b, d, true}, opts).distance;
    };
    double cur = eval(r1, r2, dl);
    for (int it = 0; it < 60 && step > 1e-7 * L; ++it) {
      bool improved = false;
      const double trial[6][3] = {{step, 0, 0}, {-step, 0, 0}, {0, step, 0},
                                  {0, -step, 0}, {0, 0, step}, {0, 0, -step}};
      for (const auto& t : trial) {
        const double v = eval(r1 + t[0], r2 + t[1], dl + t[2]);
        if (v > cur + 1e-12) {
          cur = v;
          r1 += t[0];
          r2 += t[1];
          dl += t[2];
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur > best.value) {
      best.value = cur;
      best.witness_x = {std::min(std::max(r1, 0.0), L), 0.0, true};
      best.witness_y = {std::min(std::max(r2, 0.0), L),
                        std::min(std::max(dl, 0.0), pi), true};
    }
  }
  return best;
}

// d((r1,0),(r2,delta)) as a function of delta should be nondecreasing on
// [0, pi]; sampled check used before bisecting on delta.
inline bool verify_delta_monotonicity(const SurfaceModel& model, double r1,
                                      double r2, int grid = 40,
                                      const DistanceOptions& opts =
                                          DistanceOptions::fast()) {
  double prev = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double delta = pi * static_cast<double>(i) / grid;
    const double d =
        distance(model, {r1, 0.0, true}, {r2, delta, true}, opts).distance;
    if (i > 0 && d < prev - 1e-6 * (1.0 + prev)) return false;
    prev = d;
  }
  return true;
}

}  // namespace revsphere
