#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shadowkit/bowen.hpp"
#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"
#include "shadowkit/systems/circle.hpp"

namespace shadowkit {

namespace detail {

inline std::string fmt_key(const char* prefix, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%g", prefix, v);
  return buf;
}

}  // namespace detail

/// apply(orb(p)) = p on sampled p: the defining property of a pseudo-orbit map.
template <class P>
CheckReport check_fixes_orbits(const ShadowingMethod<P>& method, const MetricSystem<P>& sys, const Sampler<P>& sampler,
                               int window = 16, int n = 64, double tolerance = -1.0) {
  CheckReport r;
  r.name = "fixes-orbits(" + method.id + ")";
  r.tolerance = tolerance < 0 ? sys.tol : tolerance;
  for (int k = 0; k < n; ++k) {
    const P p = sampler.point(static_cast<std::uint64_t>(k));
    const double d = sys.dist(method.apply(orbit_map(sys, p, -window, window)), p);
    if (r.observe_worst(-d)) detail::set_witness<P>(r, {{"p", p}});
  }
  r.finalize();
  return r;
}

/// max over i in [i_lo, i_hi] of d(f^i(Sh x), Sh(sigma^i x)).
///
/// Strict invariance asks for max <= tol. The defect series is recorded as
/// metrics "defect@i" so the weak (eps, gamma) form can be read off.
template <class P>
CheckReport check_shift_invariance(const ShadowingMethod<P>& method, const MetricSystem<P>& sys,
                                   const PseudoOrbit<P>& x, int i_lo, int i_hi, double tol) {
  CheckReport r;
  r.name = "shift-invariance(" + method.id + ")";
  r.tolerance = 0.0;
  i_lo = std::max(i_lo, x.lo());
  i_hi = std::min(i_hi, x.hi());
  const P base = method.apply(x);
  double worst = 0.0;
  for (int i = i_lo; i <= i_hi; ++i) {
    const double d = sys.dist(apply_iter(sys, base, i), method.apply(x.shifted(i)));
    worst = std::max(worst, d);
    r.metric("defect@" + std::to_string(i), d);
    if (r.observe_worst(tol - d)) {
      detail::set_witness<P>(r, {{"x_0", x[0]}});
      r.note = "worst at i=" + std::to_string(i);
    }
  }
  r.metric("max_defect", worst);
  r.finalize();
  return r;
}

/// d(f(Sh x), Sh(f o x)) <= tol, where f o x applies f entrywise.
template <class P>
CheckReport check_dyn_invariance(const ShadowingMethod<P>& method, const MetricSystem<P>& sys,
                                 const std::vector<PseudoOrbit<P>>& xs, double tol) {
  CheckReport r;
  r.name = "dyn-invariance(" + method.id + ")";
  r.tolerance = 0.0;
  const auto f = sys.fwd;
  for (const auto& x : xs) {
    const P a = sys.fwd(method.apply(x));
    const P b = method.apply(x.mapped([&](const P& p) { return f(p); }));
    if (r.observe_worst(tol - sys.dist(a, b))) detail::set_witness<P>(r, {{"x_0", x[0]}, {"f(Sh x)", a}, {"Sh(f x)", b}});
  }
  r.finalize();
  return r;
}

/// For periodic x of period n: d(f^n(Sh x), Sh x) <= tol.
template <class P>
CheckReport periodic_shadow_check(const ShadowingMethod<P>& method, const MetricSystem<P>& sys,
                                  const PseudoOrbit<P>& x, double tol) {
  if (x.extension() != Extension::Periodic) throw WindowError("periodic_shadow_check: pseudo-orbit must be periodic");
  CheckReport r;
  r.name = "periodic-shadow(" + method.id + ")";
  r.tolerance = 0.0;
  const P s = method.apply(x);
  const double d = sys.dist(apply_iter(sys, s, x.size()), s);
  r.observe(tol - d);
  r.metric("period", x.size());
  r.metric("return_distance", d);
  detail::set_witness<P>(r, {{"shadow", s}});
  r.finalize();
  return r;
}

/// Certified bound for d(f^i(point), x_i): per-index bound plus the tail.
template <class P>
std::optional<double> certificate_at(const ShadowResult<P>& r, int i) {
  if (!r.per_index_bound) return std::nullopt;
  const auto& b = *r.per_index_bound;
  if (i < b.lo || i > b.hi()) return std::nullopt;
  return b.at(i) + r.tail_bound;
}

/// h(p) = Sh_f(orb_g(p)) on a grid: reports sup d(h(p), p) and the
/// semiconjugacy defect sup d(f(h(p)), h(g(p))).
///
/// orb_g(g p) is the shift of orb_g(p) away from the window ends, so the
/// defect at p is at most cert(orb_g p, 1) + cert(orb_g(g p), 0). Each grid
/// point must stay within that certificate when the method provides one, and
/// within defect_tol when defect_tol >= 0.
template <class P>
CheckReport stability_experiment(const MetricSystem<P>& f, const MetricSystem<P>& g, const ShadowingMethod<P>& method,
                                 const std::vector<P>& grid, int window, double defect_tol = -1.0) {
  CheckReport r;
  r.name = "stability(" + method.id + ", " + g.id + ")";
  r.tolerance = 0.0;
  double sup_move = 0.0, sup_defect = 0.0, sup_cert = 0.0;
  bool any_cert = false;
  for (const P& p : grid) {
    const auto x = orbit_map(g, p, -window, window);
    const auto x1 = orbit_map(g, g.fwd(p), -window, window);
    const auto h = method.run(x);
    const auto h1 = method.run(x1);
    const double move = f.dist(h.point, p);
    const double defect = f.dist(f.fwd(h.point), h1.point);
    sup_move = std::max(sup_move, move);
    sup_defect = std::max(sup_defect, defect);
    double slack = std::numeric_limits<double>::infinity();
    const auto c1 = certificate_at(h, 1), c0 = certificate_at(h1, 0);
    if (c1 && c0) {
      any_cert = true;
      sup_cert = std::max(sup_cert, *c1 + *c0);
      slack = *c1 + *c0 - defect;
    }
    if (defect_tol >= 0.0) slack = std::min(slack, defect_tol - defect);
    if (r.observe_worst(slack)) detail::set_witness<P>(r, {{"p", p}, {"h(p)", h.point}});
  }
  r.metric("grid_points", static_cast<double>(grid.size()));
  r.metric("sup_h_minus_id", sup_move);
  r.metric("sup_defect", sup_defect);
  if (any_cert) r.metric("sup_certificate", sup_cert);
  if (!any_cert && defect_tol < 0.0) {
    r.passed = false;
    r.note = "method gives no certificate and no defect tolerance was set";
  }
  r.finalize();
  return r;
}

/// Two-sided limit shadowing on a finite window.
///
/// Requires the shadow error to stay under the method's per-index certificate
/// everywhere, and the certificate itself to decay toward both window ends:
/// its value on the outer `edge` indices must be at most `decay` times its
/// maximum. Reports the measured error profile as metrics.
template <class P>
CheckReport limit_shadow_decay(const ShadowingMethod<P>& method, const PseudoOrbit<P>& x, int edge = 4,
                               double decay = 1e-2) {
  CheckReport r;
  r.name = "limit-decay(" + method.id + ")";
  r.tolerance = 0.0;
  const auto res = method.run(x);
  if (!res.per_index_error || !res.per_index_bound) {
    r.passed = false;
    r.note = "method gives no per-index certificate";
    return r;
  }
  const auto& e = *res.per_index_error;
  const auto& b = *res.per_index_bound;
  double env_max = 0.0, env_edge = 0.0, err_edge = 0.0, err_max = 0.0;
  for (int i = e.lo; i <= e.hi(); ++i) {
    const double env = b.at(i) + res.tail_bound;
    r.observe(env - e.at(i));
    env_max = std::max(env_max, env);
    err_max = std::max(err_max, e.at(i));
    if (i < e.lo + edge || i > e.hi() - edge) {
      env_edge = std::max(env_edge, env);
      err_edge = std::max(err_edge, e.at(i));
    }
  }
  r.metric("err_max", err_max);
  r.metric("err_edge", err_edge);
  r.metric("envelope_max", env_max);
  r.metric("envelope_edge", env_edge);
  if (env_edge > decay * env_max) {
    r.passed = false;
    r.note = "certificate does not decay toward the window ends";
  }
  r.finalize();
  return r;
}

/// A pseudo-orbit with the indices at which self-tuning is probed.
template <class P>
struct SelfTuningCase {
  PseudoOrbit<P> x;
  std::vector<int> indices;
};

/// Local discrepancy g_i = d~_s(sigma^i x, orb(x_i)), certified upper value.
template <class P>
double local_discrepancy(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, int i, double mu = 0.5) {
  const auto xs = x.shifted(i);
  const auto o = orbit_map(sys, x.at(sys, i), std::min(0, xs.lo()), std::max(0, xs.hi()));
  return tilde_dist_s(sys, xs, o, mu).upper();
}

/// Sampled self-tuning: for every eps' in eps_ladder there must be a gamma'
/// in gamma_ladder such that g_i < gamma' forces d(f^i(Sh x), x_i) <= eps' at
/// every probed index, and at least one index qualifies.
///
/// Metrics: "tuning@gamma=..." is the worst error among indices qualifying
/// for that gamma' (the measured tuning curve), "gamma_for@eps=..." the
/// largest gamma' that works for that eps'.
template <class P>
CheckReport check_self_tuning(const ShadowingMethod<P>& method, const MetricSystem<P>& sys,
                              const std::vector<SelfTuningCase<P>>& cases, const std::vector<double>& gamma_ladder,
                              const std::vector<double>& eps_ladder) {
  CheckReport r;
  r.name = "self-tuning(" + method.id + ")";
  r.tolerance = 0.0;
  struct Obs {
    double g, e;
  };
  std::vector<Obs> obs;
  for (const auto& c : cases) {
    const auto res = method.run(c.x);
    const P s = res.point;
    for (int i : c.indices) {
      const double e = sys.dist(apply_iter(sys, s, i), c.x.at(sys, i));
      obs.push_back({local_discrepancy(sys, c.x, i), e});
    }
  }
  r.samples = static_cast<long>(obs.size());
  std::vector<double> curve;
  for (double g : gamma_ladder) {
    double worst = -1.0;
    for (const auto& o : obs)
      if (o.g < g) worst = std::max(worst, o.e);
    curve.push_back(worst);
    r.metric(detail::fmt_key("tuning@gamma=", g), worst);
  }
  for (double eps : eps_ladder) {
    double best_gamma = 0.0;
    double slack = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gamma_ladder.size(); ++k) {
      if (curve[k] < 0.0) continue;  // vacuous rung
      if (curve[k] <= eps && gamma_ladder[k] > best_gamma) best_gamma = gamma_ladder[k];
      slack = std::max(slack, eps - curve[k]);
    }
    r.metric(detail::fmt_key("gamma_for@eps=", eps), best_gamma);
    if (r.observe_worst(slack)) r.note = detail::fmt_key("tightest rung eps'=", eps);
  }
  r.finalize();
  return r;
}

/// The north-south witness against shift-invariance of the Bowen map.
///
/// x = con(p, q) with p in the transition region (0 < phi(p) < 1) and q a
/// short arc away. Sh(sigma^u x) is computed from an orbit that is exact on
/// [-u+1, inf), while f^u(Sh x) carries the bracket's partial weight phi(p);
/// the two differ. The gap must exceed `factor` times the summed convergence
/// tails of the two runs, which is what separates them numerically.
struct NsCounterexample {
  double p = 0.0;
  double q = 0.0;
  double phi_p = 0.0;
  int u = 0;
  double gap = 0.0;
  double tails = 0.0;
  /// Per-index certificate of Sh(sigma^u x) at index 0, for reference.
  double certificate = 0.0;
};

inline NsCounterexample ns_counterexample_data(const NorthSouth& ns, const BowenShadower<double>& bw, double p,
                                               double h, int window = 64) {
  const auto sys = ns.system();
  NsCounterexample out;
  out.p = p;
  out.q = circle::wrap(p + h);
  out.phi_p = ns.phi(p);
  out.u = ns.u;
  const auto x = connect(sys, out.p, out.q, -window, window);
  const auto a = bw.shadow(x);
  const auto b = bw.shadow(x.shifted(ns.u));
  out.gap = sys.dist(apply_iter(sys, a.point, ns.u), b.point);
  out.tails = a.tail_bound + b.tail_bound;
  out.certificate = certificate_at(b, 0).value_or(0.0);
  return out;
}

/// Searches the transition region for the witness with the largest gap and
/// passes when it beats `factor` times the tails.
inline CheckReport ns_counterexample(const NorthSouth& ns, const BowenShadower<double>& bw, double factor = 100.0,
                                     double h = 0.0, int samples = 64) {
  if (h <= 0.0) h = 0.5 * bw.admissible_delta();
  if (h > bw.admissible_delta()) throw AdmissibilityError("ns_counterexample: arc length exceeds the admissible discrepancy");
  CheckReport r;
  r.name = "ns-counterexample";
  r.tolerance = 0.0;
  NsCounterexample best;
  bool found = false;
  // transition region on the positive side: r < d_S(p) < 1/2 - r
  for (int k = 0; k < samples; ++k) {
    const double p = ns.r + (0.5 - 2.0 * ns.r) * (k + 0.5) / samples;
    if (!(ns.phi(p) > 0.0 && ns.phi(p) < 1.0)) continue;
    const auto w = ns_counterexample_data(ns, bw, p, h);
    ++r.samples;
    if (!found || w.gap > best.gap) {
      best = w;
      found = true;
    }
  }
  if (!found) {
    r.passed = false;
    r.note = "no sample point with 0 < phi(p) < 1";
    return r;
  }
  r.worst_slack = best.gap - factor * best.tails;
  r.witness = {{"p", {best.p}}, {"q", {best.q}}};
  r.metric("gap", best.gap);
  r.metric("tails", best.tails);
  r.metric("phi_p", best.phi_p);
  r.metric("u", best.u);
  r.metric("certificate", best.certificate);
  // a zero gap cannot beat zero tails
  if (best.gap <= 0.0) r.passed = false;
  r.finalize();
  return r;
}

}  // namespace shadowkit
