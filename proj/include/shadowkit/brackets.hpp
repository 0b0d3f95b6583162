#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"

namespace shadowkit {

/// Partial map on {(p, q) : d(p, q) <= domain_radius} with [p, p] = p.
template <class P>
struct Bracket {
  std::string id;
  double domain_radius = 0.0;
  std::function<P(const P&, const P&)> eval;
  std::optional<double> declared_c;
  std::optional<double> declared_mu;

  P operator()(const P& p, const P& q) const { return eval(p, q); }

  /// Bracket for the time-reversed system: stable and unstable roles swap.
  [[nodiscard]] Bracket reversed() const {
    Bracket r = *this;
    r.id = id + "^rev";
    auto e = eval;
    r.eval = [e](const P& p, const P& q) { return e(q, p); };
    return r;
  }
};

/// Outcome of a property check. passed iff worst_slack >= -tolerance.
struct CheckReport {
  std::string name;
  bool passed = true;
  long samples = 0;
  /// Bound minus observed at the worst sample; negative means violation.
  double worst_slack = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  /// Labelled coordinates of the inputs achieving worst_slack.
  std::vector<std::pair<std::string, std::vector<double>>> witness;
  /// Measured side quantities (fitted constants, moduli, ratios, ...).
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;

  void observe(double slack) {
    ++samples;
    worst_slack = std::min(worst_slack, slack);
  }
  /// Records a sample and returns true when it becomes the worst one.
  bool observe_worst(double slack) {
    ++samples;
    if (slack < worst_slack) {
      worst_slack = slack;
      return true;
    }
    return false;
  }
  void finalize() { passed = passed && worst_slack >= -tolerance; }
  void metric(const std::string& k, double v) { metrics.emplace_back(k, v); }
  [[nodiscard]] std::optional<double> get(const std::string& k) const {
    for (const auto& [key, v] : metrics)
      if (key == k) return v;
    return std::nullopt;
  }
};

/// A pseudo-orbit map Po_f together with its admissible discrepancy.
template <class P>
struct ShadowingMethod {
  std::string id;
  double gamma = 0.0;
  std::function<ShadowResult<P>(const PseudoOrbit<P>&)> run;

  [[nodiscard]] P apply(const PseudoOrbit<P>& x) const { return run(x).point; }
};

/// [p, q] = Po(con(p, q)) evaluated on the window [lo, hi].
template <class P>
P induced_bracket(const ShadowingMethod<P>& method, const MetricSystem<P>& sys, const P& p, const P& q, int lo = -32,
                  int hi = 32) {
  if (sys.dist(p, q) > method.gamma) throw DomainError("induced_bracket: pair outside the method's domain");
  return method.apply(connect(sys, p, q, lo, hi));
}

/// Bracket whose evaluation is the induced bracket of a method.
template <class P>
Bracket<P> make_induced_bracket(const ShadowingMethod<P>& method, const MetricSystem<P>& sys, double radius,
                                int lo = -32, int hi = 32) {
  Bracket<P> b;
  b.id = "induced(" + method.id + ")";
  b.domain_radius = radius;
  b.eval = [method, sys, lo, hi](const P& p, const P& q) { return induced_bracket(method, sys, p, q, lo, hi); };
  return b;
}

/// Sh(x) = x_0, the exact-hit shadowing map of equicontinuous systems.
template <class P>
ShadowingMethod<P> projection_method(const MetricSystem<P>& sys, double gamma) {
  ShadowingMethod<P> m;
  m.id = "projection";
  m.gamma = gamma;
  m.run = [sys](const PseudoOrbit<P>& x) {
    ShadowResult<P> r;
    r.point = x.at(sys, 0);
    IndexedSeries e;
    e.lo = x.lo();
    const auto orb = PseudoOrbit<P>(0, {r.point}).materialize(sys, x.lo(), x.hi());
    for (int i = x.lo(); i <= x.hi(); ++i) e.values.push_back(sys.dist(orb[static_cast<std::size_t>(i - x.lo())], x[i]));
    r.per_index_error = std::move(e);
    return r;
  };
  return m;
}

namespace detail {

template <class P>
void set_witness(CheckReport& r, std::initializer_list<std::pair<const char*, P>> pts) {
  r.witness.clear();
  for (const auto& [k, p] : pts) r.witness.emplace_back(k, encode(p));
}

/// Pair (p, q) with d(p, q) <= radius, the k-th from the sampler.
template <class P>
std::pair<P, P> sample_pair(const Sampler<P>& s, double radius, std::uint64_t k) {
  P p = s.point(k);
  return {p, s.near(p, radius, k)};
}

}  // namespace detail

/// Identity axiom [p, p] = p, plus a measured continuity modulus.
template <class P>
CheckReport check_identity_axiom(const Bracket<P>& b, const MetricSystem<P>& sys, const Sampler<P>& sampler,
                                 int n = 512) {
  CheckReport r;
  r.name = "identity-axiom(" + b.id + ")";
  r.tolerance = sys.tol;
  for (int k = 0; k < n; ++k) {
    const P p = sampler.point(static_cast<std::uint64_t>(k));
    if (r.observe_worst(-sys.dist(b(p, p), p))) detail::set_witness<P>(r, {{"p", p}});
  }
  // modulus: sup d([p',q'], [p,q]) over input perturbations of size h
  for (double h : {1e-2, 1e-3, 1e-4}) {
    double mod = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto [p, q] = detail::sample_pair(sampler, 0.5 * b.domain_radius, static_cast<std::uint64_t>(k));
      const P p2 = sampler.near(p, h, static_cast<std::uint64_t>(k + n));
      const P q2 = sampler.near(q, h, static_cast<std::uint64_t>(k + 2 * n));
      if (sys.dist(p2, q2) > b.domain_radius) continue;
      mod = std::max(mod, sys.dist(b(p, q), b(p2, q2)));
    }
    char key[32];
    std::snprintf(key, sizeof key, "modulus_h=%g", h);
    r.metric(key, mod);
  }
  r.finalize();
  return r;
}

/// Associativity: [[p, q], r] = [p, r] and [p, [q, r]] = [p, r] where defined.
template <class P>
CheckReport check_associativity(const Bracket<P>& b, const MetricSystem<P>& sys, const Sampler<P>& sampler, int n = 512,
                                double tolerance = -1.0) {
  CheckReport r;
  r.name = "associativity(" + b.id + ")";
  r.tolerance = tolerance < 0 ? sys.tol : tolerance;
  const double g = b.domain_radius;
  long skipped = 0;
  for (int k = 0; k < n; ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    const P p = sampler.point(uk);
    const P q = sampler.near(p, 0.5 * g, uk);
    const P s = sampler.near(q, 0.5 * g, uk + static_cast<std::uint64_t>(n));
    if (sys.dist(p, s) > g) {
      ++skipped;
      continue;
    }
    const P ps = b(p, s);
    double dev = 0.0;
    const P pq = b(p, q);
    if (sys.dist(pq, s) <= g) dev = std::max(dev, sys.dist(b(pq, s), ps));
    const P qs = b(q, s);
    if (sys.dist(p, qs) <= g) dev = std::max(dev, sys.dist(b(p, qs), ps));
    if (r.observe_worst(-dev)) detail::set_witness<P>(r, {{"p", p}, {"q", q}, {"r", s}});
  }
  r.metric("skipped", static_cast<double>(skipped));
  r.finalize();
  return r;
}

/// Forward distances d(f^n[p,q], f^n q) and backward d(f^-n[p,q], f^-n p), n = 0..n_max.
template <class P>
std::pair<std::vector<double>, std::vector<double>> contraction_profile(const Bracket<P>& b,
                                                                          const MetricSystem<P>& sys, const P& p,
                                                                          const P& q, int n_max) {
  std::vector<double> fw, bw;
  P z = b(p, q);
  P a = z, qq = q;
  P c = z, pp = p;
  for (int n = 0; n <= n_max; ++n) {
    fw.push_back(sys.dist(a, qq));
    bw.push_back(sys.dist(c, pp));
    a = sys.fwd(a);
    qq = sys.fwd(qq);
    c = sys.inv(c);
    pp = sys.inv(pp);
  }
  return {fw, bw};
}

/// Log-spaced grid of 64 values in (0.01, 0.99).
inline std::vector<double> mu_grid() {
  std::vector<double> g;
  const double a = std::log(0.01), z = std::log(0.99);
  for (int k = 0; k < 64; ++k) g.push_back(std::exp(a + (z - a) * (k + 0.5) / 64.0));
  return g;
}

/// Hyperbolic contraction: d(f^n[p,q], f^n q) <= c mu^n d(p,q) and the backward analogue.
///
/// With declared (c, mu) the inequalities are checked directly. Otherwise the
/// smallest c is fitted on each mu of the grid and the pair minimizing
/// c mu^n_max is reported (the largest mu among ties). The fit passes when
/// that product is at most 1/2, i.e. the certified envelope at least halves
/// over the horizon; an isometry sits at exactly 1 up to the noise floor.
/// Observations below sys.tol are treated as the resolution floor.
template <class P>
CheckReport check_hyperbolic(const Bracket<P>& b, const MetricSystem<P>& sys, const Sampler<P>& sampler, int n_max,
                             int n = 256) {
  if (n_max < 2) throw std::invalid_argument("check_hyperbolic: n_max must be >= 2");
  CheckReport r;
  r.name = "hyperbolic(" + b.id + ")";
  r.tolerance = sys.tol;
  struct Obs {
    double d;
    std::vector<double> fw, bw;
    P p, q;
  };
  std::vector<Obs> obs;
  for (int k = 0; k < n; ++k) {
    auto [p, q] = detail::sample_pair(sampler, b.domain_radius, static_cast<std::uint64_t>(k));
    const double d = sys.dist(p, q);
    if (d <= 0.0 || d > b.domain_radius) continue;
    auto [fw, bw] = contraction_profile(b, sys, p, q, n_max);
    obs.push_back({d, std::move(fw), std::move(bw), p, q});
  }
  auto slack_for = [&](double c, double mu, bool record) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& o : obs) {
      for (int t = 0; t <= n_max; ++t) {
        const double bound = c * std::pow(mu, t) * o.d;
        const double s = bound - std::max(o.fw[static_cast<std::size_t>(t)], o.bw[static_cast<std::size_t>(t)]);
        if (s < worst) {
          worst = s;
          if (record) {
            detail::set_witness<P>(r, {{"p", o.p}, {"q", o.q}});
            r.note = "worst at n=" + std::to_string(t);
          }
        }
      }
    }
    return worst;
  };
  if (b.declared_c && b.declared_mu) {
    const double s = slack_for(*b.declared_c, *b.declared_mu, true);
    r.samples = static_cast<long>(obs.size());
    r.worst_slack = s;
    r.metric("c", *b.declared_c);
    r.metric("mu", *b.declared_mu);
    r.finalize();
    return r;
  }
  double best_c = std::numeric_limits<double>::infinity(), best_mu = 0.0, best_score = best_c;
  for (double mu : mu_grid()) {
    double c = 1.0;
    for (const auto& o : obs) {
      for (int t = 0; t <= n_max; ++t) {
        const double v = std::max(o.fw[static_cast<std::size_t>(t)], o.bw[static_cast<std::size_t>(t)]);
        c = std::max(c, std::max(0.0, v - 0.5 * sys.tol) / (std::pow(mu, t) * o.d));
      }
    }
    const double score = c * std::pow(mu, n_max);
    // below the true rate every mu gives the same envelope at n_max; ties go
    // to the larger mu, whose c is smaller
    if (std::isfinite(score) && score <= best_score * (1.0 + 1e-6)) {
      best_score = score;
      best_c = c;
      best_mu = mu;
    }
  }
  r.samples = static_cast<long>(obs.size());
  r.metric("c", best_c);
  r.metric("mu", best_mu);
  r.metric("c_mu_nmax", best_score);
  r.worst_slack = slack_for(best_c, best_mu, true);
  r.passed = best_score <= 0.5;
  if (!r.passed) r.note = "no contraction over the horizon: c*mu^n_max = " + std::to_string(best_score);
  r.finalize();
  return r;
}

/// f-invariance: f([p, q]) = [f(p), f(q)] whenever both sides are defined.
template <class P>
CheckReport check_f_invariance(const Bracket<P>& b, const MetricSystem<P>& sys, const Sampler<P>& sampler,
                               int n = 512, double tolerance = -1.0) {
  CheckReport r;
  r.name = "f-invariance(" + b.id + ")";
  r.tolerance = tolerance < 0 ? sys.tol : tolerance;
  for (int k = 0; k < n; ++k) {
    const auto [p, q] = detail::sample_pair(sampler, b.domain_radius, static_cast<std::uint64_t>(k));
    const P fp = sys.fwd(p), fq = sys.fwd(q);
    if (sys.dist(fp, fq) > b.domain_radius) continue;
    const double dev = sys.dist(sys.fwd(b(p, q)), b(fp, fq));
    if (r.observe_worst(-dev)) detail::set_witness<P>(r, {{"p", p}, {"q", q}});
  }
  r.finalize();
  return r;
}

/// Uniform contraction: smallest m <= m_max with both contraction distances < eps for n in [m, m_max].
template <class P>
CheckReport check_uniform_contraction(const Bracket<P>& b, const MetricSystem<P>& sys, double eps,
                                      const Sampler<P>& sampler, int m_max, int n = 256) {
  if (!(eps > 0.0)) throw std::invalid_argument("check_uniform_contraction: eps must be positive");
  CheckReport r;
  r.name = "uniform-contraction(" + b.id + ")";
  r.tolerance = 0.0;
  int m = 0;
  std::vector<std::vector<double>> worst_after;  // per sample, max over both directions
  for (int k = 0; k < n; ++k) {
    const auto [p, q] = detail::sample_pair(sampler, b.domain_radius, static_cast<std::uint64_t>(k));
    auto [fw, bw] = contraction_profile(b, sys, p, q, m_max);
    std::vector<double> v(fw.size());
    for (std::size_t t = 0; t < fw.size(); ++t) {
      v[t] = std::max(fw[t], bw[t]);
      if (v[t] >= eps) m = std::max(m, static_cast<int>(t) + 1);
    }
    worst_after.push_back(std::move(v));
    ++r.samples;
  }
  if (m > m_max) {
    r.passed = false;
    double w = 0.0;
    for (const auto& v : worst_after) w = std::max(w, v.back());
    r.worst_slack = eps - w;
    r.note = "distances still >= eps at n = m_max";
  } else {
    double w = 0.0;
    for (const auto& v : worst_after)
      for (int t = m; t <= m_max; ++t) w = std::max(w, v[static_cast<std::size_t>(t)]);
    r.worst_slack = eps - w;
    // strict inequality: a zero slack is a failure
    if (r.worst_slack <= 0.0) r.passed = false;
  }
  r.metric("m", static_cast<double>(m));
  r.finalize();
  return r;
}

/// Shadowing-bracket membership on a finite window: [p,q] within eps of q forward and of p backward.
/// With l_bracket the two distance sequences must also be nonincreasing and
/// end strictly below where they started (or at the resolution floor).
template <class P>
CheckReport check_shadowing_bracket(const Bracket<P>& b, const MetricSystem<P>& sys, double eps, int window,
                                    const Sampler<P>& sampler, int n = 256, bool l_bracket = false) {
  if (window < 1) throw std::invalid_argument("check_shadowing_bracket: window must be >= 1");
  CheckReport r;
  r.name = std::string(l_bracket ? "l-bracket(" : "shadowing-bracket(") + b.id + ")";
  r.tolerance = sys.tol;
  long monotone_failures = 0;
  for (int k = 0; k < n; ++k) {
    const auto [p, q] = detail::sample_pair(sampler, b.domain_radius, static_cast<std::uint64_t>(k));
    auto [fw, bw] = contraction_profile(b, sys, p, q, window);
    double worst = 0.0;
    for (std::size_t t = 0; t < fw.size(); ++t) worst = std::max({worst, fw[t], bw[t]});
    double slack = eps - worst;
    if (l_bracket) {
      auto decays = [&](const std::vector<double>& v) {
        for (std::size_t t = 1; t < v.size(); ++t)
          if (v[t] > v[t - 1] + sys.tol) return false;
        return v.back() <= sys.tol || v.back() < v.front();
      };
      if (!decays(fw) || !decays(bw)) {
        ++monotone_failures;
        slack = std::min(slack, -1.0);
      }
    }
    if (r.observe_worst(slack)) detail::set_witness<P>(r, {{"p", p}, {"q", q}});
  }
  if (l_bracket) r.metric("non_decaying_samples", static_cast<double>(monotone_failures));
  r.finalize();
  return r;
}

}  // namespace shadowkit
