#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"

namespace shadowkit {

struct BowenConfig {
  int m = 1;
  double tol = 1e-12;
  int max_stages = 512;
  double c = 1.0;
  double mu = 0.5;
  /// Lipschitz constant of the map driving the forward iteration.
  double L = 1.0;
  /// Largest admissible D^1, gamma / (2 L_m).
  double delta_cap = 0.0;
  bool assert_lemmas = true;
  /// Iterate until stage*m covers this many indices, even when the tail is already small.
  int horizon = 0;

  [[nodiscard]] double kappa() const { return 10.0 / 3.0 * c + 1.0; }
};

/// Smallest m >= 1 with c mu^m <= 1/(2c).
inline int choose_m(double c, double mu) {
  if (!(c >= 1.0) || !(mu > 0.0 && mu < 1.0)) throw AdmissibilityError("choose_m: need c >= 1 and 0 < mu < 1");
  int m = 1;
  while (c * std::pow(mu, m) > 1.0 / (2.0 * c)) ++m;
  return m;
}

/// Config for a bracket with declared (c, mu) driving a map with Lipschitz constant L.
inline BowenConfig make_bowen_config(double c, double mu, double L, double gamma, int m = 0) {
  BowenConfig cfg;
  cfg.c = c;
  cfg.mu = mu;
  cfg.L = L;
  cfg.m = m > 0 ? m : choose_m(c, mu);
  if (c * std::pow(mu, cfg.m) > 1.0 / (2.0 * c) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "block length m = " << cfg.m << " violates c*mu^m <= 1/(2c) for c = " << c << ", mu = " << mu;
    throw AdmissibilityError(os.str());
  }
  cfg.delta_cap = gamma / (2.0 * lipschitz_geom_sum(L, cfg.m));
  return cfg;
}

/// The kernel sum kappa * sum_{l>=1} delta^m_l / 2^{|l-s-1|}, s = floor(i/m), for i >= 0.
inline double kernel_bound(const IndexedSeries& d, int i, const BowenConfig& cfg) {
  if (i < 0) throw std::invalid_argument("kernel_bound: index must be >= 0 (use the reversed orbit for i < 0)");
  const int m = cfg.m;
  const int s = i / m;
  const double Lm = std::pow(cfg.L, m);
  // beyond l_last all blocks vanish, unless the jumps are periodic
  int l_last = d.values.empty() ? 0 : (d.periodic ? s + 1 + 64 : std::max(0, d.hi() / m + 1));
  double sum = 0.0;
  for (int l = 1; l <= l_last; ++l) sum += block_jumps(d, cfg.L, m, l) / std::ldexp(1.0, std::abs(l - s - 1));
  if (d.periodic) sum += Lm * m * d.sup() * std::ldexp(1.0, -(l_last - s - 1)) * 2.0;
  return cfg.kappa() * sum;
}

/// Bowen's iterative shadowing for a bracket with hyperbolic contraction.
///
/// Holds the forward data (f, [.,.]) and the time-reversed data (f^-1 with the
/// arguments of the bracket swapped), each with its own Lipschitz constant.
template <class P>
class BowenShadower {
 public:
  BowenShadower(MetricSystem<P> sys, Bracket<P> b, std::optional<int> m = std::nullopt, double tol = 1e-12)
      : sys_(std::move(sys)), b_(std::move(b)) {
    if (!b_.declared_c || !b_.declared_mu)
      throw AdmissibilityError("bracket '" + b_.id + "' has no declared (c, mu); fit it with check_hyperbolic first");
    inv_ = sys_.inverse();
    rb_ = b_.reversed();
    fwd_cfg_ = make_bowen_config(*b_.declared_c, *b_.declared_mu, sys_.lip_fwd, b_.domain_radius, m.value_or(0));
    bwd_cfg_ = make_bowen_config(*b_.declared_c, *b_.declared_mu, sys_.lip_inv, b_.domain_radius, fwd_cfg_.m);
    fwd_cfg_.tol = bwd_cfg_.tol = tol;
  }

  [[nodiscard]] const MetricSystem<P>& system() const { return sys_; }
  [[nodiscard]] const Bracket<P>& bracket() const { return b_; }
  [[nodiscard]] const BowenConfig& config() const { return fwd_cfg_; }
  [[nodiscard]] const BowenConfig& reverse_config() const { return bwd_cfg_; }

  void set_assert_lemmas(bool on) { fwd_cfg_.assert_lemmas = bwd_cfg_.assert_lemmas = on; }
  void set_horizon(int h) { fwd_cfg_.horizon = bwd_cfg_.horizon = h; }
  void set_tol(double t) { fwd_cfg_.tol = bwd_cfg_.tol = t; }
  void set_max_stages(int n) { fwd_cfg_.max_stages = bwd_cfg_.max_stages = n; }

  /// Largest D^1 accepted by both half-iterations: the reversed orbit has jumps
  /// up to lip_inv times the forward ones.
  [[nodiscard]] double admissible_delta() const { return std::min(fwd_cfg_.delta_cap, bwd_cfg_.delta_cap / sys_.lip_inv); }

  /// Sh^+: q_0 = x_0, q_n = [f^m(q_{n-1}), x_{nm}], p_n = f^{-nm}(q_n).
  [[nodiscard]] ShadowResult<P> forward(const PseudoOrbit<P>& x) const { return iterate(sys_, b_, fwd_cfg_, x); }

  /// Sh^- = Sh^+ of f^-1 on xhat_i = x_{-i}, with the reversed bracket.
  [[nodiscard]] ShadowResult<P> backward(const PseudoOrbit<P>& x) const {
    return iterate(inv_, rb_, bwd_cfg_, x.reversed());
  }

  /// Symmetric backward half: Sh^+ of f^-1 on yhat_i = f(x_{-i-1}).
  [[nodiscard]] ShadowResult<P> backward_symmetric(const PseudoOrbit<P>& x) const {
    return iterate(inv_, rb_, bwd_cfg_, symmetric_reverse(x));
  }

  /// Sh = [Sh^-, Sh^+], with per-index errors and certified bounds over the
  /// indices reached by the stages (further limited to [-horizon, horizon]
  /// when a horizon is set).
  [[nodiscard]] ShadowResult<P> shadow(const PseudoOrbit<P>& x) const { return assemble(x, false); }

  /// [Sh^-hat, Sh^+]; equals [p, q] on con(p, q).
  [[nodiscard]] ShadowResult<P> symmetric(const PseudoOrbit<P>& x) const { return assemble(x, true); }

  /// Kernel bound for the forward half at i >= 0, or for the backward half at i < 0.
  [[nodiscard]] double one_sided_bound(const PseudoOrbit<P>& x, int i) const {
    if (i >= 0) return kernel_bound(jumps(sys_, x), i, fwd_cfg_);
    return kernel_bound(jumps(inv_, x.reversed()), -i, bwd_cfg_);
  }

  /// A priori bound on d(f^i Sh(x), x_i) from the two kernel sums alone:
  /// c mu^|i| kappa (A(x) + A(xhat)) plus the one-sided kernel at i.
  [[nodiscard]] double a_priori_bound(const PseudoOrbit<P>& x, int i) const {
    const double a = kernel_bound(jumps(sys_, x), 0, fwd_cfg_);
    const double ah = kernel_bound(jumps(inv_, x.reversed()), 0, bwd_cfg_);
    return fwd_cfg_.c * std::pow(fwd_cfg_.mu, std::abs(i)) * (a + ah) + one_sided_bound(x, i);
  }

  [[nodiscard]] ShadowingMethod<P> method(bool symmetric_variant = false) const {
    ShadowingMethod<P> M;
    M.id = symmetric_variant ? "symmetric-bowen" : "bowen";
    M.gamma = admissible_delta();
    auto self = *this;
    M.run = [self, symmetric_variant](const PseudoOrbit<P>& x) {
      return symmetric_variant ? self.symmetric(x) : self.shadow(x);
    };
    return M;
  }

  /// yhat_i = f(x_{-i-1}), a pseudo-orbit of f^-1.
  [[nodiscard]] PseudoOrbit<P> symmetric_reverse(const PseudoOrbit<P>& x) const {
    const auto f = sys_.fwd;
    return x.mapped([&](const P& p) { return f(p); }).reversed().shifted(1);
  }

 private:
  static double roundoff(const MetricSystem<P>& s, int steps, double L) {
    return 16.0 * DBL_EPSILON * std::max(1.0, s.diam) * lipschitz_geom_sum(std::max(L, 1.0), steps + 1);
  }

  static ShadowResult<P> iterate(const MetricSystem<P>& s, const Bracket<P>& b, const BowenConfig& cfg,
                                 const PseudoOrbit<P>& x) {
    const IndexedSeries J = jumps(s, x);
    const double delta = J.sup();
    if (delta > cfg.delta_cap) {
      std::ostringstream os;
      os << "pseudo-orbit discrepancy D1 = " << delta << " exceeds delta_cap = gamma/(2 L_m) = " << cfg.delta_cap
         << " (m = " << cfg.m << ", L = " << cfg.L << ")";
      throw AdmissibilityError(os.str());
    }
    const int m = cfg.m;
    const double Lm_sum = lipschitz_geom_sum(cfg.L, m);
    const double step_bound = 2.0 * delta * Lm_sum;
    const double mum = std::pow(cfg.mu, m);
    // p_n is pulled back through f^-nm, which amplifies rounding by up to lip_inv^nm
    const double inv_L = std::max(s.lip_inv, 1.0);

    // entries x_{nm} for n >= 0, produced lazily
    const auto xs = x.materialize(s, 0, std::max(0, x.hi()));
    P ext = xs.back();
    int ext_index = std::max(0, x.hi());
    auto entry = [&](int k) -> P {
      if (k <= x.hi() || x.extension() == Extension::Periodic) return k <= x.hi() ? xs[static_cast<std::size_t>(k)] : x.at(s, k);
      while (ext_index < k) {
        ext = s.fwd(ext);
        ++ext_index;
      }
      return ext;
    };

    // running kernel: sum_{l=1}^u delta^m_l / 2^{u-l}
    double kernel = 0.0;
    P q = entry(0);
    P p = q;
    ShadowResult<P> r;
    r.point = p;
    for (int n = 1; n <= cfg.max_stages; ++n) {
      const P fq = apply_iter(s, q, m);
      const P target = entry(n * m);
      const double d = s.dist(fq, target);
      kernel = kernel / 2.0 + block_jumps(J, cfg.L, m, n);
      if (cfg.assert_lemmas) {
        const double slop = roundoff(s, m, cfg.L) * (1.0 + n);
        if (d > step_bound + slop) {
          std::ostringstream os;
          os << "stage " << n << ": d(f^m q, x_nm) = " << d << " exceeds 2 delta L_m = " << step_bound;
          throw LemmaViolation(os.str());
        }
        if (d > kernel + slop) {
          std::ostringstream os;
          os << "stage " << n << ": d(f^m q, x_nm) = " << d << " exceeds the block kernel sum " << kernel;
          throw LemmaViolation(os.str());
        }
      }
      if (d > b.domain_radius) {
        std::ostringstream os;
        os << "stage " << n << ": bracket argument distance " << d << " outside domain radius " << b.domain_radius
           << "; the configuration is not admissible";
        throw DomainError(os.str());
      }
      q = b(fq, target);
      // [f^m q, x_nm] = f^m q gives p_n = p_{n-1} exactly; skipping the round
      // trip through f^{-nm} f^{nm} avoids amplifying rounding by L^{nm}
      const P pn = q == fq ? p : apply_iter(s, q, -static_cast<long>(n) * m);
      if (cfg.assert_lemmas) {
        const double bound = cfg.c * std::pow(mum, n) * step_bound;
        const double slop = roundoff(s, n * m, inv_L) + roundoff(s, (n - 1) * m, inv_L);
        const double step = s.dist(pn, p);
        if (step > bound + slop) {
          std::ostringstream os;
          os << "stage " << n << ": d(p_n, p_{n-1}) = " << step << " exceeds c mu^{nm} 2 delta L_m = " << bound;
          throw LemmaViolation(os.str());
        }
      }
      p = pn;
      r.point = p;
      r.stages_used = n;
      r.tail_bound = cfg.c * step_bound * std::pow(mum, n + 1) / (1.0 - mum);
      if (r.tail_bound <= cfg.tol && n * m >= cfg.horizon) return r;
    }
    throw ConvergenceError("Bowen iteration did not reach tol = " + std::to_string(cfg.tol) + " within " +
                           std::to_string(cfg.max_stages) + " stages");
  }

  ShadowResult<P> assemble(const PseudoOrbit<P>& x, bool symmetric_variant) const {
    const ShadowResult<P> plus = forward(x);
    const ShadowResult<P> minus = symmetric_variant ? backward_symmetric(x) : backward(x);
    const double sep = sys_.dist(minus.point, plus.point);
    if (sep > b_.domain_radius) {
      std::ostringstream os;
      os << "half-shadows are " << sep << " apart, beyond the bracket radius " << b_.domain_radius
         << "; the discrepancy is too large";
      throw DomainError(os.str());
    }
    ShadowResult<P> r;
    r.point = b_(minus.point, plus.point);
    r.stages_used = std::max(plus.stages_used, minus.stages_used);
    r.tail_bound = plus.tail_bound + minus.tail_bound;

    // horizon 0: everything the stages reached
    const int H = fwd_cfg_.horizon > 0 ? fwd_cfg_.horizon : std::numeric_limits<int>::max() / 2;
    const int a = std::max(x.lo(), std::max(-H, -minus.stages_used * bwd_cfg_.m));
    const int z = std::min(x.hi(), std::min(H, plus.stages_used * fwd_cfg_.m));
    IndexedSeries err, bnd;
    err.lo = bnd.lo = a;
    const auto orbit = PseudoOrbit<P>(0, {r.point}).materialize(sys_, a, z);
    const IndexedSeries Jf = jumps(sys_, x);
    const IndexedSeries Jb = symmetric_variant ? jumps(inv_, symmetric_reverse(x)) : jumps(inv_, x.reversed());
    const double c = fwd_cfg_.c, mu = fwd_cfg_.mu;
    for (int i = a; i <= z; ++i) {
      err.values.push_back(sys_.dist(orbit[static_cast<std::size_t>(i - a)], x[i]));
      double one_sided;
      if (i >= 0) {
        one_sided = kernel_bound(Jf, i, fwd_cfg_);
      } else if (!symmetric_variant) {
        one_sided = kernel_bound(Jb, -i, bwd_cfg_);
      } else {
        one_sided = sys_.lip_inv * kernel_bound(Jb, -i - 1, bwd_cfg_);
      }
      // f^i of the computed point carries its own rounding, growing like L^|i|
      const double fp = roundoff(sys_, std::abs(i), i >= 0 ? sys_.lip_fwd : sys_.lip_inv);
      bnd.values.push_back(c * std::pow(mu, std::abs(i)) * sep + one_sided + fp);
    }
    r.per_index_error = std::move(err);
    r.per_index_bound = std::move(bnd);
    return r;
  }

  MetricSystem<P> sys_;
  MetricSystem<P> inv_;
  Bracket<P> b_;
  Bracket<P> rb_;
  BowenConfig fwd_cfg_;
  BowenConfig bwd_cfg_;
};

template <class P>
ShadowResult<P> forward_map(const BowenShadower<P>& bw, const PseudoOrbit<P>& x) {
  return bw.forward(x);
}
template <class P>
ShadowResult<P> backward_map(const BowenShadower<P>& bw, const PseudoOrbit<P>& x) {
  return bw.backward(x);
}
template <class P>
ShadowResult<P> bowen_shadow(const BowenShadower<P>& bw, const PseudoOrbit<P>& x) {
  return bw.shadow(x);
}
template <class P>
ShadowResult<P> symmetric_shadow(const BowenShadower<P>& bw, const PseudoOrbit<P>& x) {
  return bw.symmetric(x);
}

}  // namespace shadowkit
