#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"

namespace shadowkit {

using Vec2 = std::array<double, 2>;

template <>
struct Codec<Vec2> {
  static std::vector<double> encode(const Vec2& p) { return {p[0], p[1]}; }
  static Vec2 decode(const std::vector<double>& v) {
    if (v.size() != 2) throw std::invalid_argument("torus point needs 2 coordinates");
    return {v[0], v[1]};
  }
};

namespace torus {

/// Representative in [0, 1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}
/// Representative in [-1/2, 1/2].
inline double wrap_half(double x) { return x - std::nearbyint(x); }

inline Vec2 wrap01(const Vec2& p) { return {wrap01(p[0]), wrap01(p[1])}; }
/// Shortest lift of q - p.
inline Vec2 delta(const Vec2& p, const Vec2& q) { return {wrap_half(q[0] - p[0]), wrap_half(q[1] - p[1])}; }
inline double dist(const Vec2& p, const Vec2& q) { return std::hypot(wrap_half(q[0] - p[0]), wrap_half(q[1] - p[1])); }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline Sampler<Vec2> sampler(std::uint64_t seed) {
  Sampler<Vec2> s;
  s.point = [seed](std::uint64_t k) {
    auto u = halton(k, 2, seed);
    return Vec2{u[0], u[1]};
  };
  s.near = [seed](const Vec2& p, double r, std::uint64_t k) {
    auto u = halton(k, 2, mix_seed(seed, 77));
    const double rad = r * std::sqrt(u[0]);
    const double th = 2.0 * std::numbers::pi * u[1];
    return wrap01(Vec2{p[0] + rad * std::cos(th), p[1] + rad * std::sin(th)});
  };
  return s;
}

/// Uniform draw from the closed disk of the given radius around p.
inline Perturber<Vec2> perturber() {
  return [](const Vec2& p, double r, Rng& rng) {
    const double rad = r * std::sqrt(rng.uniform());
    const double th = 2.0 * std::numbers::pi * rng.uniform();
    return wrap01(Vec2{p[0] + rad * std::cos(th), p[1] + rad * std::sin(th)});
  };
}

}  // namespace torus

/// The automorphism A = [[2,1],[1,1]] of the 2-torus.
///
/// A is symmetric, so its eigenvectors are orthonormal and the torus metric
/// splits as |v|^2 = <v,v_u>^2 + <v,v_s>^2.
struct CatMap {
  double lambda_u = (3.0 + std::sqrt(5.0)) / 2.0;
  double lambda_s = (3.0 - std::sqrt(5.0)) / 2.0;
  Vec2 v_u;
  Vec2 v_s;
  double gamma = 0.2;

  CatMap() {
    const double nu = std::hypot(1.0, lambda_u - 2.0);
    const double ns = std::hypot(1.0, lambda_s - 2.0);
    v_u = {1.0 / nu, (lambda_u - 2.0) / nu};
    v_s = {1.0 / ns, (lambda_s - 2.0) / ns};
  }

  static Vec2 apply_A(const Vec2& p) { return {2.0 * p[0] + p[1], p[0] + p[1]}; }
  static Vec2 apply_Ainv(const Vec2& p) { return {p[0] - p[1], -p[0] + 2.0 * p[1]}; }

  [[nodiscard]] MetricSystem<Vec2> system() const {
    MetricSystem<Vec2> s;
    s.id = "cat";
    s.dist = [](const Vec2& a, const Vec2& b) { return torus::dist(a, b); };
    s.fwd = [](const Vec2& p) { return torus::wrap01(apply_A(p)); };
    s.inv = [](const Vec2& p) { return torus::wrap01(apply_Ainv(p)); };
    s.lip_fwd = lambda_u;
    s.lip_inv = lambda_u;
    s.diam = std::sqrt(0.5);
    s.tol = 1e-10;
    return s;
  }

  /// The point of the local unstable leaf of p on the local stable leaf of q:
  /// p moved along v_u by the unstable component of q - p.
  [[nodiscard]] Vec2 bracket_eval(const Vec2& p, const Vec2& q) const {
    const Vec2 d = torus::delta(p, q);
    if (std::hypot(d[0], d[1]) > gamma) throw DomainError("cat bracket: pair outside domain radius");
    const double a = torus::dot(d, v_u);
    return torus::wrap01(Vec2{p[0] + a * v_u[0], p[1] + a * v_u[1]});
  }

  [[nodiscard]] Bracket<Vec2> bracket() const {
    Bracket<Vec2> b;
    b.id = "cat";
    b.domain_radius = gamma;
    auto self = *this;
    b.eval = [self](const Vec2& p, const Vec2& q) { return self.bracket_eval(p, q); };
    b.declared_c = 1.0;
    b.declared_mu = lambda_s;
    return b;
  }

  /// Lifted jump vectors e_k = x_{k+1} - A x_k, shortest representative.
  [[nodiscard]] std::vector<Vec2> lifted_jumps(const PseudoOrbit<Vec2>& x) const {
    std::vector<Vec2> e;
    const int last = x.extension() == Extension::Periodic ? x.hi() : x.hi() - 1;
    const auto sys = system();
    for (int k = x.lo(); k <= last; ++k) {
      const Vec2 ax = apply_A(x[k]);
      const Vec2 nx = x.at(sys, k + 1);
      Vec2 d{torus::wrap_half(nx[0] - ax[0]), torus::wrap_half(nx[1] - ax[1])};
      if (std::abs(d[0]) >= 0.25 || std::abs(d[1]) >= 0.25) {
        std::ostringstream os;
        os << "oracle: jump at index " << k << " too large for an unambiguous lift";
        throw DomainError(os.str());
      }
      e.push_back(d);
    }
    return e;
  }

  /// Corrections w_i with f^i(x_0 + w_0) = x_i + w_i, the unique bounded
  /// solution of w_{i+1} = A w_i - e_i, for i over the window.
  /// Returns the (u, s) components of w_lo..w_hi.
  [[nodiscard]] std::vector<std::array<double, 2>> corrections(const PseudoOrbit<Vec2>& x) const {
    const auto e = lifted_jumps(x);
    const int n = x.size();
    std::vector<double> eu(e.size()), es(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
      eu[k] = torus::dot(e[k], v_u);
      es[k] = torus::dot(e[k], v_s);
    }
    std::vector<std::array<double, 2>> w(static_cast<std::size_t>(n));
    if (x.extension() == Extension::OrbitCapped) {
      // w^u_i = sum_{k>=i} lambda_u^{i-k-1} e^u_k, backward recursion from w^u_hi = 0
      double wu = 0.0;
      for (int k = n - 1; k >= 0; --k) {
        w[static_cast<std::size_t>(k)][0] = wu;
        if (k > 0) wu = (wu + eu[static_cast<std::size_t>(k - 1)]) / lambda_u;
      }
      // w^s_i = -sum_{k<i} lambda_s^{i-k-1} e^s_k, forward recursion from w^s_lo = 0
      double ws = 0.0;
      for (int k = 0; k < n; ++k) {
        w[static_cast<std::size_t>(k)][1] = ws;
        if (k < n - 1) ws = lambda_s * ws - es[static_cast<std::size_t>(k)];
      }
      return w;
    }
    // periodic jumps: one period of each series, summed geometrically
    const double gu = 1.0 / (1.0 - std::pow(lambda_u, -n));
    const double gs = 1.0 / (1.0 - std::pow(lambda_s, n));
    for (int i = 0; i < n; ++i) {
      double su = 0.0, ss = 0.0;
      for (int j = 0; j < n; ++j) {
        su += std::pow(lambda_u, -j - 1) * eu[static_cast<std::size_t>((i + j) % n)];
        ss += std::pow(lambda_s, j) * es[static_cast<std::size_t>(((i - j - 1) % n + n) % n)];
      }
      w[static_cast<std::size_t>(i)] = {su * gu, -ss * gs};
    }
    return w;
  }

  /// The unique shadow of x, from the hyperbolic splitting in closed form.
  [[nodiscard]] ShadowResult<Vec2> oracle(const PseudoOrbit<Vec2>& x) const {
    if (!x.covers(0)) throw WindowError("oracle: window must contain index 0");
    const auto w = corrections(x);
    ShadowResult<Vec2> r;
    const auto& w0 = w[static_cast<std::size_t>(-x.lo())];
    const Vec2& x0 = x[0];
    r.point = torus::wrap01(Vec2{x0[0] + w0[0] * v_u[0] + w0[1] * v_s[0], x0[1] + w0[0] * v_u[1] + w0[1] * v_s[1]});
    IndexedSeries err, bnd;
    err.lo = bnd.lo = x.lo();
    // rounding in the sums and the final projection
    const double eps = 64.0 * 2.2e-16 * (1.0 + static_cast<double>(x.size()));
    for (const auto& wi : w) {
      err.values.push_back(std::hypot(wi[0], wi[1]));
      bnd.values.push_back(std::hypot(wi[0], wi[1]) + eps);
    }
    r.per_index_error = std::move(err);
    r.per_index_bound = std::move(bnd);
    r.tail_bound = eps;
    return r;
  }

  /// A priori shadow distance: sqrt((E_u/(l-1))^2 + (E_s l/(l-1))^2) with E the sup jump components.
  [[nodiscard]] double oracle_error_bound(const PseudoOrbit<Vec2>& x) const {
    double Eu = 0.0, Es = 0.0;
    for (const auto& e : lifted_jumps(x)) {
      Eu = std::max(Eu, std::abs(torus::dot(e, v_u)));
      Es = std::max(Es, std::abs(torus::dot(e, v_s)));
    }
    const double l = lambda_u;
    return std::hypot(Eu / (l - 1.0), Es * l / (l - 1.0));
  }

  [[nodiscard]] ShadowingMethod<Vec2> oracle_method() const {
    ShadowingMethod<Vec2> m;
    m.id = "oracle";
    m.gamma = 0.2;
    auto self = *this;
    m.run = [self](const PseudoOrbit<Vec2>& x) { return self.oracle(x); };
    return m;
  }
};

/// g = A + b with b(p) = (eps/sqrt 2)(sin 2 pi p_y, sin 2 pi p_x), so sup |b| = eps.
struct PerturbedCatMap {
  double eps = 1e-3;

  [[nodiscard]] Vec2 bump(const Vec2& p) const {
    const double a = eps / std::sqrt(2.0);
    return {a * std::sin(2.0 * std::numbers::pi * p[1]), a * std::sin(2.0 * std::numbers::pi * p[0])};
  }

  [[nodiscard]] MetricSystem<Vec2> system() const {
    auto self = *this;
    MetricSystem<Vec2> s = CatMap().system();
    s.id = "cat+bump";
    s.fwd = [self](const Vec2& p) {
      const Vec2 a = CatMap::apply_A(p);
      const Vec2 b = self.bump(p);
      return torus::wrap01(Vec2{a[0] + b[0], a[1] + b[1]});
    };
    // x = A^{-1}(y - b(x)) is a contraction for small eps
    s.inv = [self](const Vec2& y) {
      Vec2 x = torus::wrap01(CatMap::apply_Ainv(y));
      for (int it = 0; it < 60; ++it) {
        const Vec2 b = self.bump(x);
        const Vec2 nx = torus::wrap01(CatMap::apply_Ainv(Vec2{y[0] - b[0], y[1] - b[1]}));
        const double moved = torus::dist(nx, x);
        x = nx;
        if (moved < 1e-17) break;
      }
      return x;
    };
    const double lb = 2.0 * std::numbers::pi * eps;
    s.lip_fwd = CatMap().lambda_u + lb;
    s.lip_inv = CatMap().lambda_u / (1.0 - CatMap().lambda_u * lb);
    return s;
  }
};

/// Rigid rotation of the torus; an isometry, used as a non-hyperbolic control.
inline MetricSystem<Vec2> torus_translation(double a = 0.6180339887498949, double b = 0.4142135623730950) {
  MetricSystem<Vec2> s;
  s.id = "translation";
  s.dist = [](const Vec2& p, const Vec2& q) { return torus::dist(p, q); };
  s.fwd = [a, b](const Vec2& p) { return torus::wrap01(Vec2{p[0] + a, p[1] + b}); };
  s.inv = [a, b](const Vec2& p) { return torus::wrap01(Vec2{p[0] - a, p[1] - b}); };
  s.diam = std::sqrt(0.5);
  return s;
}

/// [p, q] = p on the torus.
inline Bracket<Vec2> torus_projection_bracket(double radius = 0.2) {
  Bracket<Vec2> b;
  b.id = "projection";
  b.domain_radius = radius;
  b.eval = [](const Vec2& p, const Vec2&) { return p; };
  return b;
}

}  // namespace shadowkit
