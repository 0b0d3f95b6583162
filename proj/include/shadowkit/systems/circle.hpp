#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"

namespace shadowkit {

template <>
struct Codec<double> {
  static std::vector<double> encode(double p) { return {p}; }
  static double decode(const std::vector<double>& v) {
    if (v.size() != 1) throw std::invalid_argument("circle point needs 1 coordinate");
    return v[0];
  }
};

namespace circle {

/// Representative of x mod 1 in [-1/2, 1/2).
inline double wrap(double x) {
  double r = x - std::floor(x + 0.5);
  return r >= 0.5 ? r - 1.0 : r;
}
/// Signed shortest arc from p to q.
inline double arc(double p, double q) { return wrap(q - p); }
inline double dist(double p, double q) { return std::abs(arc(p, q)); }

inline Sampler<double> sampler(std::uint64_t seed) {
  Sampler<double> s;
  s.point = [seed](std::uint64_t k) { return wrap(halton(k, 1, seed)[0] - 0.5); };
  s.near = [seed](double p, double r, std::uint64_t k) {
    return wrap(p + r * (2.0 * halton(k, 1, mix_seed(seed, 91))[0] - 1.0));
  };
  return s;
}

inline Perturber<double> perturber() {
  return [](double p, double r, Rng& rng) { return wrap(p + rng.uniform(-r, r)); };
}

}  // namespace circle

/// North-south map of the circle R/Z with S = 0 attracting and N = 1/2 repelling.
///
/// f is odd and piecewise linear: slope s on |t| <= 1/4 and slope 2 - s on the
/// rest. Points are kept in [-1/2, 1/2) so values near S keep full relative
/// precision.
struct NorthSouth {
  /// Slope at S; the slope at N is 2 - s.
  double s = 0.75;
  double r = 0.2;
  /// Bracket domain radius.
  double gamma = 0.06;
  /// Contraction rate near the fixed points, measured at construction.
  double mu = 0.0;
  /// Lipschitz constant of f and of f^-1, measured at construction.
  double L = 0.0;
  /// Transition time: orbits of the gap region reach the r/2 balls after u steps
  /// both ways, and f^u(B_r(N)) and f^-u(B_r(S)) cover the circle.
  int u = 0;
  /// Tighter (c, mu) fitted on samples for the default parameters; the
  /// L^u/mu^u constant is valid but forces a block length with a tiny
  /// admissible discrepancy.
  double bowen_c = 1.1;
  double bowen_mu = 0.8;

  NorthSouth() { measure(); }
  NorthSouth(double slope, double radius, double bracket_radius) : s(slope), r(radius), gamma(bracket_radius) {
    measure();
  }

  [[nodiscard]] double f(double t) const {
    const double a = std::abs(t);
    if (a >= 0.5) return -0.5;
    const double b = a <= 0.25 ? s * a : s / 4.0 + (2.0 - s) * (a - 0.25);
    return circle::wrap(t < 0 ? -b : b);
  }
  [[nodiscard]] double finv(double t) const {
    const double a = std::abs(t);
    if (a >= 0.5) return -0.5;
    const double b = a <= s / 4.0 ? a / s : 0.25 + (a - s / 4.0) / (2.0 - s);
    return circle::wrap(t < 0 ? -b : b);
  }

  static double dist_S(double t) { return std::abs(circle::wrap(t)); }
  static double dist_N(double t) { return 0.5 - std::abs(circle::wrap(t)); }

  /// 1 on B_r(N), 0 on B_r(S), linear in the distance to N in between.
  [[nodiscard]] double phi(double p) const {
    const double dn = dist_N(p);
    return std::clamp((0.5 - r - dn) / (0.5 - 2.0 * r), 0.0, 1.0);
  }

  [[nodiscard]] MetricSystem<double> system() const {
    MetricSystem<double> m;
    auto self = *this;
    m.id = "ns-circle";
    m.dist = [](double a, double b) { return circle::dist(a, b); };
    m.fwd = [self](double t) { return self.f(t); };
    m.inv = [self](double t) { return self.finv(t); };
    m.lip_fwd = std::max(s, 2.0 - s);
    m.lip_inv = std::max(1.0 / s, 1.0 / (2.0 - s));
    m.diam = 0.5;
    m.tol = 1e-10;
    return m;
  }

  [[nodiscard]] double bracket_eval(double p, double q) const {
    const double a = circle::arc(p, q);
    if (std::abs(a) > gamma) throw DomainError("north-south bracket: pair outside domain radius");
    const double w = phi(p);
    // the plateaus are returned bitwise: coordinates near N carry only
    // absolute precision, and p + (q - p) would lose it
    if (w == 0.0) return p;
    if (w == 1.0) return q;
    return circle::wrap(p + w * a);
  }

  /// The bracket with (c, mu) = (L^u / mu^u, mu).
  [[nodiscard]] Bracket<double> bracket() const {
    Bracket<double> b;
    b.id = "ns";
    b.domain_radius = gamma;
    auto self = *this;
    b.eval = [self](double p, double q) { return self.bracket_eval(p, q); };
    b.declared_c = std::pow(L / mu, u);
    b.declared_mu = mu;
    return b;
  }

  /// The same bracket declared with the tighter pair used for Bowen iteration.
  [[nodiscard]] Bracket<double> bowen_bracket() const {
    Bracket<double> b = bracket();
    b.id = "ns-bowen";
    b.declared_c = bowen_c;
    b.declared_mu = bowen_mu;
    return b;
  }

 private:
  void measure() {
    // contraction rate: f on B_r(S), f^-1 on B_r(N), from difference quotients
    const int G = 4000;
    double m = 0.0, lf = 0.0, li = 0.0;
    for (int k = 0; k < G; ++k) {
      const double t = -0.5 + (k + 0.5) / G;
      const double h = 0.25 / G;
      const double t2 = circle::wrap(t + h);
      lf = std::max(lf, circle::dist(f(t), f(t2)) / h);
      li = std::max(li, circle::dist(finv(t), finv(t2)) / h);
      if (dist_S(t) < r && dist_S(t2) < r) m = std::max(m, circle::dist(f(t), f(t2)) / h);
      if (dist_N(t) < r && dist_N(t2) < r) m = std::max(m, circle::dist(finv(t), finv(t2)) / h);
    }
    mu = m;
    L = std::max(lf, li);
    // transition time over a dense grid
    auto ok = [&](int n) {
      for (int k = 0; k <= G; ++k) {
        const double t = -0.5 + static_cast<double>(k) / G;
        double fu = t, bu = t;
        for (int j = 0; j < n; ++j) {
          fu = f(fu);
          bu = finv(bu);
        }
        // closed balls: covering condition
        if (!(dist_N(bu) <= r || dist_S(fu) <= r)) return false;
        // gap region enters the r/2 balls after n steps, both ways
        const bool in_u = dist_N(t) > r - gamma && dist_S(t) > r - gamma;
        if (in_u) {
          const bool fw = dist_S(fu) <= r / 2 || dist_N(fu) <= r / 2;
          const bool bw = dist_S(bu) <= r / 2 || dist_N(bu) <= r / 2;
          if (!fw || !bw) return false;
        }
      }
      return true;
    };
    u = 1;
    while (!ok(u)) ++u;
  }
};

/// Rigid rotation by alpha; an isometry with no hyperbolic behaviour.
inline MetricSystem<double> circle_rotation(double alpha = 0.6180339887498949) {
  MetricSystem<double> s;
  s.id = "rotation";
  s.dist = [](double a, double b) { return circle::dist(a, b); };
  s.fwd = [alpha](double t) { return circle::wrap(t + alpha); };
  s.inv = [alpha](double t) { return circle::wrap(t - alpha); };
  s.diam = 0.5;
  return s;
}

inline Bracket<double> circle_projection_bracket(double radius = 0.1) {
  Bracket<double> b;
  b.id = "projection";
  b.domain_radius = radius;
  b.eval = [](double p, double) { return p; };
  return b;
}

}  // namespace shadowkit
