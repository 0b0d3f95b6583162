#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"
#include "shadowkit/systems/circle.hpp"

namespace shadowkit {

/// Bi-infinite base sequence: v on [lo, lo+|v|), `left` below and `right` above.
///
/// The shift only moves lo, so sigma and its powers are exact.
struct SeqPoint {
  int lo = 0;
  std::vector<double> v;
  double left = 0.0;
  double right = 0.0;

  [[nodiscard]] int hi() const { return lo + static_cast<int>(v.size()) - 1; }
  [[nodiscard]] double at(int i) const {
    if (i < lo) return left;
    if (i > hi()) return right;
    return v[static_cast<std::size_t>(i - lo)];
  }
  /// sigma^k: (sigma^k x)_i = x_{i+k}.
  [[nodiscard]] SeqPoint shifted(int k) const {
    SeqPoint r = *this;
    r.lo -= k;
    return r;
  }
  /// Smallest equivalent representation.
  [[nodiscard]] SeqPoint trimmed() const {
    std::size_t a = 0, b = v.size();
    while (a < b && v[a] == left) ++a;
    while (b > a && v[b - 1] == right) --b;
    SeqPoint r;
    r.lo = lo + static_cast<int>(a);
    r.v.assign(v.begin() + static_cast<std::ptrdiff_t>(a), v.begin() + static_cast<std::ptrdiff_t>(b));
    r.left = left;
    r.right = right;
    return r;
  }
  /// Builds the sequence i -> g(i) on [a, b] with the given fills.
  static SeqPoint from(int a, int b, const std::function<double(int)>& g, double left, double right) {
    SeqPoint r;
    r.lo = a;
    r.left = left;
    r.right = right;
    for (int i = a; i <= b; ++i) r.v.push_back(g(i));
    return r;
  }
};

/// Equality as bi-infinite sequences.
inline bool operator==(const SeqPoint& x, const SeqPoint& y) {
  if (x.left != y.left || x.right != y.right) return false;
  const int a = std::min(x.lo, y.lo), b = std::max(x.hi(), y.hi());
  for (int i = a; i <= b; ++i)
    if (x.at(i) != y.at(i)) return false;
  return true;
}

/// Encoded as [lo, left, right, v...].
template <>
struct Codec<SeqPoint> {
  static std::vector<double> encode(const SeqPoint& p) {
    std::vector<double> out{static_cast<double>(p.lo), p.left, p.right};
    out.insert(out.end(), p.v.begin(), p.v.end());
    return out;
  }
  static SeqPoint decode(const std::vector<double>& e) {
    if (e.size() < 3) throw std::invalid_argument("sequence point needs [lo, left, right, values...]");
    SeqPoint p;
    p.lo = static_cast<int>(e[0]);
    p.left = e[1];
    p.right = e[2];
    p.v.assign(e.begin() + 3, e.end());
    return p;
  }
};

/// The full shift on M^Z with d~_s, for M a finite alphabet {0..k-1} with the
/// discrete metric or the circle R/Z.
struct SequenceSystem {
  enum class Base { Discrete, Circle };
  Base base = Base::Discrete;
  int symbols = 3;
  double mu = 0.5;

  static SequenceSystem discrete(int k) { return {Base::Discrete, k, 0.5}; }
  static SequenceSystem circle_base() { return {Base::Circle, 0, 0.5}; }

  [[nodiscard]] std::string id() const {
    return base == Base::Discrete ? "shift-" + std::to_string(symbols) : "shift-circle";
  }
  [[nodiscard]] double base_dist(double a, double b) const {
    if (base == Base::Discrete) return a == b ? 0.0 : 1.0;
    return circle::dist(a, b);
  }
  [[nodiscard]] double base_diam() const { return base == Base::Discrete ? (symbols > 1 ? 1.0 : 0.0) : 0.5; }

  /// sum_i mu^|i| d(x_i, y_i), summed in closed form outside the supports.
  [[nodiscard]] double dist(const SeqPoint& x, const SeqPoint& y) const {
    const int a = std::min({x.lo, y.lo, 0}), b = std::max({x.hi(), y.hi(), 0});
    double s = 0.0;
    for (int i = a; i <= b; ++i) s += std::pow(mu, std::abs(i)) * base_dist(x.at(i), y.at(i));
    s += base_dist(x.right, y.right) * std::pow(mu, b + 1) / (1.0 - mu);
    s += base_dist(x.left, y.left) * std::pow(mu, -a + 1) / (1.0 - mu);
    return s;
  }
  /// sup_i mu^|i| d(x_i, y_i).
  [[nodiscard]] double dist_max(const SeqPoint& x, const SeqPoint& y) const {
    const int a = std::min({x.lo, y.lo, 0}), b = std::max({x.hi(), y.hi(), 0});
    double s = 0.0;
    for (int i = a; i <= b; ++i) s = std::max(s, std::pow(mu, std::abs(i)) * base_dist(x.at(i), y.at(i)));
    s = std::max(s, base_dist(x.right, y.right) * std::pow(mu, b + 1));
    s = std::max(s, base_dist(x.left, y.left) * std::pow(mu, -a + 1));
    return s;
  }

  [[nodiscard]] MetricSystem<SeqPoint> system() const {
    MetricSystem<SeqPoint> s;
    auto self = *this;
    s.id = id();
    s.dist = [self](const SeqPoint& x, const SeqPoint& y) { return self.dist(x, y); };
    s.fwd = [](const SeqPoint& x) { return x.shifted(1); };
    s.inv = [](const SeqPoint& x) { return x.shifted(-1); };
    s.lip_fwd = 1.0 / mu;
    s.lip_inv = 1.0 / mu;
    s.diam = base_diam() * (1.0 + mu) / (1.0 - mu);
    s.tol = base == Base::Discrete ? 0.0 : 1e-12;
    return s;
  }

  /// [x, y]_i = x_i for i <= -1 and y_i for i >= 0; defined on all pairs.
  static SeqPoint bracket_eval(const SeqPoint& x, const SeqPoint& y) {
    const int a = std::min({x.lo, y.lo, -1}), b = std::max({x.hi(), y.hi(), 0});
    return SeqPoint::from(a, b, [&](int i) { return i <= -1 ? x.at(i) : y.at(i); }, x.left, y.right).trimmed();
  }

  [[nodiscard]] Bracket<SeqPoint> bracket() const {
    Bracket<SeqPoint> b;
    b.id = "shift";
    b.domain_radius = system().diam;
    b.eval = [](const SeqPoint& x, const SeqPoint& y) { return bracket_eval(x, y); };
    b.declared_c = 1.0;
    b.declared_mu = mu;
    return b;
  }

  /// Random point supported on [-w, w] with random fills.
  [[nodiscard]] SeqPoint random_point(Rng& rng, int w) const {
    auto sym = [&]() {
      return base == Base::Discrete ? static_cast<double>(rng.below(static_cast<std::uint64_t>(symbols)))
                                    : rng.uniform(-0.5, 0.5);
    };
    const double l = sym(), r = sym();
    return SeqPoint::from(-w, w, [&](int) { return sym(); }, l, r);
  }

  [[nodiscard]] Sampler<SeqPoint> sampler(std::uint64_t seed, int w = 8) const {
    auto self = *this;
    Sampler<SeqPoint> s;
    s.point = [self, seed, w](std::uint64_t k) {
      Rng rng(mix_seed(seed, k));
      return self.random_point(rng, w);
    };
    // changes coordinates far enough out that the distance stays below r
    s.near = [self, seed, w](const SeqPoint& p, double r, std::uint64_t k) {
      Rng rng(mix_seed(seed ^ 0x5bd1e995ULL, k));
      int J = 0;
      while (self.base_diam() * 2.0 * std::pow(self.mu, J) / (1.0 - self.mu) > r) ++J;
      SeqPoint q = p;
      const int a = std::min(p.lo, -J - w), b = std::max(p.hi(), J + w);
      q = SeqPoint::from(a, b, [&](int i) { return p.at(i); }, p.left, p.right);
      for (int i = a; i <= b; ++i) {
        if (std::abs(i) < J) continue;
        if (self.base == Base::Discrete) {
          q.v[static_cast<std::size_t>(i - a)] = static_cast<double>(rng.below(static_cast<std::uint64_t>(self.symbols)));
        } else {
          q.v[static_cast<std::size_t>(i - a)] = rng.uniform(-0.5, 0.5);
        }
      }
      return q;
    };
    return s;
  }

  /// Perturbation at coordinates |j| >= J only, with the weighted mass below r.
  [[nodiscard]] Perturber<SeqPoint> perturber(int w = 8) const {
    auto self = *this;
    return [self, w](const SeqPoint& p, double r, Rng& rng) {
      int J = 0;
      while (self.base_diam() * 2.0 * std::pow(self.mu, J) / (1.0 - self.mu) > r) ++J;
      const int a = std::min(p.lo, -J - w), b = std::max(p.hi(), J + w);
      SeqPoint q = SeqPoint::from(a, b, [&](int i) { return p.at(i); }, p.left, p.right);
      for (int i = a; i <= b; ++i) {
        if (std::abs(i) < J) continue;
        auto& slot = q.v[static_cast<std::size_t>(i - a)];
        slot = self.base == Base::Discrete ? static_cast<double>(rng.below(static_cast<std::uint64_t>(self.symbols)))
                                           : rng.uniform(-0.5, 0.5);
      }
      return q;
    };
  }
};

/// (Sh alpha)_i = (alpha_i)_0, with alpha extended by exact shifts past its window.
inline SeqPoint shift_canonical_shadow(const PseudoOrbit<SeqPoint>& alpha) {
  if (alpha.extension() != Extension::OrbitCapped)
    throw WindowError("canonical shadow needs an orbit-capped pseudo-orbit (periodic output is not finitely supported)");
  const SeqPoint& first = alpha[alpha.lo()];
  const SeqPoint& last = alpha[alpha.hi()];
  const int a = alpha.lo() + std::min(first.lo, 0);
  const int b = alpha.hi() + std::max(last.hi(), 0);
  auto value = [&](int i) {
    if (i < alpha.lo()) return first.at(i - alpha.lo());
    if (i > alpha.hi()) return last.at(i - alpha.hi());
    return alpha[i].at(0);
  };
  return SeqPoint::from(a, b, value, first.left, last.right).trimmed();
}

/// The canonical shadow as a method; defined on every orbit-capped pseudo-orbit.
inline ShadowingMethod<SeqPoint> shift_canonical_method(const SequenceSystem& S) {
  ShadowingMethod<SeqPoint> m;
  m.id = "shift-canonical";
  m.gamma = S.system().diam;
  m.run = [](const PseudoOrbit<SeqPoint>& a) {
    ShadowResult<SeqPoint> r;
    r.point = shift_canonical_shadow(a);
    return r;
  };
  return m;
}

/// Coordinate-wise shift (sigma alpha)_i = sigma(alpha_i), as opposed to re-indexing.
inline PseudoOrbit<SeqPoint> coordinatewise_shift(const PseudoOrbit<SeqPoint>& alpha) {
  return alpha.mapped([](const SeqPoint& p) { return p.shifted(1); });
}

/// Result of the bracket/shadow mutual induction.
struct MutualInduction {
  std::vector<SeqPoint> y;        ///< y_n = sigma^{-n}(x_n), forward recursion
  std::vector<SeqPoint> y_back;   ///< y'_n = sigma^{n}(x'_n), backward recursion
  SeqPoint assembled;             ///< [z-, z+] from the last stages
  bool identity_holds = true;     ///< (y_n)_i = (alpha_i)_0 for 0 <= i <= n, and the backward analogue
  int first_failure = -1;
};

/// x_0 = alpha_0, x_n = [sigma(x_{n-1}), alpha_n], y_n = sigma^{-n}(x_n), checking
/// (y_n)_i = (alpha_i)_0 at every stage. The mirrored recursion with
/// sigma^{-1} and the split moved to i >= 1 gives (y'_n)_{-i} = (alpha_{-i})_0.
inline MutualInduction shift_mutual_induction(const PseudoOrbit<SeqPoint>& alpha, int n) {
  if (!alpha.covers(0) || !alpha.covers(n) || !alpha.covers(-n))
    throw WindowError("mutual induction: window must cover [-n, n]");
  MutualInduction out;
  SeqPoint x = alpha[0];
  out.y.push_back(x);
  for (int k = 1; k <= n; ++k) {
    x = SequenceSystem::bracket_eval(x.shifted(1), alpha[k]);
    out.y.push_back(x.shifted(-k));
  }
  // backward: [a, b]'_i = a_i for i >= 1, b_i for i <= 0
  auto bracket_rev = [](const SeqPoint& a, const SeqPoint& b) {
    const int lo = std::min({a.lo, b.lo, 0}), hi = std::max({a.hi(), b.hi(), 1});
    return SeqPoint::from(lo, hi, [&](int i) { return i >= 1 ? a.at(i) : b.at(i); }, b.left, a.right).trimmed();
  };
  SeqPoint xb = alpha[0];
  out.y_back.push_back(xb);
  for (int k = 1; k <= n; ++k) {
    xb = bracket_rev(xb.shifted(-1), alpha[-k]);
    out.y_back.push_back(xb.shifted(k));
  }
  for (int k = 0; k <= n && out.identity_holds; ++k) {
    for (int i = 0; i <= k; ++i) {
      if (out.y[static_cast<std::size_t>(k)].at(i) != alpha[i].at(0) ||
          out.y_back[static_cast<std::size_t>(k)].at(-i) != alpha[-i].at(0)) {
        out.identity_holds = false;
        out.first_failure = k;
        break;
      }
    }
  }
  out.assembled = SequenceSystem::bracket_eval(out.y_back.back(), out.y.back());
  return out;
}

}  // namespace shadowkit
