#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shadowkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Requested index not covered by the window or its extension rule.
class WindowError : public Error {
 public:
  using Error::Error;
};
/// Bracket evaluated outside its domain, or a lift is ambiguous.
class DomainError : public Error {
 public:
  using Error::Error;
};
/// Configuration violates the admissibility conditions of the construction.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};
class ConvergenceError : public Error {
 public:
  using Error::Error;
};
/// A quantitative stage bound of the Bowen iteration was observed to fail.
class LemmaViolation : public Error {
 public:
  using Error::Error;
};

/// Compact metric space with a bi-Lipschitz homeomorphism.
template <class P>
struct MetricSystem {
  using point_type = P;

  std::string id;
  std::function<double(const P&, const P&)> dist;
  std::function<P(const P&)> fwd;
  std::function<P(const P&)> inv;
  double lip_fwd = 1.0;
  double lip_inv = 1.0;
  double diam = 1.0;
  /// Point equality tolerance in carrier coordinates.
  double tol = 1e-10;

  /// The same space with f and f^{-1} exchanged.
  [[nodiscard]] MetricSystem inverse() const {
    MetricSystem r = *this;
    r.id = id + "^-1";
    std::swap(r.fwd, r.inv);
    std::swap(r.lip_fwd, r.lip_inv);
    return r;
  }
};

/// Coordinate encoding of carrier points, specialized by each system.
template <class P>
struct Codec;

template <class P>
std::vector<double> encode(const P& p) {
  return Codec<P>::encode(p);
}

template <class P>
P apply_iter(const MetricSystem<P>& sys, P p, long k) {
  for (; k > 0; --k) p = sys.fwd(p);
  for (; k < 0; ++k) p = sys.inv(p);
  return p;
}

/// A real number known to lie in [value, value + tail_bound].
struct BoundedValue {
  double value = 0.0;
  double tail_bound = 0.0;

  [[nodiscard]] double upper() const { return value + tail_bound; }
};

/// L_n = 1 + L + ... + L^{n-1}.
inline double lipschitz_geom_sum(double L, int n) {
  if (n < 1) throw std::invalid_argument("lipschitz_geom_sum: n must be >= 1");
  double s = 0.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k) {
    s += term;
    term *= L;
  }
  return s;
}

enum class Extension { OrbitCapped, Periodic };

inline const char* to_string(Extension e) {
  return e == Extension::OrbitCapped ? "orbit-capped" : "periodic";
}

/// Finite window x_lo..x_hi of a bi-infinite sequence plus an extension rule.
///
/// OrbitCapped continues by exact f-iterates of the end points, so all jumps
/// outside the window vanish. Periodic repeats the window with period hi-lo+1.
template <class P>
class PseudoOrbit {
 public:
  PseudoOrbit() = default;
  PseudoOrbit(int lo, std::vector<P> entries, Extension ext = Extension::OrbitCapped)
      : lo_(lo), entries_(std::move(entries)), ext_(ext) {
    if (entries_.empty()) throw WindowError("pseudo-orbit window is empty");
  }

  [[nodiscard]] int lo() const { return lo_; }
  [[nodiscard]] int hi() const { return lo_ + static_cast<int>(entries_.size()) - 1; }
  [[nodiscard]] int size() const { return static_cast<int>(entries_.size()); }
  [[nodiscard]] Extension extension() const { return ext_; }
  [[nodiscard]] const std::vector<P>& entries() const { return entries_; }
  [[nodiscard]] bool covers(int i) const { return i >= lo_ && i <= hi(); }

  /// Stored entry; throws outside the window.
  [[nodiscard]] const P& operator[](int i) const {
    if (!covers(i)) throw WindowError("index " + std::to_string(i) + " outside window");
    return entries_[static_cast<std::size_t>(i - lo_)];
  }

  /// x_i for any integer i, using the extension rule.
  [[nodiscard]] P at(const MetricSystem<P>& sys, int i) const {
    if (covers(i)) return (*this)[i];
    if (ext_ == Extension::Periodic) {
      const int n = size();
      const int k = ((i - lo_) % n + n) % n;
      return entries_[static_cast<std::size_t>(k)];
    }
    if (i > hi()) return apply_iter(sys, entries_.back(), i - hi());
    return apply_iter(sys, entries_.front(), i - lo_);
  }

  /// x_a..x_b in one pass, iterating the extension incrementally.
  [[nodiscard]] std::vector<P> materialize(const MetricSystem<P>& sys, int a, int b) const {
    std::vector<P> out;
    if (b < a) return out;
    out.reserve(static_cast<std::size_t>(b - a + 1));
    if (ext_ == Extension::Periodic) {
      for (int i = a; i <= b; ++i) out.push_back(at(sys, i));
      return out;
    }
    // below the window: walk backwards from x_lo, then reverse
    std::vector<P> below;
    if (a < lo_) {
      P p = entries_.front();
      for (int i = lo_ - 1; i >= a; --i) {
        p = sys.inv(p);
        if (i <= b) below.push_back(p);
      }
      std::reverse(below.begin(), below.end());
    }
    out.insert(out.end(), below.begin(), below.end());
    for (int i = std::max(a, lo_); i <= std::min(b, hi()); ++i) out.push_back((*this)[i]);
    if (b > hi()) {
      P p = entries_.back();
      for (int i = hi() + 1; i <= b; ++i) {
        p = sys.fwd(p);
        if (i >= a) out.push_back(p);
      }
    }
    return out;
  }

  /// sigma^k(x): (sigma^k x)_i = x_{i+k}. Exact re-indexing.
  [[nodiscard]] PseudoOrbit shifted(int k) const {
    PseudoOrbit r = *this;
    r.lo_ = lo_ - k;
    return r;
  }

  /// Time reversal: xhat_i = x_{-i}. A pseudo-orbit of f^{-1} up to one index shift.
  [[nodiscard]] PseudoOrbit reversed() const {
    std::vector<P> e(entries_.rbegin(), entries_.rend());
    return PseudoOrbit(-hi(), std::move(e), ext_);
  }

  /// Coordinate-wise image g(x_i) with the same window and extension.
  template <class F>
  [[nodiscard]] PseudoOrbit mapped(F&& g) const {
    std::vector<P> e;
    e.reserve(entries_.size());
    for (const auto& p : entries_) e.push_back(g(p));
    return PseudoOrbit(lo_, std::move(e), ext_);
  }

 private:
  int lo_ = 0;
  std::vector<P> entries_;
  Extension ext_ = Extension::OrbitCapped;
};

/// Real values indexed by integers; zero outside [lo, lo+size) unless periodic.
struct IndexedSeries {
  int lo = 0;
  std::vector<double> values;
  bool periodic = false;

  [[nodiscard]] int hi() const { return lo + static_cast<int>(values.size()) - 1; }
  [[nodiscard]] double at(int i) const {
    if (values.empty()) return 0.0;
    const int n = static_cast<int>(values.size());
    if (periodic) return values[static_cast<std::size_t>(((i - lo) % n + n) % n)];
    if (i < lo || i > hi()) return 0.0;
    return values[static_cast<std::size_t>(i - lo)];
  }
  [[nodiscard]] double sup() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, v);
    return s;
  }
};

/// Output of a shadowing method: the point and whatever certificates it can give.
template <class P>
struct ShadowResult {
  P point{};
  int stages_used = 0;
  /// Truncation residual of the limit construction.
  double tail_bound = 0.0;
  /// d(f^i(point), x_i) over the evaluated indices.
  std::optional<IndexedSeries> per_index_error;
  /// Certified upper bound for the same quantity, tails included.
  std::optional<IndexedSeries> per_index_bound;
};

template <class P>
PseudoOrbit<P> orbit_map(const MetricSystem<P>& sys, const P& p, int lo, int hi) {
  if (lo > 0 || hi < 0) throw WindowError("orbit_map: window must contain 0");
  PseudoOrbit<P> seed(0, {p});
  return PseudoOrbit<P>(lo, seed.materialize(sys, lo, hi));
}

/// Past of p glued to the future of q: x_i = f^i(p) for i < 0, f^i(q) for i >= 0.
template <class P>
PseudoOrbit<P> connect(const MetricSystem<P>& sys, const P& p, const P& q, int lo, int hi) {
  if (lo > -1 || hi < 0) throw WindowError("connect: need lo <= -1 and hi >= 0");
  std::vector<P> e = PseudoOrbit<P>(0, {p}).materialize(sys, lo, -1);
  auto fut = PseudoOrbit<P>(0, {q}).materialize(sys, 0, hi);
  e.insert(e.end(), fut.begin(), fut.end());
  return PseudoOrbit<P>(lo, std::move(e));
}

/// Keeps x on [-n, n] and continues by exact orbits of x_{+-n}.
template <class P>
PseudoOrbit<P> orbit_cap(const PseudoOrbit<P>& x, int n) {
  if (n < 0 || !x.covers(-n) || !x.covers(n)) throw WindowError("orbit_cap: window too small");
  std::vector<P> e(x.entries().begin() + (-n - x.lo()), x.entries().begin() + (n - x.lo()) + 1);
  return PseudoOrbit<P>(-n, std::move(e));
}

/// delta_i = d(f(x_{i-1}), x_i). Periodic orbits include the wrap jump at lo.
template <class P>
IndexedSeries jumps(const MetricSystem<P>& sys, const PseudoOrbit<P>& x) {
  IndexedSeries s;
  if (x.extension() == Extension::Periodic) {
    s.lo = x.lo();
    s.periodic = true;
    for (int i = x.lo(); i <= x.hi(); ++i) s.values.push_back(sys.dist(sys.fwd(x.at(sys, i - 1)), x[i]));
    return s;
  }
  s.lo = x.lo() + 1;
  for (int i = x.lo() + 1; i <= x.hi(); ++i) s.values.push_back(sys.dist(sys.fwd(x[i - 1]), x[i]));
  return s;
}

/// delta^m_i = L^m * sum_{j=1}^m delta_{(i-1)m+j}.
inline double block_jumps(const IndexedSeries& d, double L, int m, int i) {
  if (m < 1) throw std::invalid_argument("block_jumps: m must be >= 1");
  double s = 0.0;
  for (int j = 1; j <= m; ++j) s += d.at((i - 1) * m + j);
  return std::pow(L, m) * s;
}

template <class P>
double discrepancy1(const MetricSystem<P>& sys, const PseudoOrbit<P>& x) {
  return jumps(sys, x).sup();
}

/// Truncation index used by default: the windows plus a margin after which the
/// weights mu^|i| are negligible.
inline int default_horizon(int a_lo, int a_hi, int b_lo, int b_hi, double mu) {
  const int w = std::max({std::abs(a_lo), std::abs(a_hi), std::abs(b_lo), std::abs(b_hi)});
  const int margin = static_cast<int>(std::ceil(40.0 * std::log(2.0) / -std::log(mu)));
  return w + margin;
}

namespace detail {

template <class P>
bool same_cap(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, const PseudoOrbit<P>& y, bool upper) {
  if (x.extension() != Extension::OrbitCapped || y.extension() != Extension::OrbitCapped) return false;
  const int k = upper ? std::max(x.hi(), y.hi()) : std::min(x.lo(), y.lo());
  return sys.dist(x.at(sys, k), y.at(sys, k)) == 0.0;
}

template <class P>
BoundedValue weighted(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, const PseudoOrbit<P>& y,
                      double mu, int n, bool use_max) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0,1)");
  const auto xs = x.materialize(sys, -n, n);
  const auto ys = y.materialize(sys, -n, n);
  BoundedValue r;
  for (int i = -n; i <= n; ++i) {
    const double w = std::pow(mu, std::abs(i)) * sys.dist(xs[static_cast<std::size_t>(i + n)],
                                                           ys[static_cast<std::size_t>(i + n)]);
    r.value = use_max ? std::max(r.value, w) : r.value + w;
  }
  // sequences that share a capped end point agree beyond it
  const double side = use_max ? sys.diam * std::pow(mu, n + 1) : sys.diam * std::pow(mu, n + 1) / (1.0 - mu);
  const bool up_eq = same_cap(sys, x, y, true) && std::max(x.hi(), y.hi()) <= n;
  const bool lo_eq = same_cap(sys, x, y, false) && std::min(x.lo(), y.lo()) >= -n;
  if (use_max) {
    r.tail_bound = (up_eq && lo_eq) ? 0.0 : side;
  } else {
    r.tail_bound = (up_eq ? 0.0 : side) + (lo_eq ? 0.0 : side);
  }
  return r;
}

}  // namespace detail

/// d~_s(x, y) = sum_i mu^|i| d(x_i, y_i), truncated to |i| <= n with certified tail.
template <class P>
BoundedValue tilde_dist_s(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, const PseudoOrbit<P>& y,
                          double mu = 0.5, int n = -1) {
  if (n < 0) n = default_horizon(x.lo(), x.hi(), y.lo(), y.hi(), mu);
  return detail::weighted(sys, x, y, mu, n, false);
}

/// d~_m(x, y) = sup_i mu^|i| d(x_i, y_i).
template <class P>
BoundedValue tilde_dist_m(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, const PseudoOrbit<P>& y,
                          double mu = 0.5, int n = -1) {
  if (n < 0) n = default_horizon(x.lo(), x.hi(), y.lo(), y.hi(), mu);
  return detail::weighted(sys, x, y, mu, n, true);
}

/// D^2(x) = sup_i d~_s(sigma^i x, orb(x_i)).
///
/// For orbit-capped x the supremand outside the window is the value at the
/// nearest end times a power of mu, so the window suffices; for periodic x one
/// period suffices. Inner sums are truncated at |j| <= n.
template <class P>
BoundedValue discrepancy2(const MetricSystem<P>& sys, const PseudoOrbit<P>& x, double mu = 0.5, int n = 40) {
  const auto xs = x.materialize(sys, x.lo() - n, x.hi() + n);
  auto X = [&](int i) -> const P& { return xs[static_cast<std::size_t>(i - (x.lo() - n))]; };
  BoundedValue best;
  const double tail = sys.diam * 2.0 * std::pow(mu, n + 1) / (1.0 - mu);
  for (int i = x.lo(); i <= x.hi(); ++i) {
    double s = 0.0;
    P p = X(i);
    for (int j = 1; j <= n; ++j) {
      p = sys.fwd(p);
      s += std::pow(mu, j) * sys.dist(X(i + j), p);
    }
    p = X(i);
    for (int j = 1; j <= n; ++j) {
      p = sys.inv(p);
      s += std::pow(mu, j) * sys.dist(X(i - j), p);
    }
    best.value = std::max(best.value, s);
  }
  // an exact orbit has every inner term zero, truncated or not
  best.tail_bound = discrepancy1(sys, x) == 0.0 ? 0.0 : tail;
  return best;
}

/// sup over the window of d(f^i(p), x_i).
template <class P>
double shadow_error(const MetricSystem<P>& sys, const P& p, const PseudoOrbit<P>& x) {
  const auto orb = PseudoOrbit<P>(0, {p}).materialize(sys, std::min(0, x.lo()), std::max(0, x.hi()));
  const int base = std::min(0, x.lo());
  double e = 0.0;
  for (int i = x.lo(); i <= x.hi(); ++i) e = std::max(e, sys.dist(orb[static_cast<std::size_t>(i - base)], x[i]));
  return e;
}

}  // namespace shadowkit
