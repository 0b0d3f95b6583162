#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "shadowkit/core.hpp"

namespace shadowkit {

/// Deterministic RNG. Doubles are built from raw mt19937_64 output rather than
/// std::uniform_real_distribution so streams are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t bits() { return eng_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

/// Stream derivation so that run k of a batch does not depend on runs 0..k-1.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Van der Corput radical inverse of k in the given base.
inline double radical_inverse(std::uint64_t k, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

/// k-th point of a Halton sequence in [0,1)^dim with a seeded Cranley-Patterson shift.
inline std::vector<double> halton(std::uint64_t k, int dim, std::uint64_t seed) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<double> u(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    const double shift = static_cast<double>(mix_seed(seed, static_cast<std::uint64_t>(d)) >> 11) * 0x1.0p-53;
    double v = radical_inverse(k + 1, primes[d % 8]) + shift;
    u[static_cast<std::size_t>(d)] = v - std::floor(v);
  }
  return u;
}

/// Deterministic point source for the property checkers.
template <class P>
struct Sampler {
  /// k-th sample point.
  std::function<P(std::uint64_t)> point;
  /// A point at distance at most `radius` from p, the k-th such draw.
  std::function<P(const P&, double, std::uint64_t)> near;
};

/// Point at distance at most `magnitude` from p, drawn from rng.
template <class P>
using Perturber = std::function<P(const P&, double, Rng&)>;

enum class Schedule { Constant, OneSpike, GeometricDecay, QuietWindow };

inline const char* to_string(Schedule s) {
  switch (s) {
    case Schedule::Constant: return "constant";
    case Schedule::OneSpike: return "one-spike";
    case Schedule::GeometricDecay: return "geometric-decay";
    case Schedule::QuietWindow: return "quiet-window";
  }
  return "?";
}

inline Schedule schedule_from_string(const std::string& s) {
  if (s == "constant") return Schedule::Constant;
  if (s == "one-spike") return Schedule::OneSpike;
  if (s == "geometric-decay") return Schedule::GeometricDecay;
  if (s == "quiet-window") return Schedule::QuietWindow;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

struct GenParams {
  Schedule schedule = Schedule::Constant;
  double delta = 1e-4;
  int lo = -64;
  int hi = 64;
  /// Index carrying the jump for OneSpike.
  int spike = 0;
  /// Jumps vanish on |i| <= quiet_radius for QuietWindow.
  int quiet_radius = 32;

  /// Jump size bound at index i (the jump between x_{i-1} and x_i).
  [[nodiscard]] double size_at(int i) const {
    switch (schedule) {
      case Schedule::Constant: return delta;
      case Schedule::OneSpike: return i == spike ? delta : 0.0;
      case Schedule::GeometricDecay: return delta * std::ldexp(1.0, -std::abs(i));
      case Schedule::QuietWindow: return std::abs(i) <= quiet_radius ? 0.0 : delta;
    }
    return 0.0;
  }
};

/// Builds x with x_0 = x0 and jump d(f(x_{i-1}), x_i) <= params.size_at(i).
///
/// Forward: x_i = perturb(f(x_{i-1})). Backward: x_{i-1} = f^{-1}(perturb(x_i)),
/// so the jump into x_i is exactly the perturbation.
template <class P>
PseudoOrbit<P> generate(const MetricSystem<P>& sys, const Perturber<P>& perturb, const P& x0, const GenParams& params,
                        Rng& rng) {
  if (params.lo > 0 || params.hi < 0) throw WindowError("generate: window must contain 0");
  std::vector<P> e(static_cast<std::size_t>(params.hi - params.lo + 1));
  auto slot = [&](int i) -> P& { return e[static_cast<std::size_t>(i - params.lo)]; };
  slot(0) = x0;
  for (int i = 1; i <= params.hi; ++i) {
    const double s = params.size_at(i);
    P y = sys.fwd(slot(i - 1));
    slot(i) = s > 0.0 ? perturb(y, s, rng) : y;
  }
  for (int i = 0; i > params.lo; --i) {
    const double s = params.size_at(i);
    slot(i - 1) = sys.inv(s > 0.0 ? perturb(slot(i), s, rng) : slot(i));
  }
  return PseudoOrbit<P>(params.lo, std::move(e));
}

}  // namespace shadowkit
