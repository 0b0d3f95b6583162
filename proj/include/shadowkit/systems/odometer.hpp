#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "shadowkit/brackets.hpp"
#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"

namespace shadowkit {

template <>
struct Codec<std::uint64_t> {
  static std::vector<double> encode(std::uint64_t p) { return {static_cast<double>(p)}; }
  static std::uint64_t decode(const std::vector<double>& v) {
    if (v.size() != 1 || v[0] < 0) throw std::invalid_argument("odometer point needs 1 nonnegative coordinate");
    return static_cast<std::uint64_t>(v[0]);
  }
};

/// Add-one-with-carry on D binary digits, least significant digit first.
///
/// d(a, b) = 2^-k with k the first differing digit; adding 1 preserves the
/// lowest differing digit, so the map is an isometry.
struct Odometer {
  int digits = 8;

  [[nodiscard]] std::uint64_t mask() const { return digits >= 64 ? ~0ULL : (1ULL << digits) - 1; }

  static double dist(std::uint64_t a, std::uint64_t b) {
    if (a == b) return 0.0;
    return std::ldexp(1.0, -std::countr_zero(a ^ b));
  }

  [[nodiscard]] MetricSystem<std::uint64_t> system() const {
    const std::uint64_t m = mask();
    MetricSystem<std::uint64_t> s;
    s.id = "odometer-" + std::to_string(digits);
    s.dist = [](std::uint64_t a, std::uint64_t b) { return dist(a, b); };
    s.fwd = [m](std::uint64_t a) { return (a + 1) & m; };
    s.inv = [m](std::uint64_t a) { return (a - 1) & m; };
    s.lip_fwd = s.lip_inv = 1.0;
    s.diam = 1.0;
    s.tol = 0.0;
    return s;
  }

  /// Adds a random multiple of 2^j, where 2^-j is the largest power not above r.
  [[nodiscard]] Perturber<std::uint64_t> perturber() const {
    const std::uint64_t m = mask();
    const int D = digits;
    return [m, D](std::uint64_t p, double r, Rng& rng) {
      const int j = static_cast<int>(std::ceil(-std::log2(r) - 1e-12));
      if (j >= D) return p;
      const std::uint64_t step = 1ULL << std::max(j, 0);
      return (p + step * rng.below(1ULL << (D - std::max(j, 0)))) & m;
    };
  }

  [[nodiscard]] Sampler<std::uint64_t> sampler(std::uint64_t seed) const {
    const std::uint64_t m = mask();
    auto pert = perturber();
    Sampler<std::uint64_t> s;
    s.point = [m, seed](std::uint64_t k) { return mix_seed(seed, k) & m; };
    s.near = [pert, seed](std::uint64_t p, double r, std::uint64_t k) {
      Rng rng(mix_seed(seed ^ 0xabcdefULL, k));
      return pert(p, r, rng);
    };
    return s;
  }
};

inline ShadowResult<std::uint64_t> odometer_projection_shadow(const Odometer& od, const PseudoOrbit<std::uint64_t>& x) {
  return projection_method(od.system(), 1.0).run(x);
}

}  // namespace shadowkit
