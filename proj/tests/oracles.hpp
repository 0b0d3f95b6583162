#pragma once

// Reference computations written independently of the library code paths:
// dense linear algebra instead of recursions, explicit double loops instead of
// running sums. Tests compare library output against these.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

using V2 = std::array<double, 2>;

inline double wrap_half(double x) { return x - std::round(x); }

/// Dense Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve(std::vector<double> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
    if (A[piv * n + c] == 0.0) throw std::runtime_error("singular system");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r * n + c] / A[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i * n + k] * x[k];
    x[i] = s / A[i * n + i];
  }
  return x;
}

/// Cat-map shadowing corrections from the linear system
///   w_{k+1} - A w_k = -e_k   (k = 0..n-2),
///   <w_{n-1}, v_u> = 0,  <w_0, v_s> = 0,
/// solved densely. Entries are given in lifted [0,1) coordinates, window of n
/// points; returns w_0..w_{n-1}.
inline std::vector<V2> cat_corrections_dense(const std::vector<V2>& x) {
  const std::size_t n = x.size();
  const double lu = (3.0 + std::sqrt(5.0)) / 2.0;
  // eigenvectors of [[2,1],[1,1]] from the characteristic polynomial
  V2 vu{1.0, lu - 2.0}, vs{1.0, (3.0 - std::sqrt(5.0)) / 2.0 - 2.0};
  const double nu = std::hypot(vu[0], vu[1]), ns = std::hypot(vs[0], vs[1]);
  vu = {vu[0] / nu, vu[1] / nu};
  vs = {vs[0] / ns, vs[1] / ns};
  const std::size_t N = 2 * n;
  std::vector<double> M(N * N, 0.0), rhs(N, 0.0);
  std::size_t row = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const V2 ax{2 * x[k][0] + x[k][1], x[k][0] + x[k][1]};
    const V2 e{wrap_half(x[k + 1][0] - ax[0]), wrap_half(x[k + 1][1] - ax[1])};
    // component 0: w_{k+1,0} - (2 w_{k,0} + w_{k,1}) = -e0
    M[row * N + 2 * (k + 1)] = 1.0;
    M[row * N + 2 * k] = -2.0;
    M[row * N + 2 * k + 1] = -1.0;
    rhs[row++] = -e[0];
    M[row * N + 2 * (k + 1) + 1] = 1.0;
    M[row * N + 2 * k] = -1.0;
    M[row * N + 2 * k + 1] = -1.0;
    rhs[row++] = -e[1];
  }
  M[row * N + 2 * (n - 1)] = vu[0];
  M[row * N + 2 * (n - 1) + 1] = vu[1];
  ++row;
  M[row * N + 0] = vs[0];
  M[row * N + 1] = vs[1];
  const auto sol = solve(M, rhs);
  std::vector<V2> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = {sol[2 * k], sol[2 * k + 1]};
  return w;
}

/// sum_{|i| <= n} mu^|i| d_i for explicit per-index distances d(i).
template <class F>
double weighted_sum(F d, double mu, int n) {
  double s = 0.0;
  for (int i = -n; i <= n; ++i) s += std::pow(mu, std::abs(i)) * d(i);
  return s;
}

/// kappa * sum_l L^m (sum_j delta_{(l-1)m+j}) / 2^|l-s-1|, straight from the
/// formula, for jumps given by a function on indices and a block range.
template <class F>
double kernel_bound(F delta, double c, double L, int m, int i, int l_max) {
  const double kappa = 10.0 * c / 3.0 + 1.0;
  const int s = i / m;
  double total = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    double block = 0.0;
    for (int j = 1; j <= m; ++j) block += delta((l - 1) * m + j);
    total += std::pow(L, m) * block / std::pow(2.0, std::abs(l - s - 1));
  }
  return kappa * total;
}

}  // namespace oracle
