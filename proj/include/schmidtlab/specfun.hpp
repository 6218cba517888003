#pragma once

// Scalar special functions. Everything here is a pure function template on
// the floating-point type so the same code runs in double for production and
// in long double where a caller needs extra headroom against cancellation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "schmidtlab/error.hpp"

namespace schmidtlab {

/// Largest polynomial degree / mode index evaluated.
inline constexpr int kMaxDegree = 200;
/// Largest |x| accepted by the Hermite family.
inline constexpr double kMaxHermiteArgument = 50.0;
/// Largest argument accepted by the Laguerre family (a squared radius).
inline constexpr double kMaxLaguerreArgument = kMaxHermiteArgument * kMaxHermiteArgument;
/// Below this |z| the modified Bessel function is summed as a power series.
inline constexpr double kBesselSeriesLimit = 15.0;

namespace detail {

template <typename Scalar>
void require_finite(Scalar x, const char* op) {
  using std::isfinite;
  if (!isfinite(x)) throw DomainError(std::string(op) + ": non-finite argument");
}

inline void require_degree(int n, const char* op) {
  if (n < 0) throw DomainError(std::string(op) + ": negative degree");
  if (n > kMaxDegree)
    throw RangeError(std::string(op) + ": degree " + std::to_string(n) + " exceeds " +
                     std::to_string(kMaxDegree));
}

template <typename Scalar>
inline constexpr Scalar kRescaleThreshold = Scalar(1e150);

template <typename Scalar>
Scalar log_factorial_as(int n) {
  using std::log;
  Scalar acc = 0;
  for (int k = 2; k <= n; ++k) acc += log(Scalar(k));
  return acc;
}

}  // namespace detail

/// ln(n!). Exact integer product for n <= 20, log-gamma beyond.
inline double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  if (n <= 20) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return std::log(static_cast<double>(f));
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// Physicists' Hermite polynomial H_n(x) by H_{k+1} = 2x H_k - 2k H_{k-1}.
/// Overflows for large n|x|; use hermite_function for normalized values.
template <typename Scalar>
Scalar hermite(int n, Scalar x) {
  using std::abs;
  using std::isfinite;
  detail::require_degree(n, "hermite");
  detail::require_finite(x, "hermite");
  if (abs(x) > Scalar(kMaxHermiteArgument)) throw RangeError("hermite: |x| > 50");
  Scalar prev = 1;
  if (n == 0) return prev;
  Scalar cur = 2 * x;
  for (int k = 1; k < n; ++k) {
    Scalar next = 2 * x * cur - 2 * Scalar(k) * prev;
    prev = cur;
    cur = next;
  }
  if (!isfinite(cur)) throw RangeError("hermite: overflow, use hermite_function");
  return cur;
}

/// Generalized Laguerre polynomial L_p^{(a)}(x) by the forward recurrence in p.
template <typename Scalar>
Scalar generalized_laguerre(int p, Scalar a, Scalar x) {
  using std::abs;
  using std::isfinite;
  detail::require_degree(p, "generalized_laguerre");
  detail::require_finite(x, "generalized_laguerre");
  detail::require_finite(a, "generalized_laguerre");
  if (a < 0) throw DomainError("generalized_laguerre: negative order");
  if (abs(x) > Scalar(kMaxLaguerreArgument)) throw RangeError("generalized_laguerre: |x| > 2500");
  Scalar prev = 1;
  if (p == 0) return prev;
  Scalar cur = 1 + a - x;
  for (int k = 1; k < p; ++k) {
    Scalar next = ((2 * Scalar(k) + 1 + a - x) * cur - (Scalar(k) + a) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  if (!isfinite(cur)) throw RangeError("generalized_laguerre: overflow");
  return cur;
}

/// Normalized Hermite function psi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)),
/// unit L2 norm on the real line. Evaluated through the orthonormal
/// recurrence with a running log scale, so it neither overflows in H_n nor
/// underflows in the Gaussian before the two meet.
template <typename Scalar>
Scalar hermite_function(int n, Scalar x) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  detail::require_degree(n, "hermite_function");
  detail::require_finite(x, "hermite_function");
  if (abs(x) > Scalar(kMaxHermiteArgument)) throw RangeError("hermite_function: |x| > 50");

  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar prev = 0;
  Scalar cur = 1;
  Scalar log_scale = 0;
  for (int k = 0; k < n; ++k) {
    Scalar next = sqrt(Scalar(2) / Scalar(k + 1)) * x * cur - sqrt(Scalar(k) / Scalar(k + 1)) * prev;
    prev = cur;
    cur = next;
    if (abs(cur) > detail::kRescaleThreshold<Scalar>) {
      prev /= detail::kRescaleThreshold<Scalar>;
      cur /= detail::kRescaleThreshold<Scalar>;
      log_scale += log(detail::kRescaleThreshold<Scalar>);
    }
  }
  return cur * exp(log_scale - x * x / 2 - log(pi) / 4);
}

/// Orthonormal Laguerre function on [0, inf) under du:
///   sqrt(p!/(p+ell)!) u^{ell/2} e^{-u/2} L_p^{(ell)}(u).
/// Sign follows L_p^{(ell)}.
template <typename Scalar>
Scalar laguerre_function(int p, int ell, Scalar u) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  detail::require_degree(p, "laguerre_function");
  detail::require_degree(ell, "laguerre_function");
  detail::require_finite(u, "laguerre_function");
  if (u < 0) throw DomainError("laguerre_function: negative argument");
  if (u > Scalar(kMaxLaguerreArgument)) throw RangeError("laguerre_function: u > 2500");
  if (u == 0 && ell > 0) return 0;

  const Scalar a = Scalar(ell);
  Scalar prev = 0;
  Scalar cur = 1;
  Scalar log_scale = 0;
  for (int k = 0; k < p; ++k) {
    const Scalar kk = Scalar(k);
    Scalar next = ((2 * kk + 1 + a - u) * cur - sqrt(kk * (kk + a)) * prev) / sqrt((kk + 1) * (kk + 1 + a));
    prev = cur;
    cur = next;
    if (abs(cur) > detail::kRescaleThreshold<Scalar>) {
      prev /= detail::kRescaleThreshold<Scalar>;
      cur /= detail::kRescaleThreshold<Scalar>;
      log_scale += log(detail::kRescaleThreshold<Scalar>);
    }
  }
  Scalar log_prefactor = log_scale - u / 2 - detail::log_factorial_as<Scalar>(ell) / 2;
  if (ell > 0) log_prefactor += a / 2 * log(u);
  return cur * exp(log_prefactor);
}

namespace detail {

// I_ell(z) for 0 <= z <= kBesselSeriesLimit, unscaled.
template <typename Scalar>
Scalar bessel_i_series(int ell, Scalar z) {
  using std::abs;
  using std::exp;
  using std::log;
  if (z == 0) return ell == 0 ? Scalar(1) : Scalar(0);
  const Scalar half = z / 2;
  Scalar term = exp(Scalar(ell) * log(half) - log_factorial_as<Scalar>(ell));
  Scalar sum = term;
  const Scalar quarter_sq = half * half;
  for (int k = 0; k < 500; ++k) {
    term *= quarter_sq / (Scalar(k + 1) * Scalar(k + 1 + ell));
    sum += term;
    if (term <= std::numeric_limits<Scalar>::epsilon() * sum / 4) break;
  }
  return sum;
}

// e^{-z} I_ell(z) for z > kBesselSeriesLimit by Miller's backward recurrence,
// normalized with e^z = I_0(z) + 2 sum_{k>=1} I_k(z).
template <typename Scalar>
Scalar bessel_i_scaled_miller(int ell, Scalar z) {
  using std::ceil;
  using std::sqrt;
  const Scalar big = kRescaleThreshold<Scalar>;
  const int start =
      static_cast<int>(ceil(sqrt(Scalar(ell) * Scalar(ell) + 100 * z))) + 20;
  Scalar upper = 0;  // I_{k+1}
  Scalar cur = std::numeric_limits<Scalar>::min() * Scalar(1e10);  // I_k, arbitrary seed
  Scalar norm = 0;
  Scalar at_ell = 0;
  for (int k = start; k >= 1; --k) {
    if (k == ell) at_ell = cur;
    norm += 2 * cur;
    Scalar lower = (2 * Scalar(k) / z) * cur + upper;  // I_{k-1}
    upper = cur;
    cur = lower;
    if (cur > big) {
      cur /= big;
      upper /= big;
      norm /= big;
      at_ell /= big;
    }
  }
  if (ell == 0) at_ell = cur;
  norm += cur;
  return at_ell / norm;
}

}  // namespace detail

/// Exponentially scaled modified Bessel function e^{-|z|} I_ell(z), ell >= 0.
/// Negative z uses I_ell(-z) = (-1)^ell I_ell(z).
template <typename Scalar>
Scalar bessel_i_scaled(int ell, Scalar z) {
  using std::abs;
  using std::exp;
  if (ell < 0) throw DomainError("bessel_i_scaled: negative order");
  detail::require_finite(z, "bessel_i_scaled");
  const Scalar az = abs(z);
  Scalar value = az <= Scalar(kBesselSeriesLimit) ? detail::bessel_i_series(ell, az) * exp(-az)
                                                 : detail::bessel_i_scaled_miller(ell, az);
  return (z < 0 && ell % 2 == 1) ? -value : value;
}

/// Modified Bessel function of the first kind I_ell(z), ell >= 0.
template <typename Scalar>
Scalar bessel_i(int ell, Scalar z) {
  using std::abs;
  using std::exp;
  using std::isfinite;
  if (ell < 0) throw DomainError("bessel_i: negative order");
  detail::require_finite(z, "bessel_i");
  const Scalar az = abs(z);
  Scalar value;
  if (az <= Scalar(kBesselSeriesLimit)) {
    value = detail::bessel_i_series(ell, az);
  } else {
    value = detail::bessel_i_scaled_miller(ell, az) * exp(az);
    if (!isfinite(value)) throw RangeError("bessel_i: overflow, use bessel_i_scaled");
  }
  return (z < 0 && ell % 2 == 1) ? -value : value;
}

}  // namespace schmidtlab
