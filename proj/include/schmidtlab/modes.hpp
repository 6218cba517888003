#pragma once

// Transverse mode functions in momentum space: 1D/2D Hermite-Gauss,
// Laguerre-Gauss, and the radial functions of the OAM-resolved kernel.
// All carry the single width parameter gamma; the Gaussian envelope is
// exp(-gamma^2 q^2 / 2) in every basis.

#include <complex>
#include <cstdlib>
#include <numbers>
#include <variant>

#include <Eigen/Core>

#include "schmidtlab/error.hpp"
#include "schmidtlab/specfun.hpp"

namespace schmidtlab {

/// Mode width gamma (length units), so gamma*q is dimensionless.
template <typename Scalar = double>
class ModeScale {
 public:
  explicit ModeScale(Scalar gamma) : gamma_(gamma) {
    using std::isfinite;
    if (!(gamma > 0) || !isfinite(gamma)) throw DomainError("ModeScale: gamma must be positive and finite");
  }
  Scalar gamma() const { return gamma_; }

 private:
  Scalar gamma_;
};

struct CartesianIndex {
  int m = 0;
  int n = 0;
  friend bool operator==(const CartesianIndex&, const CartesianIndex&) = default;
};

struct PolarIndex {
  int ell = 0;
  int p = 0;
  friend bool operator==(const PolarIndex&, const PolarIndex&) = default;
};

using ModeIndex = std::variant<CartesianIndex, PolarIndex>;

/// Mode order N: m+n or |ell|+2p.
inline int mode_order(const CartesianIndex& i) { return i.m + i.n; }
inline int mode_order(const PolarIndex& i) { return std::abs(i.ell) + 2 * i.p; }
inline int mode_order(const ModeIndex& i) {
  return std::visit([](const auto& v) { return mode_order(v); }, i);
}

/// h_n(gamma q) = sqrt(gamma) e^{-gamma^2 q^2/2} H_n(gamma q) / sqrt(n! 2^n sqrt(pi)).
template <typename Scalar>
Scalar hg_1d(int n, const ModeScale<Scalar>& scale, Scalar q) {
  using std::sqrt;
  return sqrt(scale.gamma()) * hermite_function(n, scale.gamma() * q);
}

/// Array form of hg_1d; returns an expression evaluated lazily by Eigen.
template <typename Derived>
auto hg_1d(int n, const ModeScale<typename Derived::Scalar>& scale, const Eigen::ArrayBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  return q.unaryExpr([n, scale](Scalar v) { return hg_1d(n, scale, v); });
}

/// h_{mn}(q, q_perp) = h_m(gamma q) h_n(gamma q_perp).
template <typename Scalar>
Scalar hg_2d(int m, int n, const ModeScale<Scalar>& scale, Scalar q, Scalar q_perp) {
  return hg_1d(m, scale, q) * hg_1d(n, scale, q_perp);
}

/// r_p^{(ell)}(x) = sqrt(2 p!/(p+|ell|)!) e^{-x^2/2} x^{|ell|} L_p^{(|ell|)}(x^2),
/// orthonormal under x dx on [0, inf).
template <typename Scalar>
Scalar radial_mode(int ell, int p, Scalar x) {
  using std::sqrt;
  if (x < 0) throw DomainError("radial_mode: negative radius");
  return sqrt(Scalar(2)) * laguerre_function(p, std::abs(ell), x * x);
}

/// LG^ell_p(gamma rho, phi) with Laguerre argument gamma^2 rho^2 and phase
/// e^{+i ell phi}; unit norm under rho d rho d phi.
/// |lg| = gamma / sqrt(2 pi) * r_p^{(|ell|)}(gamma rho).
template <typename Scalar>
std::complex<Scalar> lg(int ell, int p, const ModeScale<Scalar>& scale, Scalar rho, Scalar phi) {
  using std::sqrt;
  if (rho < 0) throw DomainError("lg: negative radius");
  const Scalar radial =
      scale.gamma() / sqrt(2 * std::numbers::pi_v<Scalar>) * radial_mode(ell, p, scale.gamma() * rho);
  using std::cos;
  using std::sin;
  // radial carries the Laguerre sign, so std::polar (which wants a modulus) is out.
  return {radial * cos(Scalar(ell) * phi), radial * sin(Scalar(ell) * phi)};
}

/// lg at a cartesian point (q, q_perp).
template <typename Scalar>
std::complex<Scalar> lg_cartesian(int ell, int p, const ModeScale<Scalar>& scale, Scalar q, Scalar q_perp) {
  using std::atan2;
  using std::hypot;
  return lg(ell, p, scale, hypot(q, q_perp), atan2(q_perp, q));
}

}  // namespace schmidtlab
