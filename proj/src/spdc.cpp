#include "schmidtlab/spdc.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "schmidtlab/error.hpp"
#include "schmidtlab/quadrature.hpp"
#include "schmidtlab/specfun.hpp"

namespace schmidtlab {
namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

DerivedParams complete(double b, double sigma, double b_sigma) {
  DerivedParams dp;
  dp.b = b;
  dp.sigma = sigma;
  dp.b_sigma = b_sigma;
  dp.gamma = 2.0 * std::sqrt(b / sigma);
  dp.mu = mu_from_b_sigma(dp.b_sigma);
  dp.mu_signed = dp.b_sigma < 1.0 ? -dp.mu : dp.mu;
  dp.G = b * b + 1.0 / (sigma * sigma);
  const double bs2 = dp.b_sigma * dp.b_sigma;
  dp.eta_A = (bs2 - 1.0) / (bs2 + 1.0);
  dp.norm_N = dp.gamma * dp.gamma / std::numbers::pi;
  return dp;
}

}  // namespace

PumpCrystalParams PumpCrystalParams::from_wavelength(double pump_waist, double pump_wavelength,
                                                     double crystal_length, double phase_offset) {
  if (!positive_finite(pump_wavelength)) throw DomainError("pump wavelength must be positive");
  PumpCrystalParams p{pump_waist, 2.0 * std::numbers::pi / pump_wavelength, crystal_length, phase_offset};
  p.validate();
  return p;
}

void PumpCrystalParams::validate() const {
  if (!positive_finite(pump_waist)) throw DomainError("pump waist must be positive and finite");
  if (!positive_finite(pump_wavenumber)) throw DomainError("pump wavenumber must be positive and finite");
  if (!positive_finite(crystal_length)) throw DomainError("crystal length must be positive and finite");
  if (!std::isfinite(phase_offset)) throw DomainError("phase offset must be finite");
}

double canonical_b_sigma(double b_sigma) {
  if (!positive_finite(b_sigma)) throw DomainError("b_sigma must be positive and finite");
  // Route both branches through one reciprocal so that s and fl(1/s) land on
  // the same t and every derived quantity is bitwise symmetric.
  return b_sigma <= 1.0 ? 1.0 / (1.0 / b_sigma) : 1.0 / b_sigma;
}

double mu_from_b_sigma(double b_sigma) {
  const double t = canonical_b_sigma(b_sigma);
  return (1.0 - t) / (1.0 + t);
}

double one_minus_mu_sq(double b_sigma) {
  const double t = canonical_b_sigma(b_sigma);
  return 4.0 * t / ((1.0 + t) * (1.0 + t));
}

DerivedParams derive_params(const PumpCrystalParams& input) {
  input.validate();
  const double b = 0.5 * std::sqrt(input.crystal_length / input.pump_wavenumber);
  const double sigma = 2.0 / input.pump_waist;
  DerivedParams dp = complete(b, sigma, b * sigma);
  dp.rayleigh_z_r = input.pump_wavenumber * input.pump_waist * input.pump_waist / 2.0;
  return dp;
}

DerivedParams derive_params(const BSigma& input) {
  if (!positive_finite(input.b) || !positive_finite(input.sigma))
    throw DomainError("b and sigma must be positive and finite");
  return complete(input.b, input.sigma, input.b * input.sigma);
}

DerivedParams derive_params(const ScaledBSigma& input) {
  if (!positive_finite(input.b_sigma) || !positive_finite(input.gamma))
    throw DomainError("b_sigma and gamma must be positive and finite");
  // gamma^2 = 4 b / sigma and b sigma given.
  const double b = 0.5 * input.gamma * std::sqrt(input.b_sigma);
  DerivedParams dp = complete(b, input.b_sigma / b, input.b_sigma);
  dp.gamma = input.gamma;
  dp.norm_N = dp.gamma * dp.gamma / std::numbers::pi;
  return dp;
}

double kernel_gauss(const DerivedParams& dp, const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s) {
  const double plus = (q_i + q_s).squaredNorm();
  const double minus = (q_i - q_s).squaredNorm();
  return dp.norm_N * std::exp(-plus / (dp.sigma * dp.sigma) - dp.b * dp.b * minus);
}

double kernel_gauss_polar(const DerivedParams& dp, double rho_i, double phi_i, double rho_s, double phi_s) {
  const double cross = 2.0 * rho_i * rho_s * std::cos(phi_i - phi_s);
  const double radial = rho_i * rho_i + rho_s * rho_s;
  return dp.norm_N * std::exp(-(radial + cross) / (dp.sigma * dp.sigma) - dp.b * dp.b * (radial - cross));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double sinc_squared_half_line_integral(double phase_offset) {
  // Panels of length pi starting at Phi, then the tail
  // int_W^inf sin^2(w)/w^2 dw = 1/(2W) + O(W^-2).
  constexpr int kPanels = 4000;
  constexpr int kNodesPerPanel = 24;
  static const QuadratureGrid rule = gauss_legendre_grid(kNodesPerPanel);
  const double half = std::numbers::pi / 2.0;
  double total = 0.0;
  for (int panel = 0; panel < kPanels; ++panel) {
    const double mid = phase_offset + (panel + 0.5) * std::numbers::pi;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
      const double s = sinc(mid + half * rule.nodes(i));
      acc += rule.weights(i) * s * s;
    }
    total += half * acc;
  }
  const double end = phase_offset + kPanels * std::numbers::pi;
  return total + 0.5 / end;
}

SincKernel::SincKernel(const PumpCrystalParams& params)
    : SincKernel(BSigma{0.5 * std::sqrt(params.crystal_length / params.pump_wavenumber), 2.0 / params.pump_waist},
                 params.phase_offset) {
  params.validate();
}

SincKernel::SincKernel(const BSigma& widths, double phase_offset)
    : b_(widths.b), sigma_(widths.sigma), phase_(phase_offset), norm_(0.0) {
  if (!positive_finite(b_) || !positive_finite(sigma_)) throw DomainError("b and sigma must be positive");
  if (!std::isfinite(phase_)) throw DomainError("phase offset must be finite");
  // With q+ = q_i + q_s and q- = q_i - q_s (Jacobian 1/4), the squared norm
  // factorizes into (pi sigma^2 / 2) * (pi / (2 b^2)) * int_0^inf sinc^2(v + Phi) dv.
  const double pi = std::numbers::pi;
  const double squared = 0.25 * (pi * sigma_ * sigma_ / 2.0) * (pi / (2.0 * b_ * b_)) *
                         sinc_squared_half_line_integral(phase_);
  norm_ = 1.0 / std::sqrt(squared);
}

double SincKernel::unnormalized(double plus_sq, double minus_sq) const {
  // w_p^2/4 = 1/sigma^2 and L/(2 k_p) = 2 b^2.
  return std::exp(-plus_sq / (sigma_ * sigma_)) * sinc(2.0 * b_ * b_ * minus_sq + phase_);
}

double SincKernel::operator()(const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s) const {
  return norm_ * unnormalized((q_i + q_s).squaredNorm(), (q_i - q_s).squaredNorm());
}

double SincKernel::polar(double rho_i, double phi_i, double rho_s, double phi_s) const {
  const double cross = 2.0 * rho_i * rho_s * std::cos(phi_i - phi_s);
  const double radial = rho_i * rho_i + rho_s * rho_s;
  return norm_ * unnormalized(radial + cross, radial - cross);
}

double fourier_component(int ell, const DerivedParams& dp, double rho_i, double rho_s) {
  if (!(rho_i >= 0.0) || !(rho_s >= 0.0)) throw DomainError("fourier_component: negative radius");
  const double z = 2.0 * (dp.b * dp.b - 1.0 / (dp.sigma * dp.sigma)) * rho_i * rho_s;
  const double envelope = -dp.G * (rho_i * rho_i + rho_s * rho_s) + std::abs(z);
  return dp.norm_N * std::exp(envelope) * bessel_i_scaled(std::abs(ell), z);
}

}  // namespace schmidtlab
