#pragma once

// Physical parameters of the down-converted biphoton and its transverse
// momentum kernels. Lengths in meters, wavevectors in inverse meters.

#include <optional>

#include <Eigen/Core>

#include "schmidtlab/modes.hpp"

namespace schmidtlab {

/// Gaussian pump and crystal.
struct PumpCrystalParams {
  double pump_waist = 0.0;       // w_p [m]
  double pump_wavenumber = 0.0;  // k_p [1/m]
  double crystal_length = 0.0;   // L [m]
  double phase_offset = 0.0;     // Phi, dimensionless

  static PumpCrystalParams from_wavelength(double pump_waist, double pump_wavelength, double crystal_length,
                                           double phase_offset = 0.0);
  void validate() const;
};

/// Kernel widths given directly: b [m], sigma [1/m].
struct BSigma {
  double b = 0.0;
  double sigma = 0.0;
};

/// Dimensionless control parameter plus the mode width gamma [m].
struct ScaledBSigma {
  double b_sigma = 0.0;
  double gamma = 1.0;
};

/// Every scalar of the double-Gaussian state, derived once and immutable.
struct DerivedParams {
  double b = 0.0;                        // [m]
  double sigma = 0.0;                    // [1/m]
  double b_sigma = 0.0;                  // dimensionless, sqrt(L / 2 z_r)
  std::optional<double> rayleigh_z_r;    // [m], only known from pump/crystal input
  double gamma = 0.0;                    // [m], 2 sqrt(b / sigma)
  double mu = 0.0;                       // |b sigma - 1| / (b sigma + 1)
  double mu_signed = 0.0;                // (b sigma - 1) / (b sigma + 1)
  double G = 0.0;                        // [m^2], b^2 + 1/sigma^2
  double eta_A = 0.0;                    // (b^2 sigma^2 - 1) / (b^2 sigma^2 + 1)
  double norm_N = 0.0;                   // [1/m^2], gamma^2 / pi

  ModeScale<double> scale() const { return ModeScale<double>(gamma); }
  double gamma_prime() const { return gamma / 2.0; }
};

DerivedParams derive_params(const PumpCrystalParams& input);
DerivedParams derive_params(const BSigma& input);
DerivedParams derive_params(const ScaledBSigma& input);

/// min(b sigma, 1/(b sigma)); every spectral quantity depends only on this.
double canonical_b_sigma(double b_sigma);
/// mu = |b sigma - 1| / (b sigma + 1), invariant under b sigma -> 1/(b sigma).
double mu_from_b_sigma(double b_sigma);
/// 1 - mu^2 = 4 t / (1 + t)^2 without cancellation.
double one_minus_mu_sq(double b_sigma);

/// Double-Gaussian kernel N exp(-|q_i + q_s|^2/sigma^2) exp(-b^2 |q_i - q_s|^2),
/// unit L2 norm over R^2 x R^2.
double kernel_gauss(const DerivedParams& dp, const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s);

/// kernel_gauss in polar coordinates.
double kernel_gauss_polar(const DerivedParams& dp, double rho_i, double phi_i, double rho_s, double phi_s);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// Exact phase-matching kernel
///   N' exp(-(w_p^2/4)|q_s + q_i|^2) sinc(L |q_i - q_s|^2 / (2 k_p) + Phi).
/// N' has no closed form for general Phi; it is found by quadrature when the
/// kernel is constructed.
class SincKernel {
 public:
  explicit SincKernel(const PumpCrystalParams& params);
  /// Same kernel from the widths (b, sigma) with phase offset Phi.
  SincKernel(const BSigma& widths, double phase_offset);

  double operator()(const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s) const;
  double polar(double rho_i, double phi_i, double rho_s, double phi_s) const;

  double norm() const { return norm_; }
  double b() const { return b_; }
  double sigma() const { return sigma_; }
  double phase_offset() const { return phase_; }

 private:
  double unnormalized(double plus_sq, double minus_sq) const;

  double b_;
  double sigma_;
  double phase_;
  double norm_;
};

/// int_0^inf sinc^2(v + Phi) dv by composite Gauss-Legendre plus an
/// asymptotic tail; pi/2 at Phi = 0.
double sinc_squared_half_line_integral(double phase_offset);

/// Angular Fourier component of kernel_gauss,
///   (1/2pi) int kernel e^{-i ell (phi_i - phi_s)} d(phi_i - phi_s)
///     = N e^{-G(rho_i^2 + rho_s^2)} I_|ell|(2 (b^2 - 1/sigma^2) rho_i rho_s).
/// The Bessel argument is negative for b sigma < 1 and handled by parity.
double fourier_component(int ell, const DerivedParams& dp, double rho_i, double rho_s);

}  // namespace schmidtlab
