#pragma once

// Independent numerical checks of the analytic Schmidt spectra: Nystrom
// discretization plus SVD of the 1D and per-OAM radial kernels, and direct
// evaluation of the two bilinear generating-function identities behind them.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "schmidtlab/spdc.hpp"

namespace schmidtlab {

enum class KernelTag { gauss_1d, radial_ell, sinc_radial_ell };

struct NumericalSpectrum {
  Eigen::VectorXd singular_values;  // descending; numerical zeros set to 0
  int grid_size = 0;
  KernelTag kernel_tag = KernelTag::gauss_1d;
  int ell = 0;                      // OAM index for radial kernels
  bool accuracy_warning = false;    // b sigma outside [1e-3, 1e3]
  bool exploratory = false;         // no analytic reference exists

  /// sum s^2, the kernel mass captured by the discretization.
  double captured_mass() const { return singular_values.squaredNorm(); }
};

inline constexpr int kMinOracleGrid = 32;
/// Singular values below this multiple of eps * s_0 are reported as 0.
inline constexpr double kNumericalZeroFactor = 1e3;

/// Spectrum of the 1D factor (gamma/sqrt(pi)) e^{-G(x^2 + y^2 - 2 eta_A x y)}
/// of the double-Gaussian kernel, on a Gauss-Hermite grid in gamma x.
NumericalSpectrum kernel_svd_1d(const DerivedParams& dp, int n_grid);

/// Spectrum of the OAM-ell radial kernel 2 pi F_ell(rho_i, rho_s) under
/// rho d rho, on a generalized Gauss-Laguerre grid in u = gamma^2 rho^2.
NumericalSpectrum radial_kernel_svd(int ell, const DerivedParams& dp, int n_grid);

/// Same construction for the sinc kernel; the angular integral is done by
/// the periodic trapezoid rule. Exploratory only.
NumericalSpectrum sinc_radial_kernel_svd(int ell, const SincKernel& kernel, int n_grid);

inline constexpr std::uint64_t kDefaultOracleSeed = 20240607;

/// Max relative error of the Mehler expansion
///   e^{-G(x^2+y^2-2 eta_A x y)} = (sqrt(pi)/gamma) sqrt(1-mu^2) sum mu_signed^n h_n(x) h_n(y)
/// over uniform random points in [-3/gamma, 3/gamma]^2.
double verify_mehler(const DerivedParams& dp, int sample_count, std::uint64_t seed = kDefaultOracleSeed);

/// Max relative error of
///   sum_p mu^{2p} r_p(x) r_p(y)
///     = 2 mu^{-ell} / (1 - mu^2) e^{-(x^2+y^2)(1+mu^2)/(2(1-mu^2))} I_ell(2 x y mu / (1 - mu^2))
/// over uniform random points in (0, 4]^2.
double verify_hardy_hille(int ell, double mu, int sample_count, std::uint64_t seed = kDefaultOracleSeed);

/// K = (sum S^2)^2 / sum S^4 for the 2D amplitudes S = s_m s_n built from one
/// 1D spectrum. Throws PrecisionError if more than max_missing_mass of the
/// 1D kernel is not captured.
double numeric_k_cartesian(const NumericalSpectrum& axis, double max_missing_mass = 1e-10);

/// K from radial spectra for ell = 0..L (entry i holds ell = i); every ell > 0
/// block is counted for +ell and -ell.
double numeric_k_polar(const std::vector<NumericalSpectrum>& per_ell, double max_missing_mass = 1e-10);

/// Smallest L with spiral-spectrum tail beyond |ell| = L below tail.
int oam_cutoff(double b_sigma, double tail);

}  // namespace schmidtlab
