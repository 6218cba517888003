#pragma once

// Analytic Schmidt spectra of the double-Gaussian state.
//
// Probabilities lambda are stored throughout; the Schmidt amplitude is
// sqrt(lambda) = (1 - mu^2) mu^N for mode order N in either basis. For
// b sigma < 1 the idler partner of each signal mode is its parity image,
// which shows up as the factor sign(mu_signed)^N in reconstructions.

#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "schmidtlab/modes.hpp"
#include "schmidtlab/spdc.hpp"

namespace schmidtlab {

enum class Basis { cartesian, polar };

struct SpectrumEntry {
  ModeIndex index;
  double lambda = 0.0;

  int order() const { return mode_order(index); }
  double amplitude() const;
};

struct MaxOrder {
  int value = 0;
};
struct TailMass {
  double epsilon = 1e-12;
};
using Truncation = std::variant<MaxOrder, TailMass>;

/// Default tail target and the hard cap on the truncation order.
inline constexpr double kDefaultTailMass = 1e-12;
inline constexpr int kMaxSpectrumOrder = 2000;

struct SchmidtSpectrum {
  Basis basis = Basis::cartesian;
  std::vector<SpectrumEntry> entries;  // sorted by order, then m asc / ell asc
  double b_sigma = 1.0;
  int max_order = 0;
  double tail_mass = 0.0;  // closed-form mass of all orders > max_order

  /// Idler modes are parity-reflected (b sigma < 1).
  bool idler_parity_flip() const { return b_sigma < 1.0; }
  /// Sum of the stored probabilities (compensated).
  double total() const;
};

/// Probability of one mode of order N: (1 - mu^2)^2 mu^{2N}.
double order_lambda(int order, double b_sigma);
/// Schmidt amplitude of one mode of order N: (1 - mu^2) mu^N.
double order_amplitude(int order, double b_sigma);

double cartesian_lambda(int m, int n, double b_sigma);
double polar_lambda(int ell, int p, double b_sigma);

/// Mass of all orders strictly above max_order,
///   sum_{N > max_order} (N + 1) (1 - mu^2)^2 mu^{2N}, in closed form.
double tail_mass_beyond(int max_order, double b_sigma);

SchmidtSpectrum build_spectrum(double b_sigma, Basis basis, Truncation truncation = TailMass{kDefaultTailMass});

struct SpiralSpectrum {
  std::vector<std::pair<int, double>> weights;  // (ell, P_ell) for |ell| <= ell_max
  double tail = 0.0;                           // sum over |ell| > ell_max
};

/// OAM marginal P_ell = (1 - mu^2) mu^{2|ell|} / (1 + mu^2).
SpiralSpectrum spiral_spectrum(double b_sigma, int ell_max);

/// Partial Schmidt sum of the kernel at a cartesian point pair. Polar
/// spectra are evaluated at the same points in polar coordinates; the
/// imaginary part vanishes up to rounding.
std::complex<double> reconstruct_kernel(const SchmidtSpectrum& spectrum, const DerivedParams& dp,
                                        const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s);

/// Bound on |reconstruction - kernel_gauss| / norm_N from the omitted orders,
/// using |h_n| <= 1.0865 pi^{-1/4} sqrt(gamma).
double reconstruction_tail_bound(const SchmidtSpectrum& spectrum);

/// Unitary map from the order-N HG modes h_{N-k,k}, k = 0..N, to the LG
/// modes with |ell| + 2p = N (rows ordered by ell ascending).
struct ConversionBlock {
  int order = 0;
  std::vector<PolarIndex> rows;
  Eigen::MatrixXcd matrix;

  double unitarity_residual() const;
};

/// Largest order for which the integer expansion coefficients are exact.
inline constexpr int kMaxConversionOrder = 60;

ConversionBlock hg_to_lg_block(int order);

}  // namespace schmidtlab
