#pragma once

// Schmidt number, Renyi and von Neumann entropies of the double-Gaussian
// state, their large-K approximations, and the retention of shared bits
// when only a fraction of the Schmidt modes is detected. Entropies in bits.

#include <span>
#include <utility>
#include <vector>

#include "schmidtlab/spectrum.hpp"

namespace schmidtlab {

/// K = (b sigma + 1/(b sigma))^2 / 4, symmetric under b sigma -> 1/(b sigma).
double schmidt_number(double b_sigma);

/// Inverse of schmidt_number. The default branch is <= 1; the reciprocal
/// branch (>= 1) describes the same state.
double bsigma_from_k(double K, bool reciprocal_branch = false);

enum class RenyiForm {
  corrected,  // log argument (1 - mu^{2 alpha}) / (1 - mu^2)^alpha, always >= 0
  inverted,   // the reciprocal argument, which comes out <= 0; comparison only
};

/// Closed-form Renyi entropy of order alpha (alpha > 0, alpha != 1).
double renyi_closed(double alpha, double b_sigma, RenyiForm form = RenyiForm::corrected);

/// Direct evaluation of log2(sum lambda^alpha) / (1 - alpha) over stored
/// entries. For alpha <= 1 the omitted tail must be below 1e-14, and for
/// alpha < 1 accuracy is governed by the much larger tail of sum lambda^alpha,
/// so build the spectrum with a tight TailMass.
double renyi_from_spectrum(double alpha, const SchmidtSpectrum& spectrum);

/// f(alpha) = 2 - log2(alpha^2) / (alpha - 1); f(2) = 0.
double f_alpha(double alpha);

/// Large-K form log2 K - f(alpha).
double renyi_approx(double alpha, double K);

/// Exact von Neumann entropy 2 [-log2(1 - mu^2) - mu^2/(1 - mu^2) log2 mu^2].
double von_neumann_exact(double b_sigma);

/// -sum lambda log2 lambda over stored entries.
double von_neumann_from_spectrum(const SchmidtSpectrum& spectrum);

enum class ApproxForm {
  leading_log,  // 1 + log2 K
  expansion,    // (2/ln 2 - 2) + log2 K - 1/(K ln 8)
};

double von_neumann_approx(double K, ApproxForm form);

struct EntropyReport {
  double b_sigma = 1.0;
  double K = 1.0;
  std::vector<std::pair<double, double>> renyi;  // (alpha, H_alpha)
  double S_exact = 0.0;
  double S_approx_eq21 = 1.0;
  double S_expansion_eq22 = 0.0;
};

EntropyReport entropy_report(double b_sigma, std::span<const double> alphas,
                             RenyiForm form = RenyiForm::corrected);

enum class RetentionModel {
  leading_log,     // S(K) ~ 1 + log2 K
  exact_spectrum,  // exact S along the b sigma family
};

/// eta = K_eff / K, the fraction of Schmidt modes reached by the detector.
struct DetectionScenario {
  double eta = 1.0;
  RetentionModel model = RetentionModel::leading_log;
};

/// S(eta K) / S(K). Losing modes is modelled as moving along the b sigma
/// family to Schmidt number eta K; eta K < 1 is rejected.
double retained_fraction(double K, const DetectionScenario& scenario);

struct RequiredK {
  double K = 1.0;
  double b_sigma = 1.0;         // bsigma_from_k(K), the <= 1 branch
  double tolerance = 0.0;       // width of the final bisection bracket in K
};

/// Relative bracket width at which required_k stops.
inline constexpr double kRequiredKTolerance = 1e-9;

/// Smallest K whose retained fraction reaches target_fraction.
RequiredK required_k(double eta, double target_fraction, RetentionModel model);

}  // namespace schmidtlab
