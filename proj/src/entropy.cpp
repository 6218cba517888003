#include "schmidtlab/entropy.hpp"

#include <cmath>
#include <numbers>

#include "schmidtlab/error.hpp"

namespace schmidtlab {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("Renyi order must be positive and finite");
  if (alpha == 1.0) throw DomainError("Renyi order 1 is the von Neumann entropy; use von_neumann_exact");
}

void require_k(double K) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("Schmidt number must be >= 1 and finite");
}

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("detection fraction eta must lie in (0, 1]");
}

class Neumaier {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double exact_entropy_at_k(double K) { return von_neumann_exact(bsigma_from_k(K)); }

}  // namespace

double schmidt_number(double b_sigma) {
  const double t = canonical_b_sigma(b_sigma);
  const double s = t + 1.0 / t;
  return 0.25 * s * s;
}

double bsigma_from_k(double K, bool reciprocal_branch) {
  require_k(K);
  const double sum = std::sqrt(K) + std::sqrt(K - 1.0);
  return reciprocal_branch ? sum : 1.0 / sum;
}

double renyi_closed(double alpha, double b_sigma, RenyiForm form) {
  require_alpha(alpha);
  const double mu = mu_from_b_sigma(b_sigma);
  if (mu == 0.0) return 0.0;
  const double x = mu * mu;
  // log2[(1 - x^alpha) / (1 - x)^alpha] with both factors free of cancellation.
  const double log_numerator = std::log2(-std::expm1(alpha * std::log(x)));
  const double log_denominator = alpha * std::log2(one_minus_mu_sq(b_sigma));
  const double h = 2.0 / (alpha - 1.0) * (log_numerator - log_denominator);
  return form == RenyiForm::corrected ? h : -h;
}

double renyi_from_spectrum(double alpha, const SchmidtSpectrum& spectrum) {
  require_alpha(alpha);
  if (alpha < 1.0 && spectrum.tail_mass >= 1e-14)
    throw PrecisionError("renyi_from_spectrum: tail mass too large for alpha < 1");
  Neumaier acc;
  for (const auto& e : spectrum.entries) acc.add(std::exp(alpha * std::log(e.lambda)));
  return std::log2(acc.value()) / (1.0 - alpha);
}

double f_alpha(double alpha) {
  require_alpha(alpha);
  return 2.0 - std::log2(alpha * alpha) / (alpha - 1.0);
}

double renyi_approx(double alpha, double K) {
  require_k(K);
  return std::log2(K) - f_alpha(alpha);
}

double von_neumann_exact(double b_sigma) {
  const double mu = mu_from_b_sigma(b_sigma);
  if (mu == 0.0) return 0.0;
  const double x = mu * mu;
  const double one_minus_x = one_minus_mu_sq(b_sigma);
  return 2.0 * (-std::log2(one_minus_x) - x / one_minus_x * std::log2(x));
}

double von_neumann_from_spectrum(const SchmidtSpectrum& spectrum) {
  Neumaier acc;
  for (const auto& e : spectrum.entries) acc.add(-e.lambda * std::log2(e.lambda));
  return acc.value();
}

double von_neumann_approx(double K, ApproxForm form) {
  require_k(K);
  if (form == ApproxForm::leading_log) return 1.0 + std::log2(K);
  const double ln2 = std::numbers::ln2;
  return (2.0 / ln2 - 2.0) + std::log2(K) - 1.0 / (K * std::log(8.0));
}

EntropyReport entropy_report(double b_sigma, std::span<const double> alphas, RenyiForm form) {
  EntropyReport r;
  r.b_sigma = b_sigma;
  r.K = schmidt_number(b_sigma);
  for (double a : alphas) r.renyi.emplace_back(a, renyi_closed(a, b_sigma, form));
  r.S_exact = von_neumann_exact(b_sigma);
  r.S_approx_eq21 = von_neumann_approx(r.K, ApproxForm::leading_log);
  r.S_expansion_eq22 = von_neumann_approx(r.K, ApproxForm::expansion);
  return r;
}

double retained_fraction(double K, const DetectionScenario& scenario) {
  require_k(K);
  require_eta(scenario.eta);
  const double kept = scenario.eta * K;
  if (kept < 1.0) throw DomainError("retained_fraction: eta * K < 1 leaves less than one mode");
  if (scenario.eta == 1.0) return 1.0;
  if (scenario.model == RetentionModel::leading_log)
    return (1.0 + std::log2(kept)) / (1.0 + std::log2(K));
  return exact_entropy_at_k(kept) / exact_entropy_at_k(K);
}

RequiredK required_k(double eta, double target_fraction, RetentionModel model) {
  require_eta(eta);
  if (!(target_fraction > 0.0 && target_fraction < 1.0))
    throw DomainError("required_k: target fraction must lie in (0, 1)");
  if (eta == 1.0) return {1.0, 1.0, 0.0};

  const DetectionScenario scenario{eta, model};
  const auto reaches = [&](double K) { return retained_fraction(K, scenario) >= target_fraction; };
  double lo = 1.0 / eta;
  if (reaches(lo)) return {lo, bsigma_from_k(lo), 0.0};
  double hi = 2.0 * lo;
  while (!reaches(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) throw DomainError("required_k: target not reachable");
  }
  while (hi - lo > kRequiredKTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    (reaches(mid) ? hi : lo) = mid;
  }
  return {hi, bsigma_from_k(hi), hi - lo};
}

}  // namespace schmidtlab
