#include "schmidtlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <string>

#include "schmidtlab/error.hpp"
#include "schmidtlab/specfun.hpp"

namespace schmidtlab {
namespace {

// Cramer's bound |psi_n(x)| <= kCramer * pi^{-1/4}.
constexpr double kCramer = 1.086435;

double neumaier_sum(const std::vector<SpectrumEntry>& entries) {
  double sum = 0.0, comp = 0.0;
  for (const auto& e : entries) {
    const double t = sum + e.lambda;
    comp += std::abs(sum) >= std::abs(e.lambda) ? (sum - t) + e.lambda : (e.lambda - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficient of t^k in (1 - t)^n (1 + t)^m, i.e. (1/k!) d^k/dt^k at t = 0.
std::int64_t expansion_coefficient(int n, int m, int k) {
  std::int64_t c = 0;
  for (int j = 0; j <= std::min(n, k); ++j) {
    const std::int64_t term = binomial(n, j) * binomial(m, k - j);
    c += (j % 2 == 0) ? term : -term;
  }
  return c;
}

void check_same_state(const SchmidtSpectrum& spectrum, const DerivedParams& dp) {
  if (std::abs(spectrum.b_sigma - dp.b_sigma) > 1e-12 * dp.b_sigma)
    throw DomainError("reconstruct_kernel: spectrum and parameters disagree on b_sigma");
}

}  // namespace

double SpectrumEntry::amplitude() const { return std::sqrt(lambda); }

double SchmidtSpectrum::total() const { return neumaier_sum(entries); }

double order_amplitude(int order, double b_sigma) {
  if (order < 0) throw DomainError("negative mode order");
  return one_minus_mu_sq(b_sigma) * std::pow(mu_from_b_sigma(b_sigma), order);
}

double order_lambda(int order, double b_sigma) {
  const double a = order_amplitude(order, b_sigma);
  return a * a;
}

double cartesian_lambda(int m, int n, double b_sigma) {
  if (m < 0 || n < 0) throw DomainError("cartesian_lambda: negative index");
  return order_lambda(m + n, b_sigma);
}

double polar_lambda(int ell, int p, double b_sigma) {
  if (p < 0) throw DomainError("polar_lambda: negative radial index");
  return order_lambda(std::abs(ell) + 2 * p, b_sigma);
}

double tail_mass_beyond(int max_order, double b_sigma) {
  if (max_order < 0) throw DomainError("tail_mass_beyond: negative order");
  const double mu = mu_from_b_sigma(b_sigma);
  const double x = mu * mu;
  if (x == 0.0) return 0.0;
  // sum_{N >= M} (N + 1) x^N (1 - x)^2 = x^M (1 + M (1 - x)), M = max_order + 1.
  const double M = max_order + 1.0;
  return std::pow(x, M) * (1.0 + M * one_minus_mu_sq(b_sigma));
}

SchmidtSpectrum build_spectrum(double b_sigma, Basis basis, Truncation truncation) {
  const double mu = mu_from_b_sigma(b_sigma);
  int max_order = 0;
  if (const auto* by_order = std::get_if<MaxOrder>(&truncation)) {
    if (by_order->value < 0) throw DomainError("build_spectrum: negative max order");
    if (by_order->value > kMaxSpectrumOrder)
      throw RangeError("build_spectrum: max order above " + std::to_string(kMaxSpectrumOrder));
    max_order = by_order->value;
  } else {
    const double eps = std::get<TailMass>(truncation).epsilon;
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("build_spectrum: tail target must lie in (0, 1)");
    while (max_order < kMaxSpectrumOrder && tail_mass_beyond(max_order, b_sigma) > eps) ++max_order;
  }

  SchmidtSpectrum s;
  s.basis = basis;
  s.b_sigma = b_sigma;
  s.max_order = max_order;
  s.tail_mass = tail_mass_beyond(max_order, b_sigma);
  const int populated = mu == 0.0 ? 0 : max_order;
  s.entries.reserve(static_cast<std::size_t>(populated + 1) * (populated + 2) / 2);
  for (int order = 0; order <= populated; ++order) {
    const double lambda = order_lambda(order, b_sigma);
    if (!(lambda > 0.0)) break;
    if (basis == Basis::cartesian) {
      for (int m = 0; m <= order; ++m) s.entries.push_back({CartesianIndex{m, order - m}, lambda});
    } else {
      for (int ell = -order; ell <= order; ell += 2)
        s.entries.push_back({PolarIndex{ell, (order - std::abs(ell)) / 2}, lambda});
    }
  }
  return s;
}

SpiralSpectrum spiral_spectrum(double b_sigma, int ell_max) {
  if (ell_max < 0) throw DomainError("spiral_spectrum: negative ell_max");
  const double mu = mu_from_b_sigma(b_sigma);
  const double x = mu * mu;
  SpiralSpectrum out;
  const double base = one_minus_mu_sq(b_sigma) / (1.0 + x);
  for (int ell = -ell_max; ell <= ell_max; ++ell)
    out.weights.emplace_back(ell, base * std::pow(x, std::abs(ell)));
  out.tail = x == 0.0 ? 0.0 : 2.0 * std::pow(x, ell_max + 1) / (1.0 + x);
  return out;
}

std::complex<double> reconstruct_kernel(const SchmidtSpectrum& spectrum, const DerivedParams& dp,
                                        const Eigen::Vector2d& q_i, const Eigen::Vector2d& q_s) {
  check_same_state(spectrum, dp);
  const auto scale = dp.scale();
  const double parity = spectrum.idler_parity_flip() ? -1.0 : 1.0;
  std::complex<double> sum = 0.0;

  if (spectrum.basis == Basis::cartesian) {
    const int n = spectrum.max_order + 1;
    Eigen::ArrayXd ix(n), iy(n), sx(n), sy(n);
    for (int k = 0; k < n; ++k) {
      ix(k) = hg_1d(k, scale, q_i.x());
      iy(k) = hg_1d(k, scale, q_i.y());
      sx(k) = hg_1d(k, scale, q_s.x());
      sy(k) = hg_1d(k, scale, q_s.y());
    }
    double acc = 0.0;
    for (const auto& e : spectrum.entries) {
      const auto [m, nn] = std::get<CartesianIndex>(e.index);
      const double sign = ((m + nn) % 2 == 1) ? parity : 1.0;
      acc += sign * e.amplitude() * ix(m) * iy(nn) * sx(m) * sy(nn);
    }
    sum = acc;
  } else {
    const double rho_i = q_i.norm(), phi_i = std::atan2(q_i.y(), q_i.x());
    const double rho_s = q_s.norm(), phi_s = std::atan2(q_s.y(), q_s.x());
    for (const auto& e : spectrum.entries) {
      const auto [ell, p] = std::get<PolarIndex>(e.index);
      const double sign = (e.order() % 2 == 1) ? parity : 1.0;
      sum += sign * e.amplitude() * lg(ell, p, scale, rho_i, phi_i) * lg(-ell, p, scale, rho_s, phi_s);
    }
  }
  return sum;
}

double reconstruction_tail_bound(const SchmidtSpectrum& spectrum) {
  const double y = mu_from_b_sigma(spectrum.b_sigma);
  if (y == 0.0) return 0.0;
  // sum_{N >= M} (N + 1) y^N = y^M (M + 1 - M y) / (1 - y)^2, M = max_order + 1.
  const double M = spectrum.max_order + 1.0;
  const double series = std::pow(y, M) * (M + 1.0 - M * y) / ((1.0 - y) * (1.0 - y));
  return std::pow(kCramer, 4) * one_minus_mu_sq(spectrum.b_sigma) * series;
}

double ConversionBlock::unitarity_residual() const {
  const Eigen::MatrixXcd gram = matrix * matrix.adjoint();
  return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

ConversionBlock hg_to_lg_block(int order) {
  if (order < 0) throw DomainError("hg_to_lg_block: negative order");
  if (order > kMaxConversionOrder)
    throw RangeError("hg_to_lg_block: order above " + std::to_string(kMaxConversionOrder));
  const int N = order;
  ConversionBlock block;
  block.order = N;
  block.matrix.resize(N + 1, N + 1);
  const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  int row = 0;
  for (int ell = -N; ell <= N; ell += 2, ++row) {
    const int p = (N - std::abs(ell)) / 2;
    const int n = p + std::max(-ell, 0);
    const int m = p + std::max(ell, 0);
    block.rows.push_back({ell, p});
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    for (int k = 0; k <= N; ++k) {
      const double log_norm = 0.5 * (log_factorial(N - k) + log_factorial(k) - N * std::log(2.0) -
                                     log_factorial(n) - log_factorial(m));
      const double b = std::exp(log_norm) * static_cast<double>(expansion_coefficient(n, m, k));
      block.matrix(row, k) = sign * b * i_pow[k % 4];
    }
  }
  return block;
}

}  // namespace schmidtlab
