#include "schmidtlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "schmidtlab/error.hpp"
#include "schmidtlab/modes.hpp"
#include "schmidtlab/quadrature.hpp"
#include "schmidtlab/specfun.hpp"

namespace schmidtlab {
namespace {

using Extended = long double;

// Terms of the identity series are kept until mu^n falls below this.
constexpr Extended kSeriesTail = 1e-30L;

void require_grid(int n_grid, const char* op) {
  if (n_grid < kMinOracleGrid)
    throw DomainError(std::string(op) + ": grid must have at least " + std::to_string(kMinOracleGrid) + " nodes");
}

bool outside_accurate_range(double b_sigma) { return b_sigma < 1e-3 || b_sigma > 1e3; }

NumericalSpectrum finish(const Eigen::MatrixXd& a, KernelTag tag, int ell, int n_grid) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  NumericalSpectrum out;
  out.singular_values = svd.singularValues();
  out.grid_size = n_grid;
  out.kernel_tag = tag;
  out.ell = ell;
  if (out.singular_values.size() > 0) {
    const double floor = kNumericalZeroFactor * std::numeric_limits<double>::epsilon() * out.singular_values(0);
    for (auto& s : out.singular_values)
      if (s < floor) s = 0.0;
  }
  return out;
}

int series_length(Extended ratio) {
  if (ratio == 0) return 0;
  const Extended n = std::ceil(std::log(kSeriesTail) / std::log(ratio));
  return static_cast<int>(std::min<Extended>(n, kMaxDegree));
}

}  // namespace

NumericalSpectrum kernel_svd_1d(const DerivedParams& dp, int n_grid) {
  require_grid(n_grid, "kernel_svd_1d");
  const QuadratureGrid grid = gauss_hermite_grid(n_grid);
  const double gamma = dp.gamma;
  // Nodes t = gamma x; dx = dt / gamma.
  const Eigen::ArrayXd x = grid.nodes.array() / gamma;
  const Eigen::ArrayXd half_log_w = 0.5 * (grid.log_unfolded_weights.array() - std::log(gamma));
  const double log_norm = std::log(gamma / std::sqrt(std::numbers::pi));
  Eigen::MatrixXd a(n_grid, n_grid);
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i < n_grid; ++i) {
      const double quad = x(i) * x(i) + x(j) * x(j) - 2.0 * dp.eta_A * x(i) * x(j);
      a(i, j) = std::exp(half_log_w(i) + half_log_w(j) + log_norm - dp.G * quad);
    }
  NumericalSpectrum out = finish(a, KernelTag::gauss_1d, 0, n_grid);
  out.accuracy_warning = outside_accurate_range(dp.b_sigma);
  return out;
}

NumericalSpectrum radial_kernel_svd(int ell, const DerivedParams& dp, int n_grid) {
  require_grid(n_grid, "radial_kernel_svd");
  const int order = std::abs(ell);
  const QuadratureGrid grid = half_line_radial_grid(n_grid, order);
  const double gamma = dp.gamma;
  // Nodes x = gamma rho; rho d rho = x dx / gamma^2.
  const Eigen::ArrayXd rho = grid.nodes.array() / gamma;
  const Eigen::ArrayXd half_log_w = 0.5 * grid.log_unfolded_weights.array() - std::log(gamma);
  const double log_norm = std::log(2.0 * std::numbers::pi * dp.norm_N);
  const double coupling = 2.0 * (dp.b * dp.b - 1.0 / (dp.sigma * dp.sigma));
  Eigen::MatrixXd a(n_grid, n_grid);
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i < n_grid; ++i) {
      const double z = coupling * rho(i) * rho(j);
      const double log_env = half_log_w(i) + half_log_w(j) + log_norm -
                             dp.G * (rho(i) * rho(i) + rho(j) * rho(j)) + std::abs(z);
      a(i, j) = std::exp(log_env) * bessel_i_scaled(order, z);
    }
  NumericalSpectrum out = finish(a, KernelTag::radial_ell, order, n_grid);
  out.accuracy_warning = outside_accurate_range(dp.b_sigma);
  return out;
}

NumericalSpectrum sinc_radial_kernel_svd(int ell, const SincKernel& kernel, int n_grid) {
  require_grid(n_grid, "sinc_radial_kernel_svd");
  constexpr int kAngles = 512;
  const int order = std::abs(ell);
  const QuadratureGrid grid = gauss_legendre_grid(n_grid);
  const double rho_max = 4.0 * (kernel.sigma() + 1.0 / kernel.b());
  const Eigen::ArrayXd rho = 0.5 * rho_max * (grid.nodes.array() + 1.0);
  const Eigen::ArrayXd sqrt_w = (0.5 * rho_max * grid.weights.array() * rho).sqrt();
  const double step = 2.0 * std::numbers::pi / kAngles;
  Eigen::ArrayXd cosines(kAngles);
  for (int k = 0; k < kAngles; ++k) cosines(k) = std::cos(order * k * step);
  Eigen::MatrixXd a(n_grid, n_grid);
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i <= j; ++i) {
      double acc = 0.0;
      for (int k = 0; k < kAngles; ++k) acc += kernel.polar(rho(i), 0.0, rho(j), k * step) * cosines(k);
      a(i, j) = a(j, i) = sqrt_w(i) * sqrt_w(j) * acc * step;
    }
  NumericalSpectrum out = finish(a, KernelTag::sinc_radial_ell, order, n_grid);
  const double b_sigma = kernel.b() * kernel.sigma();
  out.accuracy_warning = outside_accurate_range(b_sigma);
  out.exploratory = true;
  return out;
}

double verify_mehler(const DerivedParams& dp, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw DomainError("verify_mehler: need at least one sample");
  std::mt19937_64 rng(seed);
  const double box = 3.0 / dp.gamma;
  std::uniform_real_distribution<double> coord(-box, box);
  const Extended mu_signed = dp.mu_signed;
  const int terms = series_length(std::abs(mu_signed));
  const ModeScale<Extended> scale(dp.gamma);
  const Extended prefactor = std::sqrt(std::numbers::pi_v<Extended>) / Extended(dp.gamma) *
                             std::sqrt(Extended(one_minus_mu_sq(dp.b_sigma)));
  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    const Extended x = coord(rng), y = coord(rng);
    const Extended lhs = std::exp(-Extended(dp.G) * (x * x + y * y - 2 * Extended(dp.eta_A) * x * y));
    Extended sum = 0, power = 1;
    for (int n = 0; n <= terms; ++n) {
      sum += power * hg_1d(n, scale, x) * hg_1d(n, scale, y);
      power *= mu_signed;
    }
    const Extended rhs = prefactor * sum;
    worst = std::max(worst, static_cast<double>(std::abs(lhs - rhs) / std::abs(lhs)));
  }
  return worst;
}

double verify_hardy_hille(int ell, double mu, int sample_count, std::uint64_t seed) {
  if (ell < 0) throw DomainError("verify_hardy_hille: ell must be non-negative");
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("verify_hardy_hille: mu must lie in (0, 1)");
  if (sample_count < 1) throw DomainError("verify_hardy_hille: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 4.0);
  const Extended m = mu;
  const Extended m2 = m * m;
  const int terms = series_length(m2);
  const Extended one_minus = 1 - m2;
  const Extended spread = (1 + m2) / (2 * one_minus);
  const Extended scale = 2 * std::pow(m, -Extended(ell)) / one_minus;
  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Extended x = coord(rng), y = coord(rng);
    if (x == 0) x = 4;
    if (y == 0) y = 4;
    Extended lhs = 0, power = 1;
    for (int p = 0; p <= terms; ++p) {
      lhs += power * radial_mode(ell, p, x) * radial_mode(ell, p, y);
      power *= m2;
    }
    const Extended z = 2 * x * y * m / one_minus;
    const Extended rhs = scale * std::exp(-(x * x + y * y) * spread + z) * bessel_i_scaled(ell, z);
    worst = std::max(worst, static_cast<double>(std::abs(lhs - rhs) / std::abs(rhs)));
  }
  return worst;
}

double numeric_k_cartesian(const NumericalSpectrum& axis, double max_missing_mass) {
  const Eigen::ArrayXd s2 = axis.singular_values.array().square();
  const double m2 = s2.sum();
  const double m4 = s2.square().sum();
  if (std::abs(1.0 - m2) > max_missing_mass)
    throw PrecisionError("numeric_k_cartesian: spectrum misses " + std::to_string(1.0 - m2) + " of the kernel mass");
  // Sums over the product spectrum s_m s_n factorize.
  return (m2 * m2 * m2 * m2) / (m4 * m4);
}

double numeric_k_polar(const std::vector<NumericalSpectrum>& per_ell, double max_missing_mass) {
  if (per_ell.empty()) throw DomainError("numeric_k_polar: no spectra");
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < per_ell.size(); ++i) {
    const double copies = per_ell[i].ell == 0 ? 1.0 : 2.0;
    const Eigen::ArrayXd s2 = per_ell[i].singular_values.array().square();
    m2 += copies * s2.sum();
    m4 += copies * s2.square().sum();
  }
  if (std::abs(1.0 - m2) > max_missing_mass)
    throw PrecisionError("numeric_k_polar: spectra miss " + std::to_string(1.0 - m2) + " of the kernel mass");
  return m2 * m2 / m4;
}

int oam_cutoff(double b_sigma, double tail) {
  if (!(tail > 0.0 && tail < 1.0)) throw DomainError("oam_cutoff: tail must lie in (0, 1)");
  const double mu = mu_from_b_sigma(b_sigma);
  const double x = mu * mu;
  int L = 0;
  while (x > 0.0 && 2.0 * std::pow(x, L + 1) / (1.0 + x) >= tail) ++L;
  return L;
}

}  // namespace schmidtlab
