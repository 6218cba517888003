#include "schmidtlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "schmidtlab/error.hpp"

namespace schmidtlab {
namespace {

// Three-term recurrence of the orthonormal polynomials of a weight:
//   x p_k = beta(k+1) p_{k+1} + diag(k) p_k + beta(k) p_{k-1}.
template <typename Diag, typename Beta>
struct Recurrence {
  Diag diag;
  Beta beta;
  double log_mu0;  // log of the total mass of the weight
};

struct Evaluation {
  double value;       // p_n, scaled
  double derivative;  // p_n', same scale
  double log_christoffel_sum;  // log sum_{k<n} p_k(x)^2, unscaled
};

constexpr double kBig = 1e150;

template <typename Diag, typename Beta>
Evaluation evaluate(const Recurrence<Diag, Beta>& rec, int n, double x) {
  double p_prev = 0.0, p_cur = 1.0;
  double d_prev = 0.0, d_cur = 0.0;
  double log_scale = -0.5 * rec.log_mu0;
  double sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    sumsq += p_cur * p_cur;
    const double shift = x - rec.diag(k);
    const double p_next = (shift * p_cur - rec.beta(k) * p_prev) / rec.beta(k + 1);
    const double d_next = (shift * d_cur + p_cur - rec.beta(k) * d_prev) / rec.beta(k + 1);
    p_prev = p_cur;
    p_cur = p_next;
    d_prev = d_cur;
    d_cur = d_next;
    if (std::abs(p_cur) > kBig || std::abs(d_cur) > kBig) {
      p_prev /= kBig;
      p_cur /= kBig;
      d_prev /= kBig;
      d_cur /= kBig;
      sumsq /= kBig * kBig;
      log_scale += std::log(kBig);
    }
  }
  return {p_cur, d_cur, std::log(sumsq) + 2.0 * log_scale};
}

void require_size(int n, const char* op) {
  if (n < 2) throw DomainError(std::string(op) + ": need at least 2 nodes");
  if (n > kMaxQuadratureNodes)
    throw RangeError(std::string(op) + ": more than " + std::to_string(kMaxQuadratureNodes) + " nodes");
}

// Golub-Welsch eigenvalues, Newton-polished on p_n, with weights from the
// Christoffel function 1 / sum_k p_k(x)^2 evaluated in log space.
template <typename Diag, typename Beta>
void build_rule(const Recurrence<Diag, Beta>& rec, int n, Eigen::VectorXd& nodes, Eigen::VectorXd& log_weights) {
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int k = 0; k < n; ++k) diag(k) = rec.diag(k);
  for (int k = 1; k < n; ++k) sub(k - 1) = rec.beta(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  nodes = solver.eigenvalues();
  log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = nodes(i);
    for (int iter = 0; iter < 4; ++iter) {
      const Evaluation e = evaluate(rec, n, x);
      if (e.derivative == 0.0) break;
      const double step = e.value / e.derivative;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    nodes(i) = x;
    log_weights(i) = -evaluate(rec, n, x).log_christoffel_sum;
  }
}

}  // namespace

QuadratureGrid gauss_hermite_grid(int n) {
  require_size(n, "gauss_hermite_grid");
  const Recurrence rec{[](int) { return 0.0; }, [](int k) { return std::sqrt(0.5 * k); },
                       0.5 * std::log(std::numbers::pi)};
  QuadratureGrid grid;
  grid.kind = GridKind::gauss_hermite_full_line;
  Eigen::VectorXd log_w;
  build_rule(rec, n, grid.nodes, log_w);
  // Enforce the reflection symmetry of the rule exactly.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (grid.nodes(j) - grid.nodes(i));
    const double lw = 0.5 * (log_w(i) + log_w(j));
    grid.nodes(i) = -x;
    grid.nodes(j) = x;
    log_w(i) = log_w(j) = lw;
  }
  if (n % 2 == 1) grid.nodes(n / 2) = 0.0;
  grid.weights = log_w.array().exp();
  grid.log_unfolded_weights = log_w.array() + grid.nodes.array().square();
  grid.unfolded_weights = grid.log_unfolded_weights.array().exp();
  return grid;
}

QuadratureGrid half_line_radial_grid(int n, int alpha) {
  require_size(n, "half_line_radial_grid");
  if (alpha < 0) throw DomainError("half_line_radial_grid: negative alpha");
  const double a = alpha;
  const Recurrence rec{[a](int k) { return 2.0 * k + a + 1.0; },
                       [a](int k) { return std::sqrt(k * (k + a)); }, std::lgamma(a + 1.0)};
  QuadratureGrid grid;
  grid.kind = GridKind::half_line_radial;
  grid.alpha = alpha;
  Eigen::VectorXd u, log_w;
  build_rule(rec, n, u, log_w);
  grid.nodes = u.array().sqrt();
  grid.weights = log_w.array().exp();
  // int f(x) x dx = (1/2) int f(sqrt u) du; divide out u^alpha e^{-u}.
  grid.log_unfolded_weights = log_w.array() - a * u.array().log() + u.array() - std::log(2.0);
  grid.unfolded_weights = grid.log_unfolded_weights.array().exp();
  return grid;
}

QuadratureGrid gauss_legendre_grid(int n) {
  require_size(n, "gauss_legendre_grid");
  const Recurrence rec{[](int) { return 0.0; },
                       [](int k) { return k == 0 ? 0.0 : k / std::sqrt(4.0 * k * k - 1.0); }, std::log(2.0)};
  QuadratureGrid grid;
  grid.kind = GridKind::gauss_legendre;
  Eigen::VectorXd log_w;
  build_rule(rec, n, grid.nodes, log_w);
  grid.weights = log_w.array().exp();
  grid.unfolded_weights = grid.weights;
  grid.log_unfolded_weights = log_w;
  return grid;
}

}  // namespace schmidtlab
