#pragma once

#include <Eigen/Core>

namespace schmidtlab {

enum class GridKind { gauss_hermite_full_line, half_line_radial, gauss_legendre };

/// Nodes and weights of a Gaussian quadrature rule.
///
/// `weights` belong to the rule's own weight function (e^{-x^2} on the line,
/// u^ell e^{-u} in u = x^2 on the half line, 1 on [-1, 1]).
/// `unfolded_weights` integrate a plain function instead:
///   full line:   int f(x) dx      ~ sum_i unfolded_i f(nodes_i)
///   half line:   int f(x) x dx    ~ sum_i unfolded_i f(nodes_i), nodes are x = sqrt(u)
///   legendre:    same as weights
/// `log_unfolded_weights` holds their logarithm, which stays finite where the
/// unfolded weights themselves overflow (outer nodes of large rules).
struct QuadratureGrid {
  GridKind kind = GridKind::gauss_hermite_full_line;
  int alpha = 0;  // Laguerre parameter of a half-line rule
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd unfolded_weights;
  Eigen::VectorXd log_unfolded_weights;

  Eigen::Index size() const { return nodes.size(); }
};

/// Largest rule built; beyond this the outer nodes are not resolved reliably.
inline constexpr int kMaxQuadratureNodes = 500;

/// Gauss-Hermite rule for weight e^{-x^2}. n in [2, 500].
QuadratureGrid gauss_hermite_grid(int n);

/// Generalized Gauss-Laguerre rule in u = x^2 with weight u^alpha e^{-u},
/// presented on the radial coordinate x for the measure x dx.
QuadratureGrid half_line_radial_grid(int n, int alpha);

/// Gauss-Legendre rule on [-1, 1].
QuadratureGrid gauss_legendre_grid(int n);

}  // namespace schmidtlab
