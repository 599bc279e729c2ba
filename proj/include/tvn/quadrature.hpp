#pragma once

#include <cstddef>
#include <vector>

namespace tvn {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes in descending order.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Tensor grid on the (theta, phi) parameter rectangle: Gauss-Legendre in
/// cos(theta) times the uniform trapezoid rule in phi. No node sits on a pole.
///
/// weight(node) is the weight for the parameter measure dtheta dphi, i.e.
/// w_GL / sin(theta) * 2pi / n_phi, so that sum weight * sin(theta) = 4 pi.
class QuadratureGrid {
 public:
  struct Node {
    double theta;
    double phi;
    double weight;
  };

  /// Throws std::invalid_argument unless n_theta >= 1 and n_phi >= 1.
  QuadratureGrid(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return nodes_.size(); }

  /// Node (i, j) lives at flat index i * n_phi + j.
  const Node& node(std::size_t k) const { return nodes_[k]; }
  const Node& node(int i, int j) const { return nodes_[static_cast<std::size_t>(i) * n_phi_ + j]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Same layout with both resolutions multiplied by `factor`.
  QuadratureGrid refined(int factor) const { return {n_theta_ * factor, n_phi_ * factor}; }

  /// Largest harmonic degree integrated exactly by the latitude rule (N_theta >= 2L + 2).
  int max_exact_degree() const { return n_theta_ / 2 - 1; }

 private:
  int n_theta_;
  int n_phi_;
  std::vector<Node> nodes_;
};

}  // namespace tvn
