#pragma once

#include <vector>

namespace dve {

/// Gauss-Legendre rule on [-1, 1]; 1 to 5 points.
struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;

  static QuadRule gauss(int n);
  int size() const { return static_cast<int>(points.size()); }
};

/// 1-d mesh of consecutive linear elements on [0, 1] (or a sub-interval for
/// internal use). Node coordinates strictly increase.
class Mesh1D {
 public:
  Mesh1D(std::vector<double> node_coords, int quad_points = 2);

  static Mesh1D uniform(int n_elements, int quad_points = 2);

  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_elements() const { return n_nodes() - 1; }
  double node(int i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  const QuadRule& quad() const { return quad_; }

  double element_left(int e) const { return nodes_[e]; }
  double element_size(int e) const { return nodes_[e + 1] - nodes_[e]; }

 private:
  std::vector<double> nodes_;
  QuadRule quad_;
};

/// Structured space-time grid on [0, 1] x [0, T] with bilinear quadrilateral
/// cells and tensor-product Gauss quadrature.
class SpaceTimeMesh {
 public:
  SpaceTimeMesh(std::vector<double> x_nodes, std::vector<double> t_nodes,
                int quad_points = 2);

  static SpaceTimeMesh uniform(int nx, int nt, double t_final,
                               int quad_points = 2);

  int nx() const { return static_cast<int>(x_nodes_.size()) - 1; }
  int nt() const { return static_cast<int>(t_nodes_.size()) - 1; }
  int n_nodes() const {
    return static_cast<int>(x_nodes_.size() * t_nodes_.size());
  }
  double t_final() const { return t_nodes_.back(); }

  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  const QuadRule& quad() const { return quad_; }

  /// Node id for grid position (i, j), i along x, j along t.
  int node_id(int i, int j) const {
    return j * static_cast<int>(x_nodes_.size()) + i;
  }

 private:
  std::vector<double> x_nodes_;
  std::vector<double> t_nodes_;
  QuadRule quad_;
};

}  // namespace dve
