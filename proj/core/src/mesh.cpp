#include "dve/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace dve {

QuadRule QuadRule::gauss(int n) {
  QuadRule r;
  switch (n) {
    case 1:
      r.points = {0.0};
      r.weights = {2.0};
      break;
    case 2: {
      const double p = 1.0 / std::sqrt(3.0);
      r.points = {-p, p};
      r.weights = {1.0, 1.0};
      break;
    }
    case 3: {
      const double p = std::sqrt(3.0 / 5.0);
      r.points = {-p, 0.0, p};
      r.weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double p1 = 0.33998104358485626480;
      const double p2 = 0.86113631159405257522;
      const double w1 = 0.65214515486254614263;
      const double w2 = 0.34785484513745385737;
      r.points = {-p2, -p1, p1, p2};
      r.weights = {w2, w1, w1, w2};
      break;
    }
    case 5: {
      const double p1 = 0.53846931010568309104;
      const double p2 = 0.90617984593866399280;
      const double w0 = 0.56888888888888888889;
      const double w1 = 0.47862867049936646804;
      const double w2 = 0.23692688505618908751;
      r.points = {-p2, -p1, 0.0, p1, p2};
      r.weights = {w2, w1, w0, w1, w2};
      break;
    }
    default:
      throw std::invalid_argument("QuadRule::gauss: supported orders are 1-5");
  }
  return r;
}

Mesh1D::Mesh1D(std::vector<double> node_coords, int quad_points)
    : nodes_(std::move(node_coords)), quad_(QuadRule::gauss(quad_points)) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("Mesh1D: need at least two nodes");
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_[i] < nodes_[i + 1])) {
      throw std::invalid_argument("Mesh1D: node coordinates must increase");
    }
  }
}

Mesh1D Mesh1D::uniform(int n_elements, int quad_points) {
  if (n_elements < 1) {
    throw std::invalid_argument("Mesh1D::uniform: need n_elements >= 1");
  }
  std::vector<double> nodes(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) {
    nodes[i] = static_cast<double>(i) / n_elements;
  }
  nodes.back() = 1.0;
  return Mesh1D(std::move(nodes), quad_points);
}

SpaceTimeMesh::SpaceTimeMesh(std::vector<double> x_nodes,
                             std::vector<double> t_nodes, int quad_points)
    : x_nodes_(std::move(x_nodes)),
      t_nodes_(std::move(t_nodes)),
      quad_(QuadRule::gauss(quad_points)) {
  if (x_nodes_.size() < 2 || t_nodes_.size() < 2) {
    throw std::invalid_argument("SpaceTimeMesh: need at least one cell");
  }
  for (std::size_t i = 0; i + 1 < x_nodes_.size(); ++i) {
    if (!(x_nodes_[i] < x_nodes_[i + 1])) {
      throw std::invalid_argument("SpaceTimeMesh: x grid must increase");
    }
  }
  for (std::size_t j = 0; j + 1 < t_nodes_.size(); ++j) {
    if (!(t_nodes_[j] < t_nodes_[j + 1])) {
      throw std::invalid_argument("SpaceTimeMesh: t grid must increase");
    }
  }
}

SpaceTimeMesh SpaceTimeMesh::uniform(int nx, int nt, double t_final,
                                     int quad_points) {
  if (nx < 1 || nt < 1 || !(t_final > 0.0)) {
    throw std::invalid_argument("SpaceTimeMesh::uniform: bad grid sizes");
  }
  std::vector<double> xs(nx + 1), ts(nt + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = static_cast<double>(i) / nx;
  xs.back() = 1.0;
  for (int j = 0; j <= nt; ++j) {
    ts[j] = t_final * static_cast<double>(j) / nt;
  }
  ts.back() = t_final;
  return SpaceTimeMesh(std::move(xs), std::move(ts), quad_points);
}

}  // namespace dve
