#pragma once

/// @file spaces.hpp
/// Global numbering of the stress space (continuous P_k plus edge bubbles) and of the
/// discontinuous P_{k-1} displacement space.

#include "elements.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixfem {

/// A stress shape function as seen from inside one element.
struct LocalStressDof {
  int global = -1;
  /// Index into the element's LagrangeNodeSet.
  int local_node = -1;
  SymMatrix2 direction;
};

struct StressClassCounts {
  int vertex = 0;
  int edge_flux = 0;
  int edge_bubble = 0;
  int volume = 0;
};

/// Stress degrees of freedom are numbered vertex, then edge-flux, then edge-bubble, then
/// volume, each block in entity order.
///
/// dim = 3|V| + 2(k-1)|E| + (3(k-1)(k-2)/2 + 3(k-1))|K|. Boundary edges carry one bubble per
/// edge node (from their single element), interior edges two.
class StressSpace {
 public:
  StressSpace(const Mesh& mesh, int k) : mesh_(&mesh), k_(k), basis_(check_degree(k)) {
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    const int nk = mesh.num_triangles();
    const int en = k - 1;
    const int in = (k - 1) * (k - 2) / 2;
    num_scalar_nodes_ = nv + ne * en + nk * in;

    counts_.vertex = 3 * nv;
    counts_.edge_flux = 2 * en * ne;
    std::vector<int> bubble_start(ne + 1, 0);
    for (int e = 0; e < ne; ++e) {
      bubble_start[e + 1] = bubble_start[e] + en * static_cast<int>(mesh.edges[e].adjacent_triangles.size());
    }
    counts_.edge_bubble = bubble_start[ne];
    counts_.volume = 3 * in * nk;
    const int flux_base = counts_.vertex;
    const int bubble_base = flux_base + counts_.edge_flux;
    const int volume_base = bubble_base + counts_.edge_bubble;
    dim_ = volume_base + counts_.volume;

    functions_.resize(dim_);
    std::vector<EdgeMatrixFrame> frames;
    frames.reserve(ne);
    for (const auto& e : mesh.edges) frames.push_back(edge_matrix_frame(e));

    const auto& nodes = basis_.nodes();
    local_.resize(nk);
    for (int t = 0; t < nk; ++t) {
      const auto& tri = mesh.triangles[t];
      auto& loc = local_[t];
      loc.reserve(3 * nodes.size() + 3 * en);
      auto add = [&](StressClass cls, int global, int local_node, int scalar_node, const SymMatrix2& dir) {
        loc.push_back({global, local_node, dir});
        auto& f = functions_[global];
        f.cls = cls;
        f.node = scalar_node;
        f.direction = dir;
        f.support.push_back(t);
      };
      for (int i = 0; i < 3; ++i) {
        const int v = tri.vertex_ids[i];
        for (int c = 0; c < 3; ++c) add(StressClass::vertex, 3 * v + c, i, v, kCanonicalDirections[c]);
      }
      for (int i = 0; i < 3; ++i) {
        const int e = tri.edge_ids[i];
        const auto& edge = mesh.edges[e];
        // Local edge i runs x_{i-1} -> x_{i+1}; node j sits at distance (k-j)/k from x_{i+1}.
        const bool lower_is_next = edge.vertex_ids[0] == tri.vertex_ids[(i + 1) % 3];
        const int side = edge.adjacent_triangles[0] == t ? 0 : 1;
        const int nadj = static_cast<int>(edge.adjacent_triangles.size());
        for (int j = 1; j < k; ++j) {
          const int s = lower_is_next ? j : k - j;
          const int g = e * en + (s - 1);
          const int local_node = nodes.edge_node(i, j);
          const int scalar_node = nv + g;
          add(StressClass::edge_flux, flux_base + 2 * g, local_node, scalar_node, frames[e].perp1);
          add(StressClass::edge_flux, flux_base + 2 * g + 1, local_node, scalar_node, frames[e].perp2);
          add(StressClass::edge_bubble, bubble_base + bubble_start[e] + (s - 1) * nadj + side, local_node,
              scalar_node, frames[e].tangential);
        }
      }
      for (int q = 0; q < in; ++q) {
        const int local_node = nodes.interior_begin() + q;
        const int scalar_node = nv + ne * en + t * in + q;
        for (int c = 0; c < 3; ++c) {
          add(StressClass::volume, volume_base + 3 * (t * in + q) + c, local_node, scalar_node,
              kCanonicalDirections[c]);
        }
      }
    }
  }

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int num_scalar_nodes() const { return num_scalar_nodes_; }
  [[nodiscard]] const StressClassCounts& counts() const { return counts_; }
  [[nodiscard]] const ScalarLagrangeBasis& scalar_basis() const { return basis_; }
  [[nodiscard]] const std::vector<StressBasisFunction>& functions() const { return functions_; }
  [[nodiscard]] const StressBasisFunction& function(int i) const { return functions_.at(i); }
  [[nodiscard]] const std::vector<LocalStressDof>& local_dofs(int t) const { return local_[t]; }
  /// Mutable per-element view; only verification negative controls use it.
  [[nodiscard]] std::vector<LocalStressDof>& mutable_local_dofs(int t) { return local_[t]; }

  /// Closed-form dimension, for cross-checking the numbering.
  [[nodiscard]] static int dimension_formula(const Mesh& m, int k) {
    return 3 * m.num_vertices() + 2 * (k - 1) * m.num_edges() +
           (3 * (k - 1) * (k - 2) / 2 + 3 * (k - 1)) * m.num_triangles();
  }

  /// Value and divergence of global function `b` restricted to element `t` at physical point x.
  [[nodiscard]] StressValue evaluate(int b, int t, const Point2& x) const {
    if (t < 0 || t >= mesh_->num_triangles()) throw std::out_of_range("eval_stress_basis: element index");
    const LocalStressDof* dof = nullptr;
    for (const auto& d : local_[t]) {
      if (d.global == b) dof = &d;
    }
    if (dof == nullptr) {
      throw std::invalid_argument("eval_stress_basis: element " + std::to_string(t) + " not in support of " +
                                  std::to_string(b));
    }
    const auto geom = element_geometry(*mesh_, t);
    const auto phi = basis_.evaluate(dof->local_node, geom.barycentric(x), geom);
    return stress_shape(dof->direction, phi.value, phi.gradient);
  }

 private:
  static int check_degree(int k) {
    if (k < 3 || k > 5) throw std::invalid_argument("stress space: degree k must be 3, 4 or 5; got " + std::to_string(k));
    return k;
  }

  const Mesh* mesh_;
  int k_;
  ScalarLagrangeBasis basis_;
  int dim_ = 0;
  int num_scalar_nodes_ = 0;
  StressClassCounts counts_;
  std::vector<StressBasisFunction> functions_;
  std::vector<std::vector<LocalStressDof>> local_;
};

/// Displacement numbering: element t, component c, mode m -> t * k(k+1) + c * k(k+1)/2 + m.
class DisplacementSpace {
 public:
  DisplacementSpace(const Mesh& mesh, int k) : mesh_(&mesh), basis_(k) {
    if (k < 3 || k > 5) throw std::invalid_argument("displacement space: degree k must be 3, 4 or 5");
  }

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return basis_.degree(); }
  [[nodiscard]] int per_element() const { return basis_.per_element(); }
  [[nodiscard]] int dim() const { return per_element() * mesh_->num_triangles(); }
  [[nodiscard]] const DisplacementBasis& basis() const { return basis_; }

  [[nodiscard]] int index(int t, int component, int mode) const {
    return t * per_element() + component * basis_.scalar_size() + mode;
  }
  [[nodiscard]] DisplacementBasisFunction function(int i) const {
    const int t = i / per_element();
    const int r = i % per_element();
    return {t, r / basis_.scalar_size(), r % basis_.scalar_size()};
  }

  [[nodiscard]] static int dimension_formula(const Mesh& m, int k) { return k * (k + 1) * m.num_triangles(); }

 private:
  const Mesh* mesh_;
  DisplacementBasis basis_;
};

inline StressSpace build_stress_space(const Mesh& mesh, int k) { return StressSpace(mesh, k); }
inline DisplacementSpace build_displacement_space(const Mesh& mesh, int k) { return DisplacementSpace(mesh, k); }

}  // namespace mixfem
