#pragma once

#include "nfem/geometry.hpp"
#include "nfem/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nfem {

// Values of all local basis functions of one element at one point.
struct ElementBasis {
    int n = 0;
    std::array<double, 10> value{};
    std::array<Vec2, 10> grad{};  // physical gradients
    std::array<Mat2, 10> hess{};  // physical Hessians (zero for k = 1)
};

struct FieldEval {
    double value = 0.0;
    Vec2 grad;
    Mat2 hess;
};

// Continuous Lagrange P_k space, k in {1,2,3}. With zero_boundary the
// boundary Lagrange nodes are constrained to zero and dim() counts only the
// interior ones. Immutable once built.
class FunctionSpace {
public:
    FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree, bool zero_boundary = true);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int degree() const { return degree_; }
    bool zero_boundary() const { return zero_boundary_; }

    int n_nodes() const { return static_cast<int>(node_pos_.size()); }
    int dim() const { return dim_; }
    int nodes_per_cell() const { return nloc_; }
    int cell_node(int tri, int local) const { return cell_nodes_[tri * nloc_ + local]; }
    Vec2 node_position(int node) const { return node_pos_[node]; }
    bool node_on_boundary(int node) const { return boundary_node_[node] != 0; }
    int node_to_dof(int node) const { return node_to_dof_[node]; } // -1 if constrained
    int dof_to_node(int dof) const { return dof_to_node_[dof]; }

    void eval_basis(int tri, const std::array<double, 3>& bary, ElementBasis& out) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    int degree_;
    bool zero_boundary_;
    int nloc_;
    int dim_ = 0;
    std::vector<int> cell_nodes_;
    std::vector<Vec2> node_pos_;
    std::vector<char> boundary_node_;
    std::vector<int> node_to_dof_;
    std::vector<int> dof_to_node_;
};

// Coefficient vector over a FunctionSpace. Nodal values are stored for every
// Lagrange node; constrained boundary nodes are zero unless a boundary lift
// has been set.
class FEFunction {
public:
    explicit FEFunction(const FunctionSpace& space)
        : space_(&space), nodal_(space.n_nodes(), 0.0) {}

    const FunctionSpace& space() const { return *space_; }
    std::vector<double>& nodal() { return nodal_; }
    const std::vector<double>& nodal() const { return nodal_; }

    FieldEval eval(int tri, const std::array<double, 3>& bary) const;

    std::vector<double> interior_coefficients() const;
    void set_interior_coefficients(const std::vector<double>& c);

private:
    const FunctionSpace* space_;
    std::vector<double> nodal_;
};

FEFunction interpolate(const FunctionSpace& space, const std::function<double(Vec2)>& f);
// interpolates f at boundary nodes only, zero elsewhere (a Dirichlet lift)
FEFunction interpolate_boundary(const FunctionSpace& space, const std::function<double(Vec2)>& f);

// L^2 projection onto the (zero-trace) space: mass system solved by
// Jacobi-CG to relative residual 1e-12.
FEFunction l2_project(const FunctionSpace& space, const std::function<double(Vec2)>& f);
FEFunction l2_project(const FunctionSpace& space,
                      const std::function<double(int, const std::array<double, 3>&, Vec2)>& f);

struct ErrorNorms {
    double lp = 0.0;           // ||u - U||_{L^p}
    double w1p_seminorm = 0.0; // ||grad u - grad U||_{L^p}
};

ErrorNorms error_norms(const FEFunction& U, const std::function<double(Vec2)>& exact,
                       const std::function<Vec2(Vec2)>& exact_grad, double p,
                       int quad_degree = -1);

// experimental orders of convergence; eoc[i] relates entries i and i+1
std::vector<double> eoc(const std::vector<double>& values, const std::vector<double>& meshsizes);

// Nodal transfer of U onto a refined mesh's space; `parent` maps each new
// triangle to its ancestor in U's mesh.
FEFunction transfer_nodal(const FEFunction& U, const FunctionSpace& to,
                          const std::vector<int>& parent);

// barycentric coordinates of x with respect to triangle tri
std::array<double, 3> barycentric(const Mesh& mesh, int tri, Vec2 x);

void write_fe_function(const FEFunction& U, const std::string& path);
FEFunction read_fe_function(const FunctionSpace& space, const std::string& path);

} // namespace nfem
