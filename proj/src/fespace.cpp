#include "nfem/fespace.hpp"

#include "nfem/linalg.hpp"
#include "nfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace nfem {

namespace {

std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Barycentric Lagrange shape functions: value and derivatives with respect
// to the three barycentric coordinates.
struct BaryShape {
    double value = 0.0;
    std::array<double, 3> d{};
    std::array<std::array<double, 3>, 3> dd{};
};

// Local node layout: 0..2 vertices; then (k-1) nodes per edge e=0,1,2 (edge e
// is opposite vertex e, node slots ordered from local vertex e+1 to e+2);
// then the centroid for k=3.
BaryShape shape(int k, int local, const std::array<double, 3>& L) {
    BaryShape s;
    auto edge_of = [](int local, int k_) {
        int e = (local - 3) / (k_ - 1);
        int which = (local - 3) % (k_ - 1);
        return std::pair<int, int>(e, which);
    };
    if (k == 1) {
        s.value = L[local];
        s.d[local] = 1.0;
        return s;
    }
    if (k == 2) {
        if (local < 3) {
            double l = L[local];
            s.value = l * (2.0 * l - 1.0);
            s.d[local] = 4.0 * l - 1.0;
            s.dd[local][local] = 4.0;
            return s;
        }
        auto [e, which] = edge_of(local, 2);
        (void)which;
        int a = (e + 1) % 3, b = (e + 2) % 3;
        s.value = 4.0 * L[a] * L[b];
        s.d[a] = 4.0 * L[b];
        s.d[b] = 4.0 * L[a];
        s.dd[a][b] = s.dd[b][a] = 4.0;
        return s;
    }
    // k == 3
    if (local < 3) {
        double l = L[local];
        s.value = 0.5 * l * (3.0 * l - 1.0) * (3.0 * l - 2.0);
        s.d[local] = 0.5 * (27.0 * l * l - 18.0 * l + 2.0);
        s.dd[local][local] = 27.0 * l - 9.0;
        return s;
    }
    if (local < 9) {
        auto [e, which] = edge_of(local, 3);
        int a = (e + 1) % 3, b = (e + 2) % 3;
        int m = (which == 0) ? a : b; // node sits at lambda_m = 2/3
        int o = (which == 0) ? b : a;
        double lm = L[m], lo = L[o];
        s.value = 4.5 * lm * lo * (3.0 * lm - 1.0);
        s.d[m] = 4.5 * lo * (6.0 * lm - 1.0);
        s.d[o] = 4.5 * lm * (3.0 * lm - 1.0);
        s.dd[m][m] = 27.0 * lo;
        s.dd[m][o] = s.dd[o][m] = 4.5 * (6.0 * lm - 1.0);
        return s;
    }
    // centroid bubble
    s.value = 27.0 * L[0] * L[1] * L[2];
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, l = (i + 2) % 3;
        s.d[i] = 27.0 * L[j] * L[l];
        s.dd[i][j] = 27.0 * L[l];
        s.dd[j][i] = 27.0 * L[l];
    }
    return s;
}

} // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree, bool zero_boundary)
    : mesh_(std::move(mesh)), degree_(degree), zero_boundary_(zero_boundary) {
    if (degree_ < 1 || degree_ > 3)
        throw std::invalid_argument("FunctionSpace: degree must be 1, 2 or 3");
    const Mesh& m = *mesh_;
    nloc_ = (degree_ + 1) * (degree_ + 2) / 2;
    int nv = m.n_vertices();
    int nt = m.n_triangles();

    // serial edge numbering consistent from both sides
    std::unordered_map<std::uint64_t, int> edge_serial;
    edge_serial.reserve(m.interior_edges.size() + m.boundary_edges.size());
    int ne = 0;
    for (const auto& e : m.interior_edges) edge_serial.emplace(pair_key(e.v[0], e.v[1]), ne++);
    for (const auto& e : m.boundary_edges) edge_serial.emplace(pair_key(e.v[0], e.v[1]), ne++);
    int n_interior_edges = static_cast<int>(m.interior_edges.size());

    int per_edge = degree_ - 1;
    int n_nodes = nv + per_edge * ne + (degree_ == 3 ? nt : 0);
    node_pos_.assign(n_nodes, Vec2{});
    boundary_node_.assign(n_nodes, 0);
    cell_nodes_.assign(static_cast<size_t>(nt) * nloc_, -1);

    for (int v = 0; v < nv; ++v) node_pos_[v] = m.vertices[v];
    for (const auto& be : m.boundary_edges) {
        boundary_node_[be.v[0]] = 1;
        boundary_node_[be.v[1]] = 1;
    }

    for (int t = 0; t < nt; ++t) {
        const auto& T = m.triangles[t];
        int* cn = &cell_nodes_[static_cast<size_t>(t) * nloc_];
        for (int i = 0; i < 3; ++i) cn[i] = T.v[i];
        if (degree_ >= 2) {
            for (int e = 0; e < 3; ++e) {
                int ga = T.v[(e + 1) % 3], gb = T.v[(e + 2) % 3];
                int serial = edge_serial.at(pair_key(ga, gb));
                bool edge_is_boundary = serial >= n_interior_edges;
                Vec2 pa = m.vertices[ga], pb = m.vertices[gb];
                if (degree_ == 2) {
                    int id = nv + serial;
                    cn[3 + e] = id;
                    node_pos_[id] = (pa + pb) * 0.5;
                    if (edge_is_boundary) boundary_node_[id] = 1;
                } else {
                    // two nodes per edge, global slot 0 nearest the smaller
                    // vertex id so both sides agree
                    int base = nv + 2 * serial;
                    int near_a = base + (ga < gb ? 0 : 1);
                    int near_b = base + (ga < gb ? 1 : 0);
                    cn[3 + 2 * e] = near_a;
                    cn[4 + 2 * e] = near_b;
                    node_pos_[near_a] = (pa * 2.0 + pb) / 3.0;
                    node_pos_[near_b] = (pa + pb * 2.0) / 3.0;
                    if (edge_is_boundary) {
                        boundary_node_[near_a] = 1;
                        boundary_node_[near_b] = 1;
                    }
                }
            }
        }
        if (degree_ == 3) {
            int id = nv + 2 * ne + t;
            cn[9] = id;
            node_pos_[id] =
                (m.vertices[T.v[0]] + m.vertices[T.v[1]] + m.vertices[T.v[2]]) / 3.0;
        }
    }

    node_to_dof_.assign(n_nodes, -1);
    for (int nnode = 0; nnode < n_nodes; ++nnode) {
        if (zero_boundary_ && boundary_node_[nnode]) continue;
        node_to_dof_[nnode] = dim_;
        dof_to_node_.push_back(nnode);
        ++dim_;
    }
}

void FunctionSpace::eval_basis(int tri, const std::array<double, 3>& bary,
                               ElementBasis& out) const {
    const Mesh& m = *mesh_;
    const auto& T = m.triangles[tri];
    Vec2 p0 = m.vertices[T.v[0]], p1 = m.vertices[T.v[1]], p2 = m.vertices[T.v[2]];
    double inv2A = 1.0 / cross(p1 - p0, p2 - p0);
    std::array<Vec2, 3> g = {perp(p2 - p1) * inv2A, perp(p0 - p2) * inv2A,
                             perp(p1 - p0) * inv2A};
    out.n = nloc_;
    for (int l = 0; l < nloc_; ++l) {
        BaryShape s = shape(degree_, l, bary);
        out.value[l] = s.value;
        Vec2 gr{0.0, 0.0};
        for (int i = 0; i < 3; ++i) gr += s.d[i] * g[i];
        out.grad[l] = gr;
        Mat2 h;
        if (degree_ >= 2) {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (s.dd[i][j] != 0.0) h += s.dd[i][j] * Mat2::outer(g[i], g[j]);
        }
        out.hess[l] = h;
    }
}

FieldEval FEFunction::eval(int tri, const std::array<double, 3>& bary) const {
    ElementBasis eb;
    space_->eval_basis(tri, bary, eb);
    FieldEval r;
    for (int l = 0; l < eb.n; ++l) {
        double c = nodal_[space_->cell_node(tri, l)];
        if (c == 0.0) continue;
        r.value += c * eb.value[l];
        r.grad += c * eb.grad[l];
        r.hess += c * eb.hess[l];
    }
    return r;
}

std::vector<double> FEFunction::interior_coefficients() const {
    std::vector<double> c(space_->dim());
    for (int d = 0; d < space_->dim(); ++d) c[d] = nodal_[space_->dof_to_node(d)];
    return c;
}

void FEFunction::set_interior_coefficients(const std::vector<double>& c) {
    if (static_cast<int>(c.size()) != space_->dim())
        throw std::invalid_argument("set_interior_coefficients: size mismatch");
    for (int d = 0; d < space_->dim(); ++d) nodal_[space_->dof_to_node(d)] = c[d];
}

FEFunction interpolate(const FunctionSpace& space, const std::function<double(Vec2)>& f) {
    FEFunction U(space);
    for (int n = 0; n < space.n_nodes(); ++n) U.nodal()[n] = f(space.node_position(n));
    return U;
}

FEFunction interpolate_boundary(const FunctionSpace& space,
                                const std::function<double(Vec2)>& f) {
    FEFunction U(space);
    for (int n = 0; n < space.n_nodes(); ++n)
        if (space.node_on_boundary(n)) U.nodal()[n] = f(space.node_position(n));
    return U;
}

namespace {

Vec2 physical_point(const Mesh& m, int tri, const std::array<double, 3>& bary) {
    const auto& T = m.triangles[tri];
    return m.vertices[T.v[0]] * bary[0] + m.vertices[T.v[1]] * bary[1] +
           m.vertices[T.v[2]] * bary[2];
}

} // namespace

FEFunction l2_project(const FunctionSpace& space,
                      const std::function<double(int, const std::array<double, 3>&, Vec2)>& f) {
    const Mesh& m = space.mesh();
    int k = space.degree();
    const TriangleRule& rule = triangle_rule(std::min(2 * k + 3, 12));
    int nloc = space.nodes_per_cell();

    // dof adjacency pattern
    std::vector<std::vector<int>> pattern(space.dim());
    for (int t = 0; t < m.n_triangles(); ++t) {
        for (int a = 0; a < nloc; ++a) {
            int da = space.node_to_dof(space.cell_node(t, a));
            if (da < 0) continue;
            for (int b = 0; b < nloc; ++b) {
                int db = space.node_to_dof(space.cell_node(t, b));
                if (db >= 0) pattern[da].push_back(db);
            }
        }
    }
    for (auto& row : pattern) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    CsrMatrix M(pattern);
    std::vector<double> rhs(space.dim(), 0.0);

    ElementBasis eb;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            double w = rule.weights[q] * two_area;
            space.eval_basis(t, bary, eb);
            double fv = f(t, bary, physical_point(m, t, bary));
            for (int a = 0; a < nloc; ++a) {
                int da = space.node_to_dof(space.cell_node(t, a));
                if (da < 0) continue;
                rhs[da] += w * fv * eb.value[a];
                for (int b = 0; b < nloc; ++b) {
                    int db = space.node_to_dof(space.cell_node(t, b));
                    if (db >= 0) M.add(da, db, w * eb.value[a] * eb.value[b]);
                }
            }
        }
    }

    std::vector<double> x(space.dim(), 0.0);
    cg_solve(M, rhs, x, 1e-12, 0.0);
    FEFunction P(space);
    P.set_interior_coefficients(x);
    return P;
}

FEFunction l2_project(const FunctionSpace& space, const std::function<double(Vec2)>& f) {
    return l2_project(space,
                      [&f](int, const std::array<double, 3>&, Vec2 x) { return f(x); });
}

ErrorNorms error_norms(const FEFunction& U, const std::function<double(Vec2)>& exact,
                       const std::function<Vec2(Vec2)>& exact_grad, double p, int quad_degree) {
    if (!(p > 1.0)) throw std::invalid_argument("error_norms: p must exceed 1");
    const FunctionSpace& space = U.space();
    const Mesh& m = space.mesh();
    if (quad_degree < 0) quad_degree = 2 * space.degree() + 4;
    const TriangleRule& rule = triangle_rule(std::min(quad_degree, 12));

    KahanSum lp, w1p;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            double w = rule.weights[q] * two_area;
            Vec2 x = physical_point(m, t, bary);
            FieldEval fe = U.eval(t, bary);
            lp.add(w * std::pow(std::abs(fe.value - exact(x)), p));
            w1p.add(w * std::pow(norm(fe.grad - exact_grad(x)), p));
        }
    }
    return {std::pow(lp.value(), 1.0 / p), std::pow(w1p.value(), 1.0 / p)};
}

std::vector<double> eoc(const std::vector<double>& values, const std::vector<double>& meshsizes) {
    if (values.size() != meshsizes.size() || values.size() < 2)
        throw std::invalid_argument("eoc: need equally long sequences of length >= 2");
    for (size_t i = 0; i < values.size(); ++i)
        if (!(values[i] > 0.0) || !(meshsizes[i] > 0.0))
            throw std::domain_error("eoc: values and meshsizes must be positive");
    for (size_t i = 1; i < meshsizes.size(); ++i)
        if (!(meshsizes[i] < meshsizes[i - 1]))
            throw std::domain_error("eoc: meshsizes must be strictly decreasing");
    std::vector<double> out;
    for (size_t i = 0; i + 1 < values.size(); ++i)
        out.push_back(std::log(values[i + 1] / values[i]) /
                      std::log(meshsizes[i + 1] / meshsizes[i]));
    return out;
}

std::array<double, 3> barycentric(const Mesh& mesh, int tri, Vec2 x) {
    const auto& T = mesh.triangles[tri];
    Vec2 p0 = mesh.vertices[T.v[0]], p1 = mesh.vertices[T.v[1]], p2 = mesh.vertices[T.v[2]];
    double inv2A = 1.0 / cross(p1 - p0, p2 - p0);
    double l1 = cross(x - p0, p2 - p0) * inv2A;
    double l2 = cross(p1 - p0, x - p0) * inv2A;
    return {1.0 - l1 - l2, l1, l2};
}

FEFunction transfer_nodal(const FEFunction& U, const FunctionSpace& to,
                          const std::vector<int>& parent) {
    const Mesh& new_mesh = to.mesh();
    if (static_cast<int>(parent.size()) != new_mesh.n_triangles())
        throw std::invalid_argument("transfer_nodal: parent map size mismatch");
    FEFunction V(to);
    std::vector<char> done(to.n_nodes(), 0);
    for (int t = 0; t < new_mesh.n_triangles(); ++t) {
        int anc = parent[t];
        for (int l = 0; l < to.nodes_per_cell(); ++l) {
            int n = to.cell_node(t, l);
            if (done[n]) continue;
            done[n] = 1;
            auto bary = barycentric(U.space().mesh(), anc, to.node_position(n));
            V.nodal()[n] = U.eval(anc, bary).value;
        }
    }
    return V;
}

void write_fe_function(const FEFunction& U, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_fe_function: cannot open " + path);
    auto c = U.interior_coefficients();
    f << c.size() << "\n";
    char buf[64];
    for (double v : c) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        f << buf;
    }
    if (!f) throw std::runtime_error("write_fe_function: write failed");
}

FEFunction read_fe_function(const FunctionSpace& space, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_fe_function: cannot open " + path);
    size_t n;
    if (!(f >> n) || n != static_cast<size_t>(space.dim()))
        throw std::runtime_error("read_fe_function: dimension mismatch");
    std::vector<double> c(n);
    for (auto& v : c)
        if (!(f >> v)) throw std::runtime_error("read_fe_function: bad coefficient");
    FEFunction U(space);
    U.set_interior_coefficients(c);
    return U;
}

} // namespace nfem
