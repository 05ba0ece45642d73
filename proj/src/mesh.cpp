#include "nfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace nfem {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

Vec2 outward_normal(const Mesh& m, int tri, int le) {
    auto [a, b] = m.edge_vertices(tri, le);
    Vec2 pa = m.vertices[a], pb = m.vertices[b];
    Vec2 n = perp(pb - pa);
    n = n / norm(n);
    Vec2 opp = m.vertices[m.triangles[tri].v[le]];
    Vec2 mid = (pa + pb) * 0.5;
    if (dot(n, opp - mid) > 0.0) n = -n;
    return n;
}

} // namespace

double Mesh::diameter(int tri) const {
    const auto& t = triangles[tri];
    double d = 0.0;
    for (int e = 0; e < 3; ++e)
        d = std::max(d, norm(vertices[t.v[(e + 1) % 3]] - vertices[t.v[(e + 2) % 3]]));
    return d;
}

double Mesh::inradius(int tri) const {
    const auto& t = triangles[tri];
    double s = 0.0;
    for (int e = 0; e < 3; ++e)
        s += norm(vertices[t.v[(e + 1) % 3]] - vertices[t.v[(e + 2) % 3]]);
    return signed_area(tri) / (0.5 * s);
}

double Mesh::max_diameter() const {
    double h = 0.0;
    for (int i = 0; i < n_triangles(); ++i) h = std::max(h, diameter(i));
    return h;
}

double Mesh::total_area() const {
    KahanSum s;
    for (int i = 0; i < n_triangles(); ++i) s.add(signed_area(i));
    return s.value();
}

EdgeGeometry Mesh::interior_edge_geometry(int e) const {
    const auto& ie = interior_edges[e];
    EdgeGeometry g;
    Vec2 pa = vertices[ie.v[0]], pb = vertices[ie.v[1]];
    g.length = norm(pb - pa);
    g.midpoint = (pa + pb) * 0.5;
    g.normal1 = outward_normal(*this, ie.tri_left, ie.le_left);
    g.normal2 = outward_normal(*this, ie.tri_right, ie.le_right);
    return g;
}

EdgeGeometry Mesh::boundary_edge_geometry(int e) const {
    const auto& be = boundary_edges[e];
    EdgeGeometry g;
    Vec2 pa = vertices[be.v[0]], pb = vertices[be.v[1]];
    g.length = norm(pb - pa);
    g.midpoint = (pa + pb) * 0.5;
    g.normal1 = outward_normal(*this, be.tri, be.le);
    g.normal2 = -g.normal1;
    return g;
}

void Mesh::build_edges() {
    interior_edges.clear();
    boundary_edges.clear();
    std::unordered_map<std::uint64_t, int> index;
    std::vector<InteriorEdge> edges;
    edges.reserve(triangles.size() * 3 / 2);
    for (int t = 0; t < n_triangles(); ++t) {
        for (int le = 0; le < 3; ++le) {
            auto [a, b] = edge_vertices(t, le);
            auto key = edge_key(a, b);
            auto it = index.find(key);
            if (it == index.end()) {
                InteriorEdge e;
                e.v = {std::min(a, b), std::max(a, b)};
                e.tri_left = t;
                e.le_left = le;
                index.emplace(key, static_cast<int>(edges.size()));
                edges.push_back(e);
            } else {
                InteriorEdge& e = edges[it->second];
                if (e.tri_right != -1)
                    throw std::runtime_error("mesh: edge shared by more than two triangles");
                e.tri_right = t;
                e.le_right = le;
            }
        }
    }
    for (const auto& e : edges) {
        if (e.tri_right == -1) {
            boundary_edges.push_back({e.v, e.tri_left, e.le_left});
        } else {
            interior_edges.push_back(e);
        }
    }
}

void Mesh::validate() const {
    const double tol = 1e-12;
    for (int t = 0; t < n_triangles(); ++t) {
        double a = signed_area(t);
        double d = diameter(t);
        if (!(a > 1e-15 * d * d))
            throw std::runtime_error("mesh: non-positive triangle orientation");
    }
    for (const auto& e : interior_edges) {
        Vec2 n1 = outward_normal(*this, e.tri_left, e.le_left);
        Vec2 n2 = outward_normal(*this, e.tri_right, e.le_right);
        if (norm(n1 + n2) > tol)
            throw std::runtime_error("mesh: interior edge normals not opposite");
        if (std::abs(norm(n1) - 1.0) > tol)
            throw std::runtime_error("mesh: normal not unit");
    }
    // Euler relation for a simply connected (disk topology) mesh
    long V = n_vertices();
    long E = static_cast<long>(interior_edges.size() + boundary_edges.size());
    long T = n_triangles();
    if (V - E + T != 1)
        throw std::runtime_error("mesh: Euler relation V - E + T = 1 violated");

    // A hanging node shows up as a vertex strictly inside an edge that got
    // classified one-sided. Bucket vertices on a uniform grid and walk the
    // cells along each one-sided edge.
    if (!boundary_edges.empty() && n_vertices() > 3) {
        double cell = std::sqrt(std::abs(total_area()) / n_vertices());
        cell = std::max(cell, 1e-9);
        auto cell_of = [cell](double u) { return static_cast<long>(std::floor(u / cell)); };
        auto hash = [](long i, long j) {
            return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                   static_cast<std::uint32_t>(j);
        };
        std::unordered_map<std::uint64_t, std::vector<int>> grid;
        for (int v = 0; v < n_vertices(); ++v)
            grid[hash(cell_of(vertices[v].x), cell_of(vertices[v].y))].push_back(v);
        for (const auto& be : boundary_edges) {
            Vec2 pa = vertices[be.v[0]], pb = vertices[be.v[1]];
            double len = norm(pb - pa);
            Vec2 dir = (pb - pa) / len;
            int steps = static_cast<int>(len / cell) + 1;
            long pi = 0, pj = 0;
            bool started = false;
            for (int s = 0; s <= steps; ++s) {
                Vec2 q = pa + dir * (len * s / steps);
                long ci = cell_of(q.x), cj = cell_of(q.y);
                if (started && ci == pi && cj == pj) continue;
                started = true;
                pi = ci;
                pj = cj;
                for (long i = ci - 1; i <= ci + 1; ++i) {
                    for (long j = cj - 1; j <= cj + 1; ++j) {
                        auto it = grid.find(hash(i, j));
                        if (it == grid.end()) continue;
                        for (int v : it->second) {
                            if (v == be.v[0] || v == be.v[1]) continue;
                            Vec2 d = vertices[v] - pa;
                            double along = dot(d, dir);
                            if (along < tol || along > len - tol) continue;
                            if (std::abs(cross(dir, d)) < tol)
                                throw std::runtime_error("mesh: hanging node detected");
                        }
                    }
                }
            }
        }
    }
}

double shape_regularity(const Mesh& mesh) {
    double r = 1e300;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        r = std::min(r, mesh.inradius(t) / mesh.diameter(t));
    return r;
}

namespace {

void init_newest_by_longest_edge(Mesh& mesh) {
    for (auto& t : mesh.triangles) {
        double best = -1.0;
        int newest = 0;
        for (int le = 0; le < 3; ++le) {
            double len = norm(mesh.vertices[t.v[(le + 1) % 3]] - mesh.vertices[t.v[(le + 2) % 3]]);
            if (len > best + 1e-15) {
                best = len;
                newest = le;
            }
        }
        t.newest = newest;
    }
}

void project_boundary_vertices(Mesh& mesh) {
    std::vector<char> on_boundary(mesh.n_vertices(), 0);
    for (const auto& be : mesh.boundary_edges) {
        on_boundary[be.v[0]] = 1;
        on_boundary[be.v[1]] = 1;
    }
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!on_boundary[v]) continue;
        double r = norm(mesh.vertices[v]);
        mesh.vertices[v] = mesh.vertices[v] / r;
    }
}

} // namespace

Mesh build_disk_mesh(int levels) {
    if (levels < 0) throw std::invalid_argument("build_disk_mesh: levels must be >= 0");
    const double s = 0.5 * std::sqrt(0.5); // inner square corner coordinate
    const double b = std::sqrt(0.5);       // diagonal boundary coordinate

    Mesh m;
    m.boundary_on_unit_circle = true;
    m.vertices = {
        {0.0, 0.0},                         // center
        {s, s}, {-s, s}, {-s, -s}, {s, -s}, // square corners at 45,135,225,315 deg
        {1.0, 0.0}, {b, b}, {0.0, 1.0}, {-b, b},
        {-1.0, 0.0}, {-b, -b}, {0.0, -1.0}, {b, -b}, // boundary, 45 deg apart
    };
    auto tri = [](int a, int b_, int c) { return Triangle{{a, b_, c}, 0, 0}; };
    m.triangles = {
        tri(0, 1, 2), tri(0, 2, 3), tri(0, 3, 4), tri(0, 4, 1),
        // ring, one sector per square edge
        tri(4, 12, 5), tri(4, 5, 1), tri(1, 5, 6),
        tri(1, 6, 7), tri(1, 7, 2), tri(2, 7, 8),
        tri(2, 8, 9), tri(2, 9, 3), tri(3, 9, 10),
        tri(3, 10, 11), tri(3, 11, 4), tri(4, 11, 12),
    };
    m.build_edges();
    init_newest_by_longest_edge(m);
    project_boundary_vertices(m);
    m.validate();
    for (int l = 0; l < levels; ++l) m = uniform_refine(m).mesh;
    return m;
}

Mesh build_square_mesh(int n, std::uint64_t seed, double jitter) {
    if (n < 1) throw std::invalid_argument("build_square_mesh: n must be >= 1");
    Mesh m;
    auto grid_vertex = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({(2.0 * i - n) / n, (2.0 * j - n) / n});
    int center0 = (n + 1) * (n + 1);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Vec2 c = (m.vertices[grid_vertex(i, j)] + m.vertices[grid_vertex(i + 1, j + 1)]) * 0.5;
            m.vertices.push_back(c);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int c = center0 + j * n + i;
            int v00 = grid_vertex(i, j), v10 = grid_vertex(i + 1, j);
            int v11 = grid_vertex(i + 1, j + 1), v01 = grid_vertex(i, j + 1);
            // newest vertex is the cell center, so the refinement edges are
            // the outer cell edges: a compatible bisection matching
            m.triangles.push_back({{v00, v10, c}, 2, 0});
            m.triangles.push_back({{v10, v11, c}, 2, 0});
            m.triangles.push_back({{v11, v01, c}, 2, 0});
            m.triangles.push_back({{v01, v00, c}, 2, 0});
        }
    }
    if (jitter > 0.0) {
        double h = 2.0 / n;
        double amp = jitter * h / std::sqrt(2.0);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-amp, amp);
        for (int j = 1; j < n; ++j) {
            for (int i = 1; i < n; ++i) {
                double dx = u(rng), dy = u(rng);
                m.vertices[grid_vertex(i, j)] += {dx, dy};
            }
        }
        for (int c = center0; c < static_cast<int>(m.vertices.size()); ++c) {
            double dx = u(rng), dy = u(rng);
            m.vertices[c] += {dx, dy};
        }
    }
    m.build_edges();
    m.validate();
    return m;
}

RefineResult uniform_refine(const Mesh& mesh) {
    RefineResult out;
    Mesh& m = out.mesh;
    m.boundary_on_unit_circle = mesh.boundary_on_unit_circle;
    m.vertices = mesh.vertices;

    std::unordered_map<std::uint64_t, int> midpoint;
    auto midpoint_of = [&](int a, int b) {
        auto key = edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
        midpoint.emplace(key, id);
        return id;
    };

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& T = mesh.triangles[t];
        int v0 = T.v[0], v1 = T.v[1], v2 = T.v[2];
        int m01 = midpoint_of(v0, v1);
        int m12 = midpoint_of(v1, v2);
        int m20 = midpoint_of(v2, v0);
        int gen = T.generation + 1;
        std::array<Triangle, 4> kids = {
            Triangle{{v0, m01, m20}, 0, gen},
            Triangle{{m01, v1, m12}, 0, gen},
            Triangle{{m20, m12, v2}, 0, gen},
            Triangle{{m12, m20, m01}, 0, gen},
        };
        // Each child's refinement edge is its unique edge parallel to (or on)
        // the parent's refinement edge. This keeps the bisection matching
        // compatible across the refined mesh.
        int pa = (T.newest + 1) % 3, pb = (T.newest + 2) % 3;
        auto mid_of_parent_edge = [&](int a, int b) {
            if ((a == 0 && b == 1) || (a == 1 && b == 0)) return m01;
            if ((a == 1 && b == 2) || (a == 2 && b == 1)) return m12;
            return m20;
        };
        int mref = mid_of_parent_edge(pa, pb);
        for (int c = 0; c < 4; ++c) {
            Triangle& K = kids[c];
            int newest = -1;
            if (c < 3) {
                int corner_vertex = T.v[c];
                if (c == pa || c == pb) {
                    // refinement edge = (corner_vertex, mref), half of the parent edge
                    for (int l = 0; l < 3; ++l) {
                        int a = K.v[(l + 1) % 3], b = K.v[(l + 2) % 3];
                        if ((a == corner_vertex && b == mref) || (a == mref && b == corner_vertex))
                            newest = l;
                    }
                } else {
                    // refinement edge = the midline (edge not touching the corner)
                    for (int l = 0; l < 3; ++l) {
                        int a = K.v[(l + 1) % 3], b = K.v[(l + 2) % 3];
                        if (a != corner_vertex && b != corner_vertex) newest = l;
                    }
                }
            } else {
                // middle child: refinement edge is the midline opposite mref,
                // i.e. the edge (m12,m20,m01) \ {edges touching mref}
                for (int l = 0; l < 3; ++l) {
                    int a = K.v[(l + 1) % 3], b = K.v[(l + 2) % 3];
                    if (a != mref && b != mref) newest = l;
                }
            }
            if (newest < 0) throw std::runtime_error("uniform_refine: newest assignment failed");
            K.newest = newest;
            m.triangles.push_back(K);
            out.parent.push_back(t);
        }
    }
    m.build_edges();
    if (m.boundary_on_unit_circle) project_boundary_vertices(m);
    m.validate();
    return out;
}

namespace {

struct EdgeSlot {
    std::array<int, 2> t{-1, -1};
};

} // namespace

RefineResult bisect(const Mesh& mesh, const std::vector<int>& marked) {
    for (int t : marked)
        if (t < 0 || t >= mesh.n_triangles())
            throw std::invalid_argument("bisect: marked triangle out of range");

    RefineResult out;
    Mesh& m = out.mesh;
    m.boundary_on_unit_circle = mesh.boundary_on_unit_circle;
    m.vertices = mesh.vertices;
    m.triangles = mesh.triangles;
    out.parent.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) out.parent[t] = t;

    if (marked.empty()) {
        m.interior_edges = mesh.interior_edges;
        m.boundary_edges = mesh.boundary_edges;
        return out;
    }

    std::unordered_map<std::uint64_t, EdgeSlot> edge2tri;
    edge2tri.reserve(mesh.n_triangles() * 2);
    auto attach = [&](int a, int b, int t) {
        auto& slot = edge2tri[edge_key(a, b)].t;
        if (slot[0] == t || slot[1] == t) return;
        if (slot[0] == -1) slot[0] = t;
        else if (slot[1] == -1) slot[1] = t;
        else throw std::runtime_error("bisect: edge incident to >2 triangles");
    };
    auto detach_edge = [&](int a, int b) { edge2tri.erase(edge_key(a, b)); };
    auto replace = [&](int a, int b, int told, int tnew) {
        auto it = edge2tri.find(edge_key(a, b));
        if (it == edge2tri.end()) throw std::runtime_error("bisect: missing edge entry");
        auto& slot = it->second.t;
        if (slot[0] == told) slot[0] = tnew;
        else if (slot[1] == told) slot[1] = tnew;
        else throw std::runtime_error("bisect: stale edge entry");
    };
    for (int t = 0; t < m.n_triangles(); ++t)
        for (int le = 0; le < 3; ++le) {
            auto [a, b] = m.edge_vertices(t, le);
            attach(a, b, t);
        }

    auto ref_edge = [&](int t) -> std::array<int, 2> {
        const auto& T = m.triangles[t];
        return {T.v[(T.newest + 1) % 3], T.v[(T.newest + 2) % 3]};
    };
    auto neighbor_across = [&](int t, std::array<int, 2> e) {
        auto it = edge2tri.find(edge_key(e[0], e[1]));
        if (it == edge2tri.end()) return -1;
        if (it->second.t[0] == t) return it->second.t[1];
        return it->second.t[0];
    };

    std::unordered_map<std::uint64_t, int> midpoint;
    auto midpoint_of = [&](int a, int b) {
        auto key = edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back((m.vertices[a] + m.vertices[b]) * 0.5);
        midpoint.emplace(key, id);
        return id;
    };

    // Split t through its refinement edge (a,b). Child (a,M,P) reuses slot t,
    // child (M,b,P) is appended; both have the midpoint M as newest vertex.
    auto split_one = [&](int t) {
        const Triangle T = m.triangles[t];
        int P = T.v[T.newest];
        int a = T.v[(T.newest + 1) % 3];
        int b = T.v[(T.newest + 2) % 3];
        int M = midpoint_of(a, b);
        int t2 = static_cast<int>(m.triangles.size());
        m.triangles[t] = Triangle{{a, M, P}, 1, T.generation + 1};
        m.triangles.push_back(Triangle{{M, b, P}, 0, T.generation + 1});
        out.parent.push_back(out.parent[t]);
        detach_edge(a, b);
        attach(a, M, t);
        attach(M, b, t2);
        attach(M, P, t);
        attach(M, P, t2);
        replace(b, P, t, t2);
        // edge (a,P) keeps t
    };

    std::vector<char> pending(m.n_triangles(), 0);
    std::vector<int> stack;
    for (int t : marked) {
        if (!pending[t]) {
            pending[t] = 1;
            stack.push_back(t);
        }
    }

    long splits = 0;
    long visits = 0;
    const long split_limit = 8L * mesh.n_triangles() + 1024;
    const long visit_limit = 64L * mesh.n_triangles() + 4096;
    while (!stack.empty()) {
        // an incompatible neighbor chain that cycles would spin here without
        // ever splitting, so bound the visits as well as the splits
        if (++visits > visit_limit)
            throw std::runtime_error("bisect: incompatible refinement-edge cycle");
        int t = stack.back();
        if (!pending[t]) {
            stack.pop_back();
            continue;
        }
        auto e = ref_edge(t);
        int nb = neighbor_across(t, e);
        if (nb >= 0) {
            auto enb = ref_edge(nb);
            if (edge_key(enb[0], enb[1]) != edge_key(e[0], e[1])) {
                // neighbor must be bisected first to make the pair compatible
                pending[nb] = 1;
                stack.push_back(nb);
                continue;
            }
        }
        pending[t] = 0;
        split_one(t);
        if (nb >= 0) {
            pending[nb] = 0;
            split_one(nb);
        }
        pending.resize(m.n_triangles(), 0);
        if (++splits > split_limit)
            throw std::runtime_error("bisect: closure did not terminate");
    }

    m.build_edges();
    if (m.boundary_on_unit_circle) project_boundary_vertices(m);
    m.validate();
    return out;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_mesh: cannot open " + path);
    f << mesh.n_vertices() << " " << mesh.n_triangles() << " " << mesh.boundary_edges.size()
      << "\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        f << buf;
    }
    for (const auto& t : mesh.triangles)
        f << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << t.newest << "\n";
    for (const auto& e : mesh.boundary_edges) f << e.v[0] << " " << e.v[1] << "\n";
    if (!f) throw std::runtime_error("write_mesh: write failed");
}

Mesh read_mesh(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_mesh: cannot open " + path);
    int nv, nt, nb;
    if (!(f >> nv >> nt >> nb)) throw std::runtime_error("read_mesh: bad header");
    Mesh m;
    m.vertices.resize(nv);
    for (auto& v : m.vertices)
        if (!(f >> v.x >> v.y)) throw std::runtime_error("read_mesh: bad vertex line");
    m.triangles.resize(nt);
    for (auto& t : m.triangles) {
        if (!(f >> t.v[0] >> t.v[1] >> t.v[2] >> t.newest))
            throw std::runtime_error("read_mesh: bad triangle line");
        if (t.newest < 0 || t.newest > 2)
            throw std::runtime_error("read_mesh: newest vertex index out of range");
    }
    std::vector<std::array<int, 2>> listed(nb);
    for (auto& e : listed)
        if (!(f >> e[0] >> e[1])) throw std::runtime_error("read_mesh: bad boundary edge line");
    m.build_edges();
    if (listed.size() != m.boundary_edges.size())
        throw std::runtime_error("read_mesh: boundary edge count mismatch");
    std::vector<std::uint64_t> a, b;
    for (auto& e : listed) a.push_back(edge_key(e[0], e[1]));
    for (auto& e : m.boundary_edges) b.push_back(edge_key(e.v[0], e.v[1]));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw std::runtime_error("read_mesh: boundary edges disagree with topology");
    m.validate();
    return m;
}

} // namespace nfem
