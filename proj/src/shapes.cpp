#include "geoprint/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace geoprint::shapes {

namespace {

// Kuhn split: one tet per axis permutation, walking 0 -> 7 along the cube diagonal.
constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

}  // namespace

Part from_grid(std::string name, const GridSpec& g) {
    const int mi = g.periodic_i ? g.ni : g.ni + 1;
    auto node_key = [&](int i, int j, int k) {
        if (g.periodic_i) i %= g.ni;
        return (static_cast<long>(k) * (g.nj + 1) + j) * mi + i;
    };
    std::map<long, int> ids;
    std::vector<Vec3> verts;
    std::vector<int> layer_k;
    std::vector<std::array<int, 4>> tets;
    auto node = [&](int i, int j, int k) {
        long key = node_key(i, j, k);
        auto [it, fresh] = ids.emplace(key, static_cast<int>(verts.size()));
        if (fresh) {
            verts.push_back(g.position(g.periodic_i ? i % g.ni : i, j, k));
            layer_k.push_back(k);
        }
        return it->second;
    };
    for (int k = 0; k < g.nk; ++k)
        for (int j = 0; j < g.nj; ++j)
            for (int i = 0; i < g.ni; ++i) {
                if (!g.active(i, j, k)) continue;
                const bool flip = g.mirror_i(i);
                for (const auto& p : kPerm) {
                    int c[3] = {flip ? i + 1 : i, j, k};
                    std::array<int, 4> t;
                    t[0] = node(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        c[p[s]] += p[s] == 0 && flip ? -1 : 1;
                        t[s + 1] = node(c[0], c[1], c[2]);
                    }
                    tets.push_back(t);
                }
            }
    Part part{std::move(name), TetMesh::build(std::move(verts), std::move(tets)), {}};
    const TetMesh& m = part.mesh;
    part.lateral.assign(m.num_faces(), 0);
    for (int f = 0; f < m.num_faces(); ++f) {
        if (!m.face_on_boundary(f)) continue;
        const auto& F = m.face(f);
        bool flat = layer_k[F[0]] == layer_k[F[1]] && layer_k[F[1]] == layer_k[F[2]];
        part.lateral[f] = flat ? 0 : 1;
    }
    return part;
}

Part column(double wx, double wy, double h, int nx, int ny, int nz) {
    GridSpec g;
    g.ni = nx;
    g.nj = ny;
    g.nk = nz;
    g.position = [=](int i, int j, int k) { return Vec3(wx * i / nx, wy * j / ny, h * k / nz); };
    return from_grid("column", g);
}

Part sphere(double R, int n) {
    GridSpec g;
    g.ni = g.nj = g.nk = n;
    g.position = [=](int i, int j, int k) {
        Vec3 p(2.0 * i / n - 1.0, 2.0 * j / n - 1.0, 2.0 * k / n - 1.0);
        double l2 = p.norm();
        Vec3 q = l2 > 0 ? Vec3(p * (p.cwiseAbs().maxCoeff() / l2)) : Vec3::Zero();
        return Vec3(R * q.x(), R * q.y(), R + R * q.z());
    };
    return from_grid("sphere", g);
}

Part cylinder(double R, double h, int n, int nz) {
    GridSpec g;
    g.ni = g.nj = n;
    g.nk = nz;
    g.position = [=](int i, int j, int k) {
        Eigen::Vector2d p(2.0 * i / n - 1.0, 2.0 * j / n - 1.0);
        double l2 = p.norm();
        Eigen::Vector2d q = l2 > 0 ? Eigen::Vector2d(p * (p.cwiseAbs().maxCoeff() / l2)) : Eigen::Vector2d::Zero();
        return Vec3(R * q.x(), R * q.y(), h * k / nz);
    };
    return from_grid("cylinder", g);
}

Part torus(double R, double a, int n_theta, int n_r, int n_z) {
    GridSpec g;
    g.ni = n_theta;
    g.nj = n_r;
    g.nk = n_z;
    g.periodic_i = true;
    g.position = [=](int i, int j, int k) {
        double th = 2.0 * std::numbers::pi * i / n_theta;
        double r = R - a + 2.0 * a * j / n_r;
        return Vec3(r * std::cos(th), r * std::sin(th), 2.0 * a * k / n_z);
    };
    return from_grid("torus", g);
}

Part y_part() {
    // u in [-10,10] (20 cells), v in [0,10] (8 cells), w in [0,44] (33 cells); trunk up to w = 20.
    constexpr int nu = 20, nv = 8, nw = 33, trunk = 15;
    const double du = 20.0 / nu, dv = 10.0 / nv, dw = 44.0 / nw;
    const double shear = std::tan(35.0 * std::numbers::pi / 180.0);
    GridSpec g;
    g.ni = nu;
    g.nj = nv;
    g.nk = nw;
    g.active = [=](int i, int, int k) { return k < trunk || i < 6 || i >= nu - 6; };
    // keeps the Kuhn diagonal short under the outward shear of the right prong
    g.mirror_i = [=](int i) { return i >= nu / 2; };
    g.position = [=](int i, int j, int k) {
        double u = -10.0 + du * i, w = dw * k;
        double s = std::clamp(u / 4.0, -1.0, 1.0);
        return Vec3(u + s * shear * std::max(0.0, w - 20.0), dv * j, w);
    };
    return from_grid("y_part", g);
}

Part three_branch(double cell) {
    const int n = static_cast<int>(std::lround(20.0 / cell));
    const int nz = static_cast<int>(std::lround(90.0 / cell));
    const int trunk = static_cast<int>(std::lround(30.0 / cell));
    const int fork = static_cast<int>(std::lround(50.0 / cell));
    const int b = static_cast<int>(std::lround(8.0 / cell));
    GridSpec g;
    g.ni = g.nj = n;
    g.nk = nz;
    g.active = [=](int i, int j, int k) {
        if (k < trunk) return true;
        bool left = i < b, right = i >= n - b;
        bool front = j < b, back = j >= n - b;
        if (right) return front;                  // branch at x in [12,20], y in [0,8]
        if (!left) return false;
        return k < fork ? true : front || back;   // 8 x 20 arm splitting into two branches at z = 50
    };
    g.position = [=](int i, int j, int k) { return Vec3(20.0 * i / n, 20.0 * j / n, 90.0 * k / nz); };
    return from_grid("three_branch", g);
}

Part two_columns(double cell) {
    // slab 20 x 8 x 4; columns 6 x 8 at both ends up to z = 20
    const int nx = static_cast<int>(std::lround(20.0 / cell));
    const int ny = static_cast<int>(std::lround(8.0 / cell));
    const int nz = static_cast<int>(std::lround(20.0 / cell));
    const int slab = static_cast<int>(std::lround(4.0 / cell));
    const int col = static_cast<int>(std::lround(6.0 / cell));
    GridSpec g;
    g.ni = nx;
    g.nj = ny;
    g.nk = nz;
    g.active = [=](int i, int, int k) { return k < slab || i < col || i >= nx - col; };
    g.position = [=](int i, int j, int k) { return Vec3(20.0 * i / nx, 8.0 * j / ny, 20.0 * k / nz); };
    return from_grid("two_columns", g);
}

Part unit_cube() { return column(1.0, 1.0, 1.0, 1, 1, 1); }

Part regular_tet() {
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0},
                           {0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0)}};
    Part p{"regular_tet", TetMesh::build(std::move(v), {{0, 1, 2, 3}}), {}};
    p.lateral.assign(p.mesh.num_faces(), 0);
    return p;
}

}  // namespace geoprint::shapes
