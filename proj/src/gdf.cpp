#include "geoprint/gdf.hpp"

#include "geoprint/parallel.hpp"

#include <cmath>

namespace geoprint {

double default_time_step(const TetMesh& mesh) {
    double h = mesh.average_edge_length();
    return h * h;
}

ScalarField solve_heat(const TetMesh& mesh, const BaseRegion& base, double t, SolveReport* report) {
    Vector vol = lumped_volume_vector(mesh);
    Vector rhs = Vector::Zero(mesh.num_vertices());
    for (int v : base.vertices) rhs[v] = vol[v];
    SparseMatrix A = assemble_stiffness(mesh) * t;
    for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += vol[i];
    SolveOptions o;
    o.tol = 1e-9;
    o.drive_tol = 1e-40;
    auto [u, rep] = solve_spd(A, rhs, o);
    if (report) *report = rep;
    return u;
}

std::vector<Vec3> tet_gradient(const TetMesh& mesh, const ScalarField& f) {
    std::vector<Vec3> g(mesh.num_tets());
    parallel_for(g.size(), [&](size_t t) {
        const auto& T = mesh.tet(static_cast<int>(t));
        Vec3 s = Vec3::Zero();
        for (int i = 0; i < 4; ++i) s += f[T[i]] * mesh.basis_gradient(static_cast<int>(t), i);
        g[t] = s;
    });
    return g;
}

Frame make_frame(const Vec3& gradient, const Vec3& r) {
    Frame fr;
    fr.gamma = normalized_or(gradient, Vec3(0, 0, 1), 1e-300);
    const Vec3 refs[3] = {normalized_or(r, Vec3(1, 0, 0)), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    Vec3 a = Vec3::Zero();
    for (const Vec3& ref : refs) {
        a = ref.cross(fr.gamma);
        if (a.norm() >= 1e-6) break;
    }
    fr.alpha = a.normalized();
    fr.beta = fr.alpha.cross(fr.gamma);
    fr.beta.normalize();
    return fr;
}

FrameField build_frames(const std::vector<Vec3>& gradients, const Vec3& r) {
    FrameField f(gradients.size());
    parallel_for(f.size(), [&](size_t t) { f[t] = make_frame(gradients[t], r); });
    return f;
}

FrameDiagnostics frame_diagnostics(const FrameField& frames) {
    FrameDiagnostics d;
    for (const auto& f : frames) {
        d.max_dot = std::max({d.max_dot, std::abs(f.gamma.dot(f.alpha)), std::abs(f.gamma.dot(f.beta)),
                              std::abs(f.alpha.dot(f.beta))});
        d.max_norm_error = std::max({d.max_norm_error, std::abs(f.gamma.norm() - 1.0), std::abs(f.alpha.norm() - 1.0),
                                     std::abs(f.beta.norm() - 1.0)});
        d.max_handedness_error = std::max(d.max_handedness_error, (f.alpha.cross(f.gamma) - f.beta).norm());
    }
    return d;
}

Vector integrated_divergence(const TetMesh& mesh, const std::vector<Vec3>& vectors) {
    Vector b = Vector::Zero(mesh.num_vertices());
    // serial accumulation keeps the summation order fixed
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& T = mesh.tet(t);
        for (int i = 0; i < 4; ++i) b[T[i]] += mesh.tet_volume(t) * mesh.basis_gradient(t, i).dot(vectors[t]);
    }
    return b;
}

ScalarField solve_poisson(const TetMesh& mesh, const Vector& div, const BaseRegion* base, double tol,
                          SolveReport* report) {
    SparseMatrix K = assemble_stiffness(mesh);
    if (!base || base->vertices.empty()) {
        Vector b = div.array() - div.mean();
        auto [phi, rep] = solve_spd(K, b, tol);
        if (report) *report = rep;
        phi.array() -= phi.minCoeff();
        return phi;
    }
    // phi = 0 held on the base; solve for the free vertices only
    const int n = mesh.num_vertices();
    std::vector<int> slot(n, 0);
    for (int v : base->vertices) slot[v] = -1;
    int nf = 0;
    for (int v = 0; v < n; ++v)
        if (slot[v] == 0) slot[v] = nf++;
        else slot[v] = -1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(K.nonZeros());
    for (int c = 0; c < K.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(K, c); it; ++it)
            if (slot[it.row()] >= 0 && slot[it.col()] >= 0) trip.emplace_back(slot[it.row()], slot[it.col()], it.value());
    SparseMatrix Kf(nf, nf);
    Kf.setFromTriplets(trip.begin(), trip.end());
    Vector bf(nf);
    for (int v = 0; v < n; ++v)
        if (slot[v] >= 0) bf[slot[v]] = div[v];
    auto [xf, rep] = solve_spd(Kf, bf, tol);
    if (report) *report = rep;
    Vector phi = Vector::Zero(n);
    for (int v = 0; v < n; ++v)
        if (slot[v] >= 0) phi[v] = xf[slot[v]];
    return phi;
}

GdfResult compute_gdfs(const TetMesh& mesh, const BaseRegion& base, const GdfOptions& opts) {
    GdfResult r;
    double t = opts.time_step > 0 ? opts.time_step : default_time_step(mesh);
    r.heat = solve_heat(mesh, base, t, &r.heat_report);
    auto gu = tet_gradient(mesh, r.heat);
    r.heat_direction.resize(gu.size());
    for (size_t k = 0; k < gu.size(); ++k) r.heat_direction[k] = normalized_or(-gu[k], Vec3::Zero(), 1e-300);
    r.gamma = solve_poisson(mesh, integrated_divergence(mesh, r.heat_direction), &base, opts.tol, &r.gamma_report);
    r.frames = build_frames(tet_gradient(mesh, r.gamma), opts.r);
    std::vector<Vec3> ga(r.frames.size()), gb(r.frames.size());
    for (size_t k = 0; k < ga.size(); ++k) {
        ga[k] = r.frames[k].alpha;
        gb[k] = r.frames[k].beta;
    }
    r.alpha = solve_poisson(mesh, integrated_divergence(mesh, ga), nullptr, opts.tol, &r.alpha_report);
    r.beta = solve_poisson(mesh, integrated_divergence(mesh, gb), nullptr, opts.tol, &r.beta_report);
    return r;
}

}  // namespace geoprint
