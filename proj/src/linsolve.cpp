#include "geoprint/linsolve.hpp"

#include "geoprint/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <chrono>

namespace geoprint {

SparseMatrix assemble_stiffness(const TetMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(16 * static_cast<size_t>(mesh.num_tets()));
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& T = mesh.tet(t);
        double vol = mesh.tet_volume(t);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                trip.emplace_back(T[i], T[j], vol * mesh.basis_gradient(t, i).dot(mesh.basis_gradient(t, j)));
    }
    SparseMatrix K(mesh.num_vertices(), mesh.num_vertices());
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

SparseMatrix assemble_laplacian(const TetMesh& mesh) { return -assemble_stiffness(mesh); }

Vector lumped_volume_vector(const TetMesh& mesh) {
    Vector v = Vector::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_tets(); ++t)
        for (int k : mesh.tet(t)) v[k] += 0.25 * mesh.tet_volume(t);
    return v;
}

SparseMatrix assemble_lumped_volumes(const TetMesh& mesh) {
    Vector v = lumped_volume_vector(mesh);
    SparseMatrix M(v.size(), v.size());
    M.reserve(Eigen::VectorXi::Ones(v.size()));
    for (int i = 0; i < v.size(); ++i) M.insert(i, i) = v[i];
    M.makeCompressed();
    return M;
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
    double nb = b.norm();
    double nr = (b - A * x).norm();
    return nb > 0.0 ? nr / nb : nr;
}

std::pair<Vector, SolveReport> solve_spd(const SparseMatrix& A, const Vector& b, const SolveOptions& opts,
                                         const Vector* guess) {
    auto t0 = std::chrono::steady_clock::now();
    const long n = A.rows();
    SolveReport rep;
    if (b.norm() == 0.0) {
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {Vector::Zero(n), rep};
    }
    int budget = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(std::min<long>(10 * n, 1 << 30));
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.compute(A);
    Vector x = guess ? *guess : Vector::Zero(n);
    double target = opts.drive_tol > 0.0 ? std::min(opts.drive_tol, opts.tol) : opts.tol;
    double best = relative_residual(A, x, b);
    Vector best_x = x;
    // The recurrence residual can drift from the true one; tighten and restart a few times.
    for (int round = 0; round < 4 && budget > 0; ++round) {
        cg.setTolerance(target);
        cg.setMaxIterations(budget);
        x = cg.solveWithGuess(b, x);
        rep.iterations += static_cast<int>(cg.iterations());
        budget -= static_cast<int>(cg.iterations());
        double r = relative_residual(A, x, b);
        if (r < best || !(best == best)) {
            best = r;
            best_x = x;
        }
        if (r <= opts.tol) break;
        target *= 1e-2;
    }
    rep.residual = relative_residual(A, best_x, b);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!(rep.residual <= opts.tol))
        throw SolverError("conjugate gradient did not reach relative residual " + std::to_string(opts.tol) +
                              " (best " + std::to_string(rep.residual) + ")",
                          rep.residual, rep.iterations);
    return {best_x, rep};
}

}  // namespace geoprint
