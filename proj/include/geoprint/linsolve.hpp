#pragma once

#include "geoprint/tet_mesh.hpp"

#include <Eigen/Sparse>

namespace geoprint {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;  ///< ||Ax - b|| / ||b||, recomputed from the returned x
    double seconds = 0.0;
};

struct SolveOptions {
    double tol = 1e-9;       ///< required relative residual
    int max_iterations = 0;  ///< 0: 10 n
    /// Optional tighter target for the CG recurrence. The heat solve uses it because its
    /// solution decays over orders of magnitude and a 1e-9 residual leaves the far field wrong.
    double drive_tol = 0.0;
};

/// P1 finite-element stiffness K_ij = sum_T |T| grad(phi_i).grad(phi_j); positive semidefinite, K 1 = 0.
SparseMatrix assemble_stiffness(const TetMesh& mesh);
/// The Laplacian in the negative semidefinite convention, L = -K.
SparseMatrix assemble_laplacian(const TetMesh& mesh);
/// Diagonal matrix of vertex volumes, a quarter of the incident tet volumes.
SparseMatrix assemble_lumped_volumes(const TetMesh& mesh);
Vector lumped_volume_vector(const TetMesh& mesh);

/// Jacobi-preconditioned conjugate gradient. Throws SolverError carrying the best residual.
/// For singular systems the caller projects b onto the range first.
std::pair<Vector, SolveReport> solve_spd(const SparseMatrix& A, const Vector& b, const SolveOptions& opts = {},
                                         const Vector* guess = nullptr);
inline std::pair<Vector, SolveReport> solve_spd(const SparseMatrix& A, const Vector& b, double tol) {
    return solve_spd(A, b, SolveOptions{tol});
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b);

}  // namespace geoprint
