#pragma once

#include "geoprint/linsolve.hpp"
#include "geoprint/tet_mesh.hpp"

namespace geoprint {

using ScalarField = Vector;

/// Orthonormal nozzle frame of one tet. g_alpha x g_gamma = g_beta.
struct Frame {
    Vec3 gamma, alpha, beta;
};
using FrameField = std::vector<Frame>;

struct FrameDiagnostics {
    double max_dot = 0.0;         ///< max |g_a . g_b| over tets and pairs
    double max_norm_error = 0.0;  ///< max ||g| - 1|
    double max_handedness_error = 0.0;
};

/// (average edge length)^2
double default_time_step(const TetMesh& mesh);

/// Solves (V + tK) u = V u0 with u0 the indicator of the base.
ScalarField solve_heat(const TetMesh& mesh, const BaseRegion& base, double t, SolveReport* report = nullptr);

/// Per-tet gradient of a piecewise linear field.
std::vector<Vec3> tet_gradient(const TetMesh& mesh, const ScalarField& field);

Frame make_frame(const Vec3& gradient, const Vec3& r);
FrameField build_frames(const std::vector<Vec3>& gradients, const Vec3& r);
FrameDiagnostics frame_diagnostics(const FrameField& frames);

/// b_i = sum over tets T containing v_i of |T| grad(phi_i).g_T
Vector integrated_divergence(const TetMesh& mesh, const std::vector<Vec3>& vectors);

/// Solves K phi = b. With a base, phi is held at zero on the base vertices (Dirichlet).
/// Without one, b is projected onto the range of K and phi is shifted to a zero global minimum.
ScalarField solve_poisson(const TetMesh& mesh, const Vector& div, const BaseRegion* base, double tol = 1e-9,
                          SolveReport* report = nullptr);

struct GdfOptions {
    Vec3 r = Vec3(1, 0, 0);
    double time_step = 0.0;  ///< <= 0: default_time_step
    double tol = 1e-9;
};

struct GdfResult {
    ScalarField gamma, alpha, beta;
    FrameField frames;
    ScalarField heat;
    std::vector<Vec3> heat_direction;  ///< unit field X fed to the gamma Poisson solve
    SolveReport heat_report, gamma_report, alpha_report, beta_report;
};

GdfResult compute_gdfs(const TetMesh& mesh, const BaseRegion& base, const GdfOptions& opts = {});

}  // namespace geoprint
