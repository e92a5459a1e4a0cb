#pragma once

#include "geoprint/tet_mesh.hpp"

#include <filesystem>
#include <string>

namespace geoprint {

enum class MeshFormat { TetGen, Medit };

/// "tetgen" / "node" / "ele" or "medit" / "mesh".
MeshFormat parse_mesh_format(const std::string& name);
/// Guess from the extension: .node/.ele/no extension -> TetGen, .mesh -> Medit.
MeshFormat guess_mesh_format(const std::filesystem::path& path);

/// For TetGen, `path` may name the .node file, the .ele file, or their common stem.
TetMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TetMesh load_mesh(const std::filesystem::path& path);

/// Writes the mesh with round-trip exact coordinates. TetGen writes stem.node and stem.ele.
void save_mesh(const TetMesh& mesh, const std::filesystem::path& path, MeshFormat format);

}  // namespace geoprint
