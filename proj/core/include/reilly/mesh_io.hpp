#pragma once

#include "reilly/mesh.hpp"
#include "reilly/tensor.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace reilly {

/// Mesh file payload: vertices are stored as ambient coordinates under the
/// "delta" header (never chart coordinates), so files are portable across
/// curvatures. Optional per-vertex density and tensor (entries + frames).
struct MeshFile {
  ImmersedMesh mesh;
  std::optional<TensorField> tensor;
};

nlohmann::json mesh_to_json(const ImmersedMesh& mesh,
                            const TensorField* tensor = nullptr);
MeshFile mesh_from_json(const nlohmann::json& j);

MeshFile load_mesh(const std::string& path);
void save_mesh(const std::string& path, const ImmersedMesh& mesh,
               const TensorField* tensor = nullptr);

}  // namespace reilly
