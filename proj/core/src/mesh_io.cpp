#include "reilly/mesh_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace reilly {

using nlohmann::json;

json mesh_to_json(const ImmersedMesh& mesh, const TensorField* tensor) {
  json j;
  j["delta"] = mesh.ambient.delta().value;
  j["ambient_dim"] = mesh.ambient.dim();
  json verts = json::array();
  for (const auto& v : mesh.vertices) {
    json row = json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    verts.push_back(std::move(row));
  }
  j["vertices"] = std::move(verts);
  json faces = json::array();
  for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
  j["faces"] = std::move(faces);
  if (mesh.density.size() > 0 && mesh.density.cwiseAbs().maxCoeff() > 0.0) {
    json d = json::array();
    for (int v = 0; v < mesh.density.size(); ++v) d.push_back(mesh.density[v]);
    j["density"] = std::move(d);
  }
  if (!mesh.boundary_loops.empty()) j["boundary"] = mesh.boundary_loops;
  if (tensor) {
    json entries = json::array(), frames = json::array();
    for (int v = 0; v < tensor->size(); ++v) {
      const auto& e = tensor->entries[v];
      entries.push_back({e(0, 0), e(0, 1), e(1, 1)});
      const auto& fr = tensor->frames[v];
      json f0 = json::array(), f1 = json::array();
      for (int i = 0; i < fr.rows(); ++i) {
        f0.push_back(fr(i, 0));
        f1.push_back(fr(i, 1));
      }
      frames.push_back({std::move(f0), std::move(f1)});
    }
    j["tensor"] = {{"entries", std::move(entries)}, {"frames", std::move(frames)}};
  }
  return j;
}

MeshFile mesh_from_json(const json& j) {
  for (const char* key : {"delta", "ambient_dim", "vertices", "faces"}) {
    if (!j.contains(key)) {
      throw Error(std::string("invalid mesh file: missing field '") + key + "'");
    }
  }
  const Delta delta{j.at("delta").get<double>()};
  const int dim = j.at("ambient_dim").get<int>();
  Ambient ambient(delta, dim);

  std::vector<Vec> verts;
  for (const auto& row : j.at("vertices")) {
    Vec v(static_cast<int>(row.size()));
    for (size_t i = 0; i < row.size(); ++i) v[static_cast<int>(i)] = row[i].get<double>();
    if (v.size() != ambient.coord_size()) {
      throw Error("invalid mesh file: vertex coordinate size does not match ambient");
    }
    verts.push_back(std::move(v));
  }
  std::vector<std::array<int, 3>> faces;
  for (const auto& row : j.at("faces")) {
    if (row.size() != 3) throw Error("invalid mesh file: face is not a triple");
    faces.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>()});
  }
  Vec density;
  if (j.contains("density")) {
    const auto& d = j.at("density");
    density = Vec(static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) density[static_cast<int>(i)] = d[i].get<double>();
  }
  std::vector<std::vector<int>> loops;
  if (j.contains("boundary")) {
    loops = j.at("boundary").get<std::vector<std::vector<int>>>();
  }

  MeshFile out{make_mesh(ambient, std::move(verts), std::move(faces),
                         std::move(density), std::move(loops)),
               std::nullopt};

  if (j.contains("tensor")) {
    const auto& t = j.at("tensor");
    TensorField tf;
    const auto& entries = t.at("entries");
    const auto& frames = t.at("frames");
    if (entries.size() != out.mesh.vertices.size() ||
        frames.size() != out.mesh.vertices.size()) {
      throw Error("invalid mesh file: tensor size does not match vertex count");
    }
    for (size_t v = 0; v < entries.size(); ++v) {
      Eigen::Matrix2d e;
      e << entries[v][0].get<double>(), entries[v][1].get<double>(),
          entries[v][1].get<double>(), entries[v][2].get<double>();
      tf.entries.push_back(e);
      Mat fr(out.mesh.ambient.coord_size(), 2);
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i < fr.rows(); ++i)
          fr(i, c) = frames[v][static_cast<size_t>(c)][static_cast<size_t>(i)].get<double>();
      tf.frames.push_back(std::move(fr));
    }
    out.tensor = std::move(tf);
  }
  return out;
}

MeshFile load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io error: cannot open mesh file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("invalid mesh file: " + std::string(e.what()));
  }
  return mesh_from_json(j);
}

void save_mesh(const std::string& path, const ImmersedMesh& mesh,
               const TensorField* tensor) {
  std::ofstream out(path);
  if (!out) throw Error("io error: cannot write mesh file '" + path + "'");
  out << mesh_to_json(mesh, tensor).dump(2) << "\n";
}

}  // namespace reilly
