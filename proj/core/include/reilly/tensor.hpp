#pragma once

#include "reilly/ambient.hpp"

#include <vector>

namespace reilly {

/// Per-vertex symmetric (1,1)-tensor on a surface, expressed in a stored
/// orthonormal tangent frame (two ambient tangent vectors per vertex).
/// Positive definiteness is required by consumers and checked on use.
struct TensorField {
  std::vector<Mat> frames;               // coord_size x 2 per vertex
  std::vector<Eigen::Matrix2d> entries;  // symmetric 2x2 in the frame

  int size() const { return static_cast<int>(entries.size()); }

  Vec trace_field() const {
    Vec t(size());
    for (int v = 0; v < size(); ++v) t[v] = entries[v].trace();
    return t;
  }

  /// Smallest eigenvalue over all vertices (SPD margin).
  double min_eigenvalue() const;

  TensorField scaled(double c) const {
    TensorField out = *this;
    for (auto& e : out.entries) e *= c;
    return out;
  }
};

}  // namespace reilly
