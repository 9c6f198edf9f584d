#pragma once

#include "faraday/field.hpp"

namespace faraday {

/// Snapshot (u, p, eta, t) of the flattened system.
struct FlowState {
  VolumeField u;    // 3 components
  VolumeField p;
  SurfaceField eta;
  double t = 0.0;

  static FlowState zero(const GridPtr& grid, double t = 0.0) {
    return {VolumeField(grid, 3), VolumeField(grid, 1), SurfaceField(grid, 1), t};
  }
  const GridPtr& grid_ptr() const { return u.grid_ptr(); }
};

}  // namespace faraday
