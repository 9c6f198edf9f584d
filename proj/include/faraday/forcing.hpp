#pragma once

#include "faraday/geometry.hpp"
#include "faraday/state.hpp"

namespace faraday {

/// Nonlinear remainders of the flattened system measured against its constant-coefficient
/// linearization, plus the linear parametric term G5 and the time-differentiated divergence
/// remainder F21.
struct ForcingBundle {
  VolumeField G1;   // 3-vector
  VolumeField G2;
  SurfaceField G3;
  SurfaceField G4;  // 3-vector
  SurfaceField G5;
  VolumeField F21;  // empty unless requested
};

/// u . N on the surface: u3 - u1 d1 eta - u2 d2 eta (dealiased products).
SurfaceField kinematic_velocity(const VolumeField& u, const SurfaceField& eta);

/// Geometry of the state with d_t eta taken from the kinematic relation.
GeometryState geometry_for(const FlowState& state, const Params& params,
                           double jacobian_floor = kDefaultJacobianFloor);

/// G1..G5 at time t. The geometry must carry d_t eta (see geometry_for).
ForcingBundle compute_G(const FlowState& state, const GeometryState& geom, double t,
                        const Params& params);

/// F21 = d_t calA_jk d_k u_j from the time derivative stored in geom.
VolumeField compute_F21(const FlowState& state, const GeometryState& geom);

}  // namespace faraday
