#pragma once

#include <array>
#include <optional>

#include "faraday/field.hpp"
#include "faraday/params.hpp"

namespace faraday {

/// Flattening-derived quantities at one instant. The matrix calA is never stored entry by entry;
/// it is
///   [ 1  0  -a1 K ]
///   [ 0  1  -a2 K ]
///   [ 0  0    K   ]
/// and the nodal arrays a1K, a2K, K feed every twisted operator.
struct GeometryState {
  GridPtr grid;
  SurfaceField eta;
  VolumeField eta_hat;
  VolumeField a1, a2;
  VolumeField J;
  /// 1 / J, transformed without dealiasing so that the nodal product K J is 1 to rounding.
  VolumeField K;
  /// Non-unit normal (-d1 eta, -d2 eta, 1).
  SurfaceField N;

  Nodal a1K_nodal, a2K_nodal, K_nodal, J_nodal;
  /// 1 + x3 / b broadcast to all nodes.
  Nodal btilde_nodal;

  // Populated only when a time derivative of eta was supplied.
  bool has_time_derivative = false;
  SurfaceField dt_eta;
  VolumeField dt_eta_hat;
  /// Nodal entries of d/dt calA: rows (0, 0, -d_t(a1 K)), (0, 0, -d_t(a2 K)), (0, 0, d_t K).
  Nodal dt_a1K_nodal, dt_a2K_nodal, dt_K_nodal;

  double min_jacobian() const;
};

inline constexpr double kDefaultJacobianFloor = 0.1;

/// Builds all flattening fields from eta. Throws DegenerateGeometryError if min J <= floor.
GeometryState build_geometry(const SurfaceField& eta, const std::optional<SurfaceField>& deta_dt,
                             const Params& params, double jacobian_floor = kDefaultJacobianFloor);

/// Nodal values of (d1 f, d2 f, d3 f) for a scalar volume field.
std::array<Nodal, 3> nodal_gradient(const VolumeField& f);

/// Applies calA (or calA - I when minus_identity) to a nodal gradient: out_i = calA_ij g_j.
std::array<Nodal, 3> apply_A(const GeometryState& geom, const std::array<Nodal, 3>& grad,
                             bool minus_identity = false);

/// Index of the symmetric tensor component (i, j) in the 6-entry layout
/// (11, 22, 33, 12, 13, 23).
int sym_index(int i, int j);

VolumeField grad_A(const VolumeField& f, const GeometryState& geom);
VolumeField div_A(const VolumeField& X, const GeometryState& geom);
/// (D_A u)_ij = calA_ik d_k u_j + calA_jk d_k u_i in the 6-entry symmetric layout.
VolumeField sym_grad_A(const VolumeField& u, const GeometryState& geom);
/// S_A(u, p) = p I - mu D_A u in the 6-entry symmetric layout.
VolumeField stress_A(const VolumeField& u, const VolumeField& p, const GeometryState& geom,
                     double mu);

/// max over i of ||d_k (J calA_ik)||_inf.
double check_piola(const GeometryState& geom);

struct CurvatureSplit {
  SurfaceField H;          // div(grad eta / sqrt(1 + |grad eta|^2))
  SurfaceField laplacian;  // linear part
  SurfaceField nonlinear;  // H - laplacian, formed without cancellation
};

CurvatureSplit mean_curvature(const SurfaceField& eta);

}  // namespace faraday
