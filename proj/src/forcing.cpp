#include "faraday/forcing.hpp"

#include "faraday/errors.hpp"

namespace faraday {

namespace {

using Grad = std::array<Nodal, 3>;

VolumeField volume(const GridPtr& grid, std::vector<Nodal> comps) {
  return from_nodal<FieldKind::volume>(grid, comps, true);
}

SurfaceField surface(const GridPtr& grid, std::vector<Nodal> comps) {
  return from_nodal<FieldKind::surface>(grid, comps, true);
}

// Flat divergence of a symmetric tensor stored in the 6-entry layout: (div T)_i = d_j T_ij.
VolumeField flat_divergence(const VolumeField& T) {
  std::vector<VolumeField> rows;
  for (int i = 0; i < 3; ++i) {
    rows.push_back(d1(component(T, sym_index(i, 0))) + d2(component(T, sym_index(i, 1))) +
                   d3(component(T, sym_index(i, 2))));
  }
  return stack(rows);
}

}  // namespace

SurfaceField kinematic_velocity(const VolumeField& u, const SurfaceField& eta) {
  const GridPtr& grid = eta.grid_ptr();
  const SurfaceField top = trace_top(u);
  const Nodal u1 = to_nodal(top, 0);
  const Nodal u2 = to_nodal(top, 1);
  const Nodal u3 = to_nodal(top, 2);
  return surface(grid, {u3 - u1 * to_nodal(d1(eta)) - u2 * to_nodal(d2(eta))});
}

GeometryState geometry_for(const FlowState& state, const Params& params, double jacobian_floor) {
  return build_geometry(state.eta, kinematic_velocity(state.u, state.eta), params, jacobian_floor);
}

ForcingBundle compute_G(const FlowState& state, const GeometryState& geom, double t,
                        const Params& params) {
  if (!geom.has_time_derivative) throw ContractError("compute_G needs a geometry with d_t eta");
  const GridPtr& grid = geom.grid;
  const double mu = params.mu;
  const VolumeField& u = state.u;

  std::array<Grad, 3> grad;      // grad[i] = nodal gradient of u_i
  std::array<Grad, 3> A_grad;    // calA applied
  std::array<Grad, 3> AmI_grad;  // (calA - I) applied
  for (int i = 0; i < 3; ++i) {
    grad[i] = nodal_gradient(component(u, i));
    A_grad[i] = apply_A(geom, grad[i]);
    AmI_grad[i] = apply_A(geom, grad[i], true);
  }
  const std::array<Nodal, 3> un = {to_nodal(u, 0), to_nodal(u, 1), to_nodal(u, 2)};
  const Nodal dt_eta_hat = to_nodal(geom.dt_eta_hat);

  // D_{A-I} u in the 6-entry layout; div D_{I-A} u = -div D_{A-I} u.
  std::vector<Nodal> DAmI(6);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      DAmI[static_cast<std::size_t>(sym_index(i, j))] = AmI_grad[j][i] + AmI_grad[i][j];
    }
  }
  const VolumeField DAmI_field = volume(grid, DAmI);
  const VolumeField div_DAmI = flat_divergence(DAmI_field);

  const VolumeField S = stress_A(u, state.p, geom, mu);
  std::vector<Nodal> G1(3);
  for (int i = 0; i < 3; ++i) {
    Nodal acc = dt_eta_hat * geom.btilde_nodal * geom.K_nodal * grad[i][2];
    for (int j = 0; j < 3; ++j) acc -= un[j] * A_grad[i][j];
    // div_{A-I} S: (A - I)_jk d_k S_ij summed over j.
    for (int j = 0; j < 3; ++j) {
      const Grad dS = nodal_gradient(component(S, sym_index(i, j)));
      acc -= apply_A(geom, dS, true)[j];
    }
    G1[i] = acc;
  }
  ForcingBundle out;
  out.G1 = volume(grid, G1) + mu * div_DAmI;

  Nodal G2 = Nodal::Zero(un[0].size());
  for (int i = 0; i < 3; ++i) G2 -= AmI_grad[i][i];
  out.G2 = volume(grid, {G2});

  const Nodal e1 = to_nodal(d1(state.eta));
  const Nodal e2 = to_nodal(d2(state.eta));
  const SurfaceField top_u = trace_top(u);
  out.G3 = surface(grid, {-to_nodal(top_u, 0) * e1 - to_nodal(top_u, 1) * e2});

  out.G5 = params.parametric(t) * state.eta;

  // Surface tractions. e3 - N = (d1 eta, d2 eta, 0).
  const Nodal p_top = to_nodal(trace_top(state.p));
  std::vector<Nodal> Dflat(6);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const int s = sym_index(i, j);
      Dflat[static_cast<std::size_t>(s)] = grad[j][i] + grad[i][j];
    }
  }
  const VolumeField Dflat_field = volume(grid, Dflat);
  const SurfaceField Dflat_top = trace_top(Dflat_field);
  const SurfaceField DAmI_top = trace_top(DAmI_field);
  const CurvatureSplit curv = mean_curvature(state.eta);
  const Nodal H = to_nodal(curv.H);
  const Nodal H_minus_lap = to_nodal(curv.nonlinear);
  const Nodal eta = to_nodal(state.eta);
  const Nodal G5n = to_nodal(out.G5);
  const std::array<Nodal, 3> e3mN = {e1, e2, Nodal::Zero(e1.size())};
  const std::array<Nodal, 3> N = {-e1, -e2, Nodal::Ones(e1.size())};
  const Nodal scalar = -(params.g * eta + G5n) + params.sigma * H;
  std::vector<Nodal> G4(3);
  for (int i = 0; i < 3; ++i) {
    Nodal acc = p_top * e3mN[i] + scalar * e3mN[i];
    for (int j = 0; j < 2; ++j) {
      acc -= mu * to_nodal(Dflat_top, sym_index(i, j)) * e3mN[j];
    }
    for (int j = 0; j < 3; ++j) acc += mu * to_nodal(DAmI_top, sym_index(i, j)) * N[j];
    if (i == 2) acc -= params.sigma * H_minus_lap;
    G4[i] = acc;
  }
  out.G4 = surface(grid, G4);
  return out;
}

VolumeField compute_F21(const FlowState& state, const GeometryState& geom) {
  if (!geom.has_time_derivative) throw ContractError("compute_F21 needs a geometry with d_t eta");
  const Nodal d3u1 = to_nodal(d3(component(state.u, 0)));
  const Nodal d3u2 = to_nodal(d3(component(state.u, 1)));
  const Nodal d3u3 = to_nodal(d3(component(state.u, 2)));
  return volume(geom.grid,
                {-geom.dt_a1K_nodal * d3u1 - geom.dt_a2K_nodal * d3u2 + geom.dt_K_nodal * d3u3});
}

}  // namespace faraday
