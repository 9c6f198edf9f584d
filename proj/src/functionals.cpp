#include "faraday/functionals.hpp"

#include <cmath>
#include <cstdio>

#include "faraday/errors.hpp"
#include "faraday/forcing.hpp"
#include "faraday/geometry.hpp"
#include "faraday/norms.hpp"

namespace faraday {

namespace {

// Fourth-order centred stencils on offsets -2..2.
constexpr double kFirst[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kSecond[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

template <FieldKind K, typename Get>
Field<K> stencil(const TrajectoryWindow& win, const double (&w)[5], double scale, Get get) {
  win.validate();
  const std::size_t c = win.center_index();
  Field<K> out = 0.0 * get(win.states[c]);
  for (int o = -2; o <= 2; ++o) {
    if (w[o + 2] == 0.0) continue;
    out += (w[o + 2] * scale) * get(win.states[c + static_cast<std::size_t>(o + 2) - 2]);
  }
  return out;
}

double stencil_scalar(const TrajectoryWindow& win, const std::vector<double>& values) {
  const std::size_t c = win.center_index();
  double s = 0.0;
  for (int o = -2; o <= 2; ++o) s += kFirst[o + 2] * values[c + static_cast<std::size_t>(o + 2) - 2];
  return s / win.dt();
}

// int_Omega of a nodal array by the grid quadrature.
double integrate_nodal_volume(const GridPtr& grid, const Nodal& v) {
  return integrate_volume(from_nodal<FieldKind::volume>(grid, v, false));
}

double integrate_nodal_surface(const GridPtr& grid, const Nodal& v) {
  return integrate_surface(from_nodal<FieldKind::surface>(grid, v, false));
}

// Sum of squares of all entries of a tensor in the 6-entry symmetric layout.
Nodal sym_square(const VolumeField& T) {
  Nodal s = Nodal::Zero(to_nodal(T, 0).size());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s += to_nodal(T, sym_index(i, j)).square();
  }
  return s;
}

VolumeField flat_sym_grad(const VolumeField& u) {
  std::vector<VolumeField> parts(6);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      parts[static_cast<std::size_t>(sym_index(i, j))] =
          partial(component(u, j), i) + partial(component(u, i), j);
    }
  }
  return stack(parts);
}

double sym_norm_sq(const VolumeField& T) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s += sobolev_norm_volume_sq(component(T, sym_index(i, j)), 0);
  }
  return s;
}

// Horizontal multi-indices (a1, a2) with a1 + a2 <= 2.
constexpr int kHorizontal[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};

template <FieldKind K>
Field<K> horizontal_derivative(const Field<K>& f, int a1, int a2) {
  Field<K> out = f;
  for (int i = 0; i < a1; ++i) out = d1(out);
  for (int i = 0; i < a2; ++i) out = d2(out);
  return out;
}

// Sum over |alpha| <= 2 of sup |d^alpha u_c|, the nodal C^2_b norm.
double c2_norm(const VolumeField& u) {
  double total = 0.0;
  for (int a1 = 0; a1 <= 2; ++a1) {
    for (int a2 = 0; a1 + a2 <= 2; ++a2) {
      for (int a3 = 0; a1 + a2 + a3 <= 2; ++a3) {
        VolumeField f = horizontal_derivative(u, a1, a2);
        for (int i = 0; i < a3; ++i) f = d3(f);
        total += max_nodal(f);
      }
    }
  }
  return total;
}

double surface_energy_geometric(const SurfaceField& eta, const Params& params) {
  const GridPtr& grid = eta.grid_ptr();
  const Nodal e1 = to_nodal(d1(eta));
  const Nodal e2 = to_nodal(d2(eta));
  const Nodal s = e1.square() + e2.square();
  // sqrt(1 + s) - 1 without cancellation; the constant area term does not affect d/dt.
  const Nodal area = s / (1.0 + (1.0 + s).sqrt());
  const Nodal eta_n = to_nodal(eta);
  return integrate_nodal_surface(grid, params.sigma * area + 0.5 * params.g * eta_n.square());
}

double surface_energy_flat(const SurfaceField& eta, const Params& params) {
  return 0.5 * params.sigma * (sobolev_norm_surface_sq(d1(eta), 0) + sobolev_norm_surface_sq(d2(eta), 0)) +
         0.5 * params.g * sobolev_norm_surface_sq(eta, 0);
}

}  // namespace

void TrajectoryWindow::validate() const {
  if (states.size() < 5) throw ContractError("trajectory window needs at least 5 snapshots");
  const double h = states[1].t - states[0].t;
  if (!(h > 0.0)) throw ContractError("trajectory window times must increase");
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double step = states[i].t - states[i - 1].t;
    if (!(step > 0.0) || std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)) + 1e-12 * std::abs(states[i].t)) {
      throw ContractError("trajectory window spacing must be uniform");
    }
  }
}

double TrajectoryWindow::dt() const { return states[1].t - states[0].t; }

VolumeField time_derivative(const TrajectoryWindow& win, const VolumeField FlowState::*member) {
  win.validate();
  return stencil<FieldKind::volume>(win, kFirst, 1.0 / win.dt(), [member](const FlowState& s) { return s.*member; });
}

SurfaceField time_derivative_eta(const TrajectoryWindow& win) {
  win.validate();
  return stencil<FieldKind::surface>(win, kFirst, 1.0 / win.dt(), [](const FlowState& s) { return s.eta; });
}

SurfaceField second_time_derivative_eta(const TrajectoryWindow& win) {
  win.validate();
  const double h = win.dt();
  return stencil<FieldKind::surface>(win, kSecond, 1.0 / (h * h), [](const FlowState& s) { return s.eta; });
}

EnergyReport evaluate_report(const TrajectoryWindow& win, const Params& params) {
  win.validate();
  const FlowState& s = win.center();
  const double g = params.g;
  const double sigma = params.sigma;
  const VolumeField du = time_derivative(win, &FlowState::u);
  const SurfaceField deta = time_derivative_eta(win);
  const SurfaceField d2eta = second_time_derivative_eta(win);

  EnergyReport r;
  // Parabolic multi-indices |alpha| <= 2: horizontal orders up to 2 and a single d_t.
  for (const auto& a : kHorizontal) {
    const SurfaceField de = horizontal_derivative(s.eta, a[0], a[1]);
    const VolumeField dU = horizontal_derivative(s.u, a[0], a[1]);
    r.Ebar1 += sobolev_norm_volume_sq(dU, 0) + g * sobolev_norm_surface_sq(de, 0) +
               sigma * (sobolev_norm_surface_sq(d1(de), 0) + sobolev_norm_surface_sq(d2(de), 0));
    r.Dbar1 += sym_norm_sq(flat_sym_grad(dU));
  }
  r.Ebar1 += sobolev_norm_volume_sq(du, 0) + g * sobolev_norm_surface_sq(deta, 0) +
             sigma * (sobolev_norm_surface_sq(d1(deta), 0) + sobolev_norm_surface_sq(d2(deta), 0));
  r.Dbar1 += sym_norm_sq(flat_sym_grad(du));

  // The n = 1 instance of the full energy, read literally: the sigma term sits inside the j = 0 sum.
  r.E1 = r.Ebar1 + sobolev_norm_volume_sq(s.u, 2) + sobolev_norm_volume_sq(du, 0) + sobolev_norm_volume_sq(s.p, 1) +
         sigma * sobolev_norm_surface_sq(s.eta, 3) + sobolev_norm_surface_sq(s.eta, 2) +
         sobolev_norm_surface_sq(deta, 1.5);

  const double sigma2 = sigma * sigma;
  r.D1 = r.Dbar1 + sobolev_norm_volume_sq(s.u, 3) + sobolev_norm_volume_sq(du, 1) + sobolev_norm_volume_sq(s.p, 2) +
         sobolev_norm_surface_sq(s.eta, 1.5) + sigma2 * sobolev_norm_surface_sq(s.eta, 3.5) +
         sobolev_norm_surface_sq(deta, 1) + sigma2 * sobolev_norm_surface_sq(deta, 2.5) +
         sobolev_norm_surface_sq(d2eta, 0) + sigma2 * sobolev_norm_surface_sq(d2eta, 0.5);

  r.F1 = sobolev_norm_surface_sq(s.eta, 2.5);

  const double c2 = c2_norm(s.u);
  r.Kcal = c2 * c2 + sobolev_norm_surface_sq(trace_top(s.u), 3) + sobolev_norm_surface_sq(trace_top(s.p), 3) +
           sobolev_norm_surface_sq(s.eta, 2.5);

  // H1 = int -p F21 J + |d_t u|^2 (J - 1) / 2, with d_t eta from the window.
  const GeometryState geom = build_geometry(s.eta, deta, params);
  const Nodal F21 = to_nodal(compute_F21(s, geom));
  Nodal du_sq = Nodal::Zero(F21.size());
  for (int c = 0; c < 3; ++c) du_sq += to_nodal(du, c).square();
  const Nodal integrand = -to_nodal(s.p) * F21 * geom.J_nodal + 0.5 * du_sq * (geom.J_nodal - 1.0);
  r.H1 = integrate_nodal_volume(s.grid_ptr(), integrand);
  return r;
}

double ed_residual_geometric(const TrajectoryWindow& win, const Params& params) {
  win.validate();
  std::vector<double> energy;
  for (const FlowState& s : win.states) {
    const GeometryState geom = build_geometry(s.eta, std::nullopt, params);
    Nodal u_sq = Nodal::Zero(geom.J_nodal.size());
    for (int c = 0; c < 3; ++c) u_sq += to_nodal(s.u, c).square();
    energy.push_back(integrate_nodal_volume(s.grid_ptr(), 0.5 * u_sq * geom.J_nodal) +
                     surface_energy_geometric(s.eta, params));
  }
  const FlowState& s = win.center();
  const GeometryState geom = build_geometry(s.eta, std::nullopt, params);
  const Nodal dissipation = 0.5 * params.mu * sym_square(sym_grad_A(s.u, geom)) * geom.J_nodal;
  const SurfaceField deta = time_derivative_eta(win);
  const double power = params.parametric(s.t) * inner_surface(s.eta, deta);
  return std::abs(stencil_scalar(win, energy) + integrate_nodal_volume(s.grid_ptr(), dissipation) + power);
}

double ed_residual_flattened(const TrajectoryWindow& win, const Params& params) {
  win.validate();
  std::vector<double> energy;
  for (const FlowState& s : win.states) {
    energy.push_back(0.5 * sobolev_norm_volume_sq(s.u, 0) + surface_energy_flat(s.eta, params));
  }
  const FlowState& s = win.center();
  const double dissipation = 0.5 * params.mu * sym_norm_sq(flat_sym_grad(s.u));
  const ForcingBundle G = compute_G(s, geometry_for(s, params), s.t, params);
  const SurfaceField u_top = trace_top(s.u);
  const SurfaceField capillary = (-params.sigma) * laplacian_h(s.eta) + params.g * s.eta;
  const double rhs = inner_volume(s.u, G.G1) + inner_volume(s.p, G.G2) + inner_surface(capillary, G.G3) -
                     inner_surface(G.G4, u_top) - inner_surface(G.G5, component(u_top, 2));
  return std::abs(stencil_scalar(win, energy) + dissipation - rhs);
}

std::string report_csv_header() { return "t,Ebar1,E1,Dbar1,D1,F1,Kcal,H1,ed_residual"; }

std::string report_csv_row(double t, const EnergyReport& r, double ed_residual) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", t, r.Ebar1, r.E1,
                r.Dbar1, r.D1, r.F1, r.Kcal, r.H1, ed_residual);
  return buf;
}

}  // namespace faraday
