#include "faraday/geometry.hpp"

#include "faraday/errors.hpp"
#include "faraday/norms.hpp"

namespace faraday {

namespace {

// d3 of a Poisson extension is exact in each mode: multiply by |k|.
VolumeField times_kmod(const VolumeField& f) {
  VolumeField out = f;
  const Grid& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < g.nz(); ++l) {
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        for (int i2 = 0; i2 < g.n2(); ++i2) out.at(c, l, i1, i2) *= g.kmod(i1, i2);
      }
    }
  }
  return out;
}

// Multiplies each level by a per-level scalar (exact in spectral space).
VolumeField times_levels(VolumeField f, const Eigen::VectorXd& per_level) {
  const int nm = f.grid().modes();
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < f.levels(); ++l) {
      f.coeffs(c).segment(static_cast<Eigen::Index>(l) * nm, nm) *= per_level(l);
    }
  }
  return f;
}

VolumeField volume_from(const GridPtr& grid, std::vector<Nodal> comps, bool dealias_product) {
  return from_nodal<FieldKind::volume>(grid, comps, dealias_product);
}

}  // namespace

double GeometryState::min_jacobian() const { return J_nodal.minCoeff(); }

GeometryState build_geometry(const SurfaceField& eta, const std::optional<SurfaceField>& deta_dt,
                             const Params& params, double jacobian_floor) {
  GeometryState geom;
  geom.grid = eta.grid_ptr();
  const Grid& g = *geom.grid;
  const double b = params.b;
  const Eigen::VectorXd btilde = (1.0 + g.z().array() / b).matrix();

  geom.eta = eta;
  geom.eta_hat = poisson_extend(eta, geom.grid);
  geom.a1 = times_levels(d1(geom.eta_hat), btilde);
  geom.a2 = times_levels(d2(geom.eta_hat), btilde);
  geom.J = (1.0 / b) * geom.eta_hat + times_levels(times_kmod(geom.eta_hat), btilde);
  for (int l = 0; l < g.nz(); ++l) geom.J.at(0, l, 0, 0) += 1.0;

  geom.J_nodal = to_nodal(geom.J);
  const double min_j = geom.J_nodal.minCoeff();
  if (!(min_j > jacobian_floor)) throw DegenerateGeometryError(min_j);

  geom.K_nodal = geom.J_nodal.inverse();
  geom.K = volume_from(geom.grid, {geom.K_nodal}, false);
  geom.a1K_nodal = to_nodal(geom.a1) * geom.K_nodal;
  geom.a2K_nodal = to_nodal(geom.a2) * geom.K_nodal;
  geom.btilde_nodal = broadcast_levels(g, btilde);

  SurfaceField normal(geom.grid, 3);
  normal.coeffs(0) = -d1(eta).coeffs(0);
  normal.coeffs(1) = -d2(eta).coeffs(0);
  normal.coeffs(2)(0) = 1.0;
  geom.N = normal;

  if (deta_dt) {
    geom.has_time_derivative = true;
    geom.dt_eta = *deta_dt;
    geom.dt_eta_hat = poisson_extend(*deta_dt, geom.grid);
    const Nodal dt_a1 = to_nodal(times_levels(d1(geom.dt_eta_hat), btilde));
    const Nodal dt_a2 = to_nodal(times_levels(d2(geom.dt_eta_hat), btilde));
    const Nodal dt_J =
        to_nodal((1.0 / b) * geom.dt_eta_hat + times_levels(times_kmod(geom.dt_eta_hat), btilde));
    geom.dt_K_nodal = -geom.K_nodal.square() * dt_J;
    const Nodal a1 = to_nodal(geom.a1);
    const Nodal a2 = to_nodal(geom.a2);
    geom.dt_a1K_nodal = dt_a1 * geom.K_nodal + a1 * geom.dt_K_nodal;
    geom.dt_a2K_nodal = dt_a2 * geom.K_nodal + a2 * geom.dt_K_nodal;
  }
  return geom;
}

std::array<Nodal, 3> nodal_gradient(const VolumeField& f) {
  return {to_nodal(d1(f)), to_nodal(d2(f)), to_nodal(d3(f))};
}

std::array<Nodal, 3> apply_A(const GeometryState& geom, const std::array<Nodal, 3>& grad,
                             bool minus_identity) {
  if (minus_identity) {
    return {-geom.a1K_nodal * grad[2], -geom.a2K_nodal * grad[2], (geom.K_nodal - 1.0) * grad[2]};
  }
  return {grad[0] - geom.a1K_nodal * grad[2], grad[1] - geom.a2K_nodal * grad[2],
          geom.K_nodal * grad[2]};
}

int sym_index(int i, int j) {
  if (i == j) return i;
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  if (lo == 0) return hi == 1 ? 3 : 4;
  return 5;
}

VolumeField grad_A(const VolumeField& f, const GeometryState& geom) {
  auto out = apply_A(geom, nodal_gradient(f));
  return volume_from(geom.grid, {out[0], out[1], out[2]}, true);
}

VolumeField div_A(const VolumeField& X, const GeometryState& geom) {
  if (X.components() != 3) throw ContractError("div_A expects a 3-vector field");
  Nodal sum = Nodal::Zero(X.size());
  for (int i = 0; i < 3; ++i) sum += apply_A(geom, nodal_gradient(component(X, i)))[static_cast<std::size_t>(i)];
  return volume_from(geom.grid, {sum}, true);
}

namespace {

std::vector<Nodal> sym_grad_nodal(const VolumeField& u, const GeometryState& geom) {
  if (u.components() != 3) throw ContractError("sym_grad_A expects a 3-vector field");
  // M[j][i] = calA_ik d_k u_j
  std::array<std::array<Nodal, 3>, 3> M;
  for (int j = 0; j < 3; ++j) M[j] = apply_A(geom, nodal_gradient(component(u, j)));
  std::vector<Nodal> out(6);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) out[static_cast<std::size_t>(sym_index(i, j))] = M[j][i] + M[i][j];
  }
  return out;
}

}  // namespace

VolumeField sym_grad_A(const VolumeField& u, const GeometryState& geom) {
  return volume_from(geom.grid, sym_grad_nodal(u, geom), true);
}

VolumeField stress_A(const VolumeField& u, const VolumeField& p, const GeometryState& geom,
                     double mu) {
  std::vector<Nodal> D = sym_grad_nodal(u, geom);
  const Nodal pn = to_nodal(p);
  for (int c = 0; c < 6; ++c) {
    D[static_cast<std::size_t>(c)] *= -mu;
    if (c < 3) D[static_cast<std::size_t>(c)] += pn;
  }
  return volume_from(geom.grid, D, true);
}

double check_piola(const GeometryState& geom) {
  const Nodal& J = geom.J_nodal;
  // Rows of J calA: (J, 0, -J a1 K), (0, J, -J a2 K), (0, 0, J K). The constant 1 is removed from
  // J K before differentiating so the flat case is exactly zero.
  VolumeField rows = volume_from(
      geom.grid, {J, -J * geom.a1K_nodal, -J * geom.a2K_nodal, J * geom.K_nodal - 1.0}, false);
  VolumeField r1 = d1(component(rows, 0)) + d3(component(rows, 1));
  VolumeField r2 = d2(component(rows, 0)) + d3(component(rows, 2));
  VolumeField r3 = d3(component(rows, 3));
  return std::max({max_nodal(r1), max_nodal(r2), max_nodal(r3)});
}

CurvatureSplit mean_curvature(const SurfaceField& eta) {
  const GridPtr& grid = eta.grid_ptr();
  const Nodal e1 = to_nodal(d1(eta));
  const Nodal e2 = to_nodal(d2(eta));
  const Nodal s = e1.square() + e2.square();
  const Nodal root = (1.0 + s).sqrt();
  // 1/sqrt(1+s) - 1 = -s / (sqrt(1+s) (1 + sqrt(1+s)))
  const Nodal factor = -s / (root * (1.0 + root));
  SurfaceField flux = from_nodal<FieldKind::surface>(grid, std::vector<Nodal>{e1 * factor, e2 * factor}, true);
  CurvatureSplit out;
  out.laplacian = laplacian_h(eta);
  out.nonlinear = d1(component(flux, 0)) + d2(component(flux, 1));
  out.H = out.laplacian + out.nonlinear;
  return out;
}

}  // namespace faraday
