#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "faraday/forcing.hpp"
#include "faraday/norms.hpp"

using namespace faraday;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Params base_params() {
  Params p;
  p.b = 1.0;
  p.mu = 0.7;
  p.g = 1.3;
  p.sigma = 0.4;
  return p;
}

// Smooth velocity with u3 = 0 on the top so that u . N = 0 when eta = 0.
VolumeField sample_u(const GridPtr& grid, double scale) {
  auto u1 = sample_volume(grid, [](double x1, double x2, double z) {
    return std::sin(kTwoPi * x1) * std::cos(kTwoPi * x2) * (1 + z);
  });
  auto u2 = sample_volume(grid, [](double x1, double, double z) { return std::cos(kTwoPi * x1) * z * z + 0.3; });
  auto u3 = sample_volume(grid, [](double x1, double x2, double z) {
    return std::cos(kTwoPi * (x1 - x2)) * z * (z + 1);
  });
  return scale * stack<FieldKind::volume>({u1, u2, u3});
}

// Generic velocity with nonzero surface normal flux.
VolumeField sample_u_flux(const GridPtr& grid, double scale) {
  auto u1 = sample_volume(grid, [](double x1, double x2, double z) {
    return std::cos(kTwoPi * x2) * std::exp(z) + 0.2 * std::sin(kTwoPi * x1);
  });
  auto u2 = sample_volume(grid, [](double x1, double, double z) { return std::sin(kTwoPi * x1) * (1 + z * z); });
  auto u3 = sample_volume(grid, [](double x1, double x2, double z) {
    return std::sin(kTwoPi * (x1 + x2)) * (z + 1) + 0.1;
  });
  return scale * stack<FieldKind::volume>({u1, u2, u3});
}

VolumeField sample_p(const GridPtr& grid, double scale) {
  return scale * sample_volume(grid, [](double x1, double x2, double z) {
           return std::cos(kTwoPi * x1) * (1 + z) + std::sin(kTwoPi * x2) * z * z;
         });
}

SurfaceField sample_eta(const GridPtr& grid, double scale) {
  return scale * sample_surface(grid, [](double x1, double x2) {
           return 0.2 * std::sin(kTwoPi * x1) + 0.1 * std::cos(kTwoPi * (x1 + x2));
         });
}

double total_l2(const ForcingBundle& G) {
  return sobolev_norm_volume(G.G1, 0) + sobolev_norm_volume(G.G2, 0) + sobolev_norm_surface(G.G3, 0) +
         sobolev_norm_surface(G.G4, 0);
}

}  // namespace

TEST(Forcing, FlatSurfaceReducesToAdvection) {
  const Params params = base_params();
  auto grid = make_grid(params, 16, 16, 17);
  FlowState s = FlowState::zero(grid);
  s.u = sample_u(grid, 1.0);
  s.p = sample_volume(grid, [](double, double, double) { return 2.5; });
  auto geom = geometry_for(s, params);
  auto G = compute_G(s, geom, 0.0, params);

  // Oracle: -u . grad u from flat spectral derivatives.
  std::vector<Nodal> adv(3);
  std::array<Nodal, 3> un = {to_nodal(s.u, 0), to_nodal(s.u, 1), to_nodal(s.u, 2)};
  for (int i = 0; i < 3; ++i) {
    auto ui = component(s.u, i);
    adv[i] = -(un[0] * to_nodal(d1(ui)) + un[1] * to_nodal(d2(ui)) + un[2] * to_nodal(d3(ui)));
  }
  auto want = from_nodal<FieldKind::volume>(grid, adv, true);
  EXPECT_LT(max_nodal(G.G1 - want), 1e-11);
  EXPECT_LT(max_nodal(G.G2), 1e-12);
  EXPECT_LT(max_nodal(G.G3), 1e-12);
  EXPECT_LT(max_nodal(G.G4), 1e-12);
  EXPECT_LT(max_nodal(G.G5), 1e-12);
}

TEST(Forcing, VerticalUniformFlowHasNoNormalDefect) {
  const Params params = base_params();
  auto grid = make_grid(params, 16, 16, 9);
  FlowState s = FlowState::zero(grid);
  s.u = stack<FieldKind::volume>({VolumeField(grid), VolumeField(grid),
                                  sample_volume(grid, [](double, double, double) { return 1.0; })});
  s.eta = sample_eta(grid, 0.05);
  auto G = compute_G(s, geometry_for(s, params), 0.0, params);
  EXPECT_LT(max_nodal(G.G3), 1e-14);
}

TEST(Forcing, HorizontalFlowOverSineSurface) {
  const Params params = base_params();
  auto grid = make_grid(params, 16, 8, 9);
  const double eps = 0.03;
  FlowState s = FlowState::zero(grid);
  s.u = stack<FieldKind::volume>({sample_volume(grid, [](double, double, double) { return 1.0; }),
                                  VolumeField(grid), VolumeField(grid)});
  s.eta = sample_surface(grid, [&](double x1, double) { return eps * std::sin(kTwoPi * x1); });
  auto G = compute_G(s, geometry_for(s, params), 0.0, params);
  auto want = sample_surface(grid, [&](double x1, double) { return -kTwoPi * eps * std::cos(kTwoPi * x1); });
  EXPECT_LT(max_nodal(G.G3 - want), 1e-13);
}

TEST(Forcing, VanishOnSteadyState) {
  Params params = base_params();
  params.amp = 0.3;
  auto grid = make_grid(params, 8, 8, 9);
  FlowState s = FlowState::zero(grid);
  auto G = compute_G(s, geometry_for(s, params), 0.37, params);
  EXPECT_LT(total_l2(G) + sobolev_norm_surface(G.G5, 0), 1e-10);
}

TEST(Forcing, QuadraticSmallness) {
  Params params = base_params();
  params.amp = 0.2;
  auto grid = make_grid(params, 16, 16, 17);
  const double t = 0.13;
  std::vector<double> log_eps, log_g, log_g5;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    FlowState s = FlowState::zero(grid, t);
    s.u = sample_u_flux(grid, eps);
    s.p = sample_p(grid, eps);
    s.eta = sample_eta(grid, eps);
    auto G = compute_G(s, geometry_for(s, params), t, params);
    log_eps.push_back(std::log(eps));
    log_g.push_back(std::log(total_l2(G)));
    log_g5.push_back(std::log(sobolev_norm_surface(G.G5, 0)));
  }
  auto slope = [&](const std::vector<double>& y) {
    const double mx = (log_eps[0] + log_eps[1] + log_eps[2]) / 3;
    const double my = (y[0] + y[1] + y[2]) / 3;
    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i) {
      num += (log_eps[i] - mx) * (y[i] - my);
      den += (log_eps[i] - mx) * (log_eps[i] - mx);
    }
    return num / den;
  };
  EXPECT_NEAR(slope(log_g), 2.0, 0.1);
  EXPECT_NEAR(slope(log_g5), 1.0, 1e-6);
}

TEST(Forcing, DivergenceRemainderMatchesDifference) {
  const Params params = base_params();
  auto grid = make_grid(params, 16, 16, 17);
  FlowState s = FlowState::zero(grid);
  s.u = sample_u_flux(grid, 1.0);
  s.eta = sample_eta(grid, 0.1);
  auto geom = geometry_for(s, params);
  auto G = compute_G(s, geom, 0.0, params);
  auto flat_div = d1(component(s.u, 0)) + d2(component(s.u, 1)) + d3(component(s.u, 2));
  EXPECT_LT(max_nodal(G.G2 - (flat_div - div_A(s.u, geom))), 1e-9);
}

TEST(Forcing, F21TrivialCases) {
  const Params params = base_params();
  auto grid = make_grid(params, 8, 8, 9);
  FlowState s = FlowState::zero(grid);
  s.u = sample_u(grid, 1.0);
  auto flat = build_geometry(s.eta, SurfaceField(grid), params);
  EXPECT_EQ(max_nodal(compute_F21(s, flat)), 0.0);
  FlowState still = FlowState::zero(grid);
  still.eta = sample_eta(grid, 0.1);
  auto moving = build_geometry(still.eta, sample_eta(grid, 0.4), params);
  EXPECT_EQ(max_nodal(compute_F21(still, moving)), 0.0);
}

TEST(Forcing, F21MatchesCentredDifferenceInTime) {
  const Params params = base_params();
  auto grid = make_grid(params, 16, 16, 17);
  FlowState s = FlowState::zero(grid);
  s.u = sample_u_flux(grid, 1.0);
  const double omega = kTwoPi;
  const double t0 = 0.21;
  // eta(t) = 0.1 cos(omega t) H1(x') + 0.02 sin(omega t) H2(x').
  auto H1 = sample_eta(grid, 1.0);
  auto H2 = sample_surface(grid, [](double x1, double x2) { return std::cos(kTwoPi * (x1 - 2 * x2)); });
  auto eta_at = [&](double t) { return 0.1 * std::cos(omega * t) * H1 + 0.02 * std::sin(omega * t) * H2; };
  auto deta_at = [&](double t) {
    return (-0.1 * omega * std::sin(omega * t)) * H1 + (0.02 * omega * std::cos(omega * t)) * H2;
  };
  s.eta = eta_at(t0);
  auto geom = build_geometry(s.eta, deta_at(t0), params);
  auto F21 = compute_F21(s, geom);
  auto fd_error = [&](double h) {
    auto plus = div_A(s.u, build_geometry(eta_at(t0 + h), std::nullopt, params));
    auto minus = div_A(s.u, build_geometry(eta_at(t0 - h), std::nullopt, params));
    return max_nodal((1.0 / (2 * h)) * (plus - minus) - F21);
  };
  const double e1 = fd_error(1e-2);
  const double e2 = fd_error(5e-3);
  EXPECT_LT(fd_error(1e-3), 1e-4 * max_nodal(F21));
  // Second-order convergence of the centred difference.
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}
