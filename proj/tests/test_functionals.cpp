#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "faraday/errors.hpp"
#include "faraday/functionals.hpp"
#include "faraday/norms.hpp"

using namespace faraday;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

Params base_params() {
  Params p;
  p.mu = 0.6;
  p.g = 1.7;
  p.sigma = 0.3;
  return p;
}

TrajectoryWindow constant_window(const FlowState& s, double dt = 0.01) {
  TrajectoryWindow w;
  for (int i = 0; i < 5; ++i) {
    FlowState c = s;
    c.t = i * dt;
    w.states.push_back(c);
  }
  return w;
}

// Smooth time-dependent fields: every component is a product of trig in x', a polynomial in z and a
// smooth function of t.
FlowState smooth_state(const GridPtr& grid, double t, double eps) {
  FlowState s = FlowState::zero(grid, t);
  auto u1 = sample_volume(grid, [t](double x1, double x2, double z) {
    return std::sin(kTwoPi * x1 + t) * std::cos(kTwoPi * x2) * (1 + z) * z;
  });
  auto u2 = sample_volume(grid, [t](double x1, double, double z) { return std::cos(kTwoPi * x1 - 2 * t) * (z + 1); });
  auto u3 = sample_volume(grid, [t](double x1, double x2, double z) {
    return std::cos(kTwoPi * (x1 - x2)) * (z + 1) * (z + 1) * std::cos(t);
  });
  s.u = eps * stack<FieldKind::volume>({u1, u2, u3});
  s.p = eps * sample_volume(grid, [t](double x1, double, double z) { return std::cos(kTwoPi * x1 + t) * (1 + z * z); });
  s.eta = eps * sample_surface(grid, [t](double x1, double x2) {
            return 0.3 * std::sin(kTwoPi * x1 + t) + 0.2 * std::cos(kTwoPi * (x1 + x2) - t);
          });
  return s;
}

TrajectoryWindow smooth_window(const GridPtr& grid, double eps, double t0 = 0.3, double dt = 1e-2) {
  TrajectoryWindow w;
  for (int i = -2; i <= 2; ++i) w.states.push_back(smooth_state(grid, t0 + i * dt, eps));
  return w;
}

std::array<double, 7> entries(const EnergyReport& r) { return {r.Ebar1, r.E1, r.Dbar1, r.D1, r.F1, r.Kcal, r.H1}; }

}  // namespace

TEST(Window, RejectsShortOrIrregularWindows) {
  Params p;
  auto grid = make_grid(p, 8, 8, 5);
  TrajectoryWindow w = constant_window(FlowState::zero(grid));
  EXPECT_NO_THROW(w.validate());
  w.states.pop_back();
  EXPECT_THROW(w.validate(), ContractError);
  w = constant_window(FlowState::zero(grid));
  w.states[3].t += 1e-3;
  EXPECT_THROW(w.validate(), ContractError);
  w = constant_window(FlowState::zero(grid));
  std::swap(w.states[0], w.states[1]);
  EXPECT_THROW(w.validate(), ContractError);
  EXPECT_THROW(evaluate_report(TrajectoryWindow{}, p), ContractError);
}

TEST(Window, CentredDifferencesAreFourthOrder) {
  Params p;
  auto grid = make_grid(p, 8, 8, 5);
  auto H = sample_surface(grid, [](double x1, double) { return std::cos(kTwoPi * x1); });
  auto make = [&](double h) {
    TrajectoryWindow w;
    for (int i = 0; i < 5; ++i) {
      FlowState s = FlowState::zero(grid, 0.4 + (i - 2) * h);
      s.eta = std::sin(3.0 * s.t) * H;
      w.states.push_back(s);
    }
    return w;
  };
  auto err = [&](double h) {
    auto w = make(h);
    const double tcen = w.center().t;
    const double e1 = max_nodal(time_derivative_eta(w) - (3.0 * std::cos(3.0 * tcen)) * H);
    const double e2 = max_nodal(second_time_derivative_eta(w) - (-9.0 * std::sin(3.0 * tcen)) * H);
    return std::make_pair(e1, e2);
  };
  auto a = err(0.05), b = err(0.025);
  EXPECT_NEAR(std::log2(a.first / b.first), 4.0, 0.2);
  EXPECT_NEAR(std::log2(a.second / b.second), 4.0, 0.2);
}

TEST(Functionals, ZeroTrajectoryGivesZero) {
  const Params p = base_params();
  auto grid = make_grid(p, 8, 8, 9);
  auto w = constant_window(FlowState::zero(grid));
  for (double v : entries(evaluate_report(w, p))) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(ed_residual_geometric(w, p), 0.0);
  EXPECT_EQ(ed_residual_flattened(w, p), 0.0);
}

TEST(Functionals, StaticCosineSurfaceClosedForm) {
  const Params p = base_params();
  auto grid = make_grid(p, 16, 8, 9);
  const double eps = 0.05;
  FlowState s = FlowState::zero(grid);
  s.eta = sample_surface(grid, [&](double x1, double) { return eps * std::cos(kTwoPi * x1); });
  auto r = evaluate_report(constant_window(s), p);
  const double k2 = 4 * kPi * kPi;
  const double series = 1 + k2 + k2 * k2;
  const double ebar = p.g * eps * eps / 2 * series + p.sigma * eps * eps / 2 * k2 * series;
  EXPECT_NEAR(r.Ebar1, ebar, 1e-12 * ebar);
  // The full energy adds sigma ||eta||_3^2 + ||eta||_2^2 with ||eta||_s^2 = (1 + k^2)^s eps^2 / 2.
  const double e1 = ebar + p.sigma * std::pow(1 + k2, 3) * eps * eps / 2 + std::pow(1 + k2, 2) * eps * eps / 2;
  EXPECT_NEAR(r.E1, e1, 1e-12 * e1);
  EXPECT_NEAR(r.F1, std::pow(1 + k2, 2.5) * eps * eps / 2, 1e-12 * r.F1);
  EXPECT_NEAR(r.Kcal, r.F1, 1e-15);
  EXPECT_EQ(r.Dbar1, 0.0);
  EXPECT_EQ(r.H1, 0.0);
}

TEST(Functionals, ShearFlowDissipation) {
  Params p = base_params();
  p.b = 1.5;
  auto grid = make_grid(p, 8, 8, 9);
  FlowState s = FlowState::zero(grid);
  s.u = stack<FieldKind::volume>({sample_volume(grid, [](double, double, double z) { return z; }), VolumeField(grid),
                                  VolumeField(grid)});
  auto r = evaluate_report(constant_window(s), p);
  // Du has entries 13 and 31 equal to 1: |Du|^2 = 2 over a volume of b.
  EXPECT_NEAR(r.Dbar1, 2 * p.b, 1e-12);
  // C^2_b: sup |u1| = b plus sup |d3 u1| = 1.
  EXPECT_NEAR(r.Kcal, (p.b + 1) * (p.b + 1), 1e-11);
}

TEST(Functionals, HVanishesWithoutVelocity) {
  const Params p = base_params();
  auto grid = make_grid(p, 8, 8, 9);
  FlowState s = FlowState::zero(grid);
  s.p = sample_volume(grid, [](double x1, double, double z) { return std::cos(kTwoPi * x1) + z; });
  s.eta = sample_surface(grid, [](double x1, double x2) { return 0.02 * std::sin(kTwoPi * (x1 + x2)); });
  EXPECT_EQ(evaluate_report(constant_window(s), p).H1, 0.0);
}

TEST(Functionals, NonnegativeAndQuadraticScaling) {
  const Params p = base_params();
  auto grid = make_grid(p, 16, 16, 13);
  std::vector<std::array<double, 7>> rows;
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3};
  for (double e : eps) {
    rows.push_back(entries(evaluate_report(smooth_window(grid, e), p)));
    for (int i = 0; i < 6; ++i) EXPECT_GE(rows.back()[i], 0.0);
  }
  for (int i = 0; i < 7; ++i) {
    const double slope = std::log(std::abs(rows[0][i] / rows[2][i])) / std::log(eps[0] / eps[2]);
    if (i < 6) {
      EXPECT_NEAR(slope, 2.0, 0.05) << "entry " << i;
    } else {
      EXPECT_GE(slope, 2.5);
    }
  }
}

TEST(EnergyResidual, NegativeControlIsNotSmall) {
  const Params p = base_params();
  auto grid = make_grid(p, 16, 16, 13);
  // Fields that do not solve the equations: the identity must fail at O(1).
  auto w = smooth_window(grid, 0.2, 0.3, 1e-2);
  EXPECT_GT(ed_residual_geometric(w, p), 1e-2);
  EXPECT_GT(ed_residual_flattened(w, p), 1e-2);
}

TEST(ReportCsv, HeaderAndRowAgree) {
  EnergyReport r{1, 2, 3, 4, 5, 6, -7};
  EXPECT_EQ(report_csv_header(), "t,Ebar1,E1,Dbar1,D1,F1,Kcal,H1,ed_residual");
  EXPECT_EQ(report_csv_row(0.5, r, 0.25), "0.5,1,2,3,4,5,6,-7,0.25");
}
