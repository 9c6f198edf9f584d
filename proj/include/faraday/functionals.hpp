#pragma once

#include <string>
#include <vector>

#include "faraday/params.hpp"
#include "faraday/state.hpp"

namespace faraday {

/// Energy and dissipation functionals at n = 1, evaluated at the window centre.
struct EnergyReport {
  double Ebar1 = 0.0;
  double E1 = 0.0;
  double Dbar1 = 0.0;
  double D1 = 0.0;
  double F1 = 0.0;
  double Kcal = 0.0;
  double H1 = 0.0;
};

/// Snapshots at uniform spacing; time derivatives come from centred differences.
struct TrajectoryWindow {
  std::vector<FlowState> states;

  /// Throws ContractError unless there are at least 5 states at uniform, increasing times.
  void validate() const;
  double dt() const;
  std::size_t center_index() const { return (states.size() - 1) / 2; }
  const FlowState& center() const { return states[center_index()]; }
};

/// Fourth-order centred first and second time differences at the window centre.
VolumeField time_derivative(const TrajectoryWindow& win, const VolumeField FlowState::*member);
SurfaceField time_derivative_eta(const TrajectoryWindow& win);
SurfaceField second_time_derivative_eta(const TrajectoryWindow& win);

EnergyReport evaluate_report(const TrajectoryWindow& win, const Params& params);

/// Residual of the geometric energy identity of the nonlinear problem in the vibrating frame:
/// d/dt(int |u|^2 J/2 + int sigma sqrt(1 + |grad eta|^2) + g eta^2/2) + int mu |D_A u|^2 J/2
/// + A omega^2 f''(omega t) int eta d_t eta.
double ed_residual_geometric(const TrajectoryWindow& win, const Params& params);

/// Residual of the flattened energy identity with the G terms on the right-hand side.
double ed_residual_flattened(const TrajectoryWindow& win, const Params& params);

/// Column order of diagnostics.csv.
std::string report_csv_header();
std::string report_csv_row(double t, const EnergyReport& r, double ed_residual);

}  // namespace faraday
