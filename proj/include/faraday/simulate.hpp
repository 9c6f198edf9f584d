#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "faraday/elliptic.hpp"
#include "faraday/forcing.hpp"
#include "faraday/functionals.hpp"

namespace faraday {

/// SBDF1: backward Euler on the linear part, forward Euler on G.
/// SBDF2: second-order backward difference with G extrapolated as 2 G^n - G^(n-1); the first step
/// falls back to SBDF1.
enum class TimeScheme { sbdf1, sbdf2 };

/// One Fourier mode of initial data: (cos_amp cos(theta) + sin_amp sin(theta)) times a vertical
/// shape for velocity components, theta = 2 pi (m1 x1 / L1 + m2 x2 / L2).
struct InitialMode {
  enum class Target { u1, u2, u3, eta };
  Target target = Target::eta;
  int m1 = 1;
  int m2 = 0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

struct RunConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  int output_stride = 10;
  int n1 = 16;
  int n2 = 16;
  int nz = 17;
  std::vector<InitialMode> initial;
  TimeScheme scheme = TimeScheme::sbdf2;
  bool diagnostics = true;
  bool project_mean = true;
  bool write_snapshots = true;
  double jacobian_floor = kDefaultJacobianFloor;
  int threads = 0;

  /// Throws ConfigError on non-positive dt, t_end < dt, stride < 1 or bad resolution.
  void validate() const;
};

/// Sets the (0, 0) coefficient to exactly zero.
SurfaceField project_mean(SurfaceField eta);

/// Initial state from mode descriptors. The raw velocity is projected by one Stokes-Dirichlet
/// solve (with a short fixed-point loop for the flattened divergence) onto fields with u = 0 on
/// the bottom and div_A u = 0; p starts at zero. The remaining max |div_A u| over interior nodes is
/// returned through divergence_residual when requested.
FlowState initial_state(const GridPtr& grid, const Params& params, const std::vector<InitialMode>& modes,
                        double jacobian_floor = kDefaultJacobianFloor, double* divergence_residual = nullptr);

/// Additive forcing on the implicit system, evaluated at the new time level.
using ExtraForcing = std::function<ImplicitRhs(double t)>;

class Simulator {
 public:
  Simulator(const Params& params, FlowState initial, double dt, TimeScheme scheme = TimeScheme::sbdf2,
            int threads = 0, double jacobian_floor = kDefaultJacobianFloor);

  /// Advances one step. Throws DegenerateGeometryError, ConditioningError, or NumericalError when
  /// the CFL guard dt <= 0.5 min(dx) / max|u| fails.
  void step();

  const FlowState& state() const { return state_; }
  const Params& params() const { return params_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }

  /// |mean eta| of the new surface before projection, for the last step and the run so far.
  double last_mean_drift() const { return last_drift_; }
  double max_mean_drift() const { return max_drift_; }

  void set_projection(bool on) { project_ = on; }
  void set_extra_forcing(ExtraForcing f) { extra_ = std::move(f); }

 private:
  ImplicitRhs build_rhs(const ForcingBundle& G, double a1, double a2) const;

  Params params_;
  GridPtr grid_;
  double dt_;
  TimeScheme scheme_;
  int threads_;
  double floor_;
  FlowState state_;
  std::optional<FlowState> previous_;
  std::optional<ForcingBundle> previous_G_;
  std::unique_ptr<StokesSolver> sbdf1_;
  std::unique_ptr<StokesSolver> sbdf2_;
  long steps_ = 0;
  bool project_ = true;
  double last_drift_ = 0.0;
  double max_drift_ = 0.0;
  ExtraForcing extra_;
};

/// One SBDF1 step of the flattened system from state.
FlowState step(const FlowState& state, const Params& params, double dt);

struct DiagnosticRow {
  double t = 0.0;
  EnergyReport report;
  double ed_residual = 0.0;
};

struct RunResult {
  std::vector<FlowState> snapshots;
  std::vector<DiagnosticRow> diagnostics;
  double max_mean_drift = 0.0;
  double initial_divergence_residual = 0.0;
};

/// Advances to t_end. Snapshots are kept every output_stride steps; diagnostics use a five-step
/// window centred on each output step. With a non-empty output directory, snapshots go to
/// snapshots/NNNNNN_{u,p,eta}.bin and diagnostics to diagnostics.csv. On geometry degeneracy the
/// last good state is written to failure_state_* before the error propagates.
RunResult run(const RunConfig& config, const Params& params, const std::string& output_dir = "");

struct DecayFit {
  double rate = 0.0;  // lambda for exponential fits, exponent for algebraic fits
  double coefficient = 0.0;
  double r2 = 0.0;
};

/// Least squares of log E on t: E ~ C exp(-lambda t). Needs >= 10 positive samples.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E);
/// Least squares of log E on log(1 + t): E ~ C (1 + t)^exponent.
DecayFit fit_algebraic(const std::vector<double>& t, const std::vector<double>& E);

/// Max-nodal residuals of the transformed Eulerian system at the window centre: momentum and
/// divergence over interior nodes, kinematic and dynamic boundary conditions on the surface.
struct LabResidual {
  double momentum = 0.0;
  double divergence = 0.0;
  double kinematic = 0.0;
  double dynamic = 0.0;
  double max() const;
};
LabResidual lab_frame_residual(const TrajectoryWindow& win, const Params& params);

}  // namespace faraday
