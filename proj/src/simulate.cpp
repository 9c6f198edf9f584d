#include "faraday/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "faraday/errors.hpp"
#include "faraday/field_io.hpp"
#include "faraday/geometry.hpp"
#include "faraday/norms.hpp"

namespace faraday {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SchemeCoefficients {
  double a0, a1, a2;
};

constexpr SchemeCoefficients kSbdf1{1.0, -1.0, 0.0};
constexpr SchemeCoefficients kSbdf2{1.5, -2.0, 0.5};

ModeOperatorConfig implicit_config(const Params& params, double alpha) {
  ModeOperatorConfig cfg;
  cfg.alpha = alpha;
  cfg.alpha_s = alpha;
  cfg.mu = params.mu;
  cfg.s = 1.0;
  cfg.top = TopCondition::stress;
  cfg.surface = true;
  cfg.g = params.g;
  cfg.sigma = params.sigma;
  return cfg;
}

ForcingBundle combine(const ForcingBundle& a, double ca, const ForcingBundle& b, double cb) {
  ForcingBundle out;
  out.G1 = ca * a.G1 + cb * b.G1;
  out.G2 = ca * a.G2 + cb * b.G2;
  out.G3 = ca * a.G3 + cb * b.G3;
  out.G4 = ca * a.G4 + cb * b.G4;
  out.G5 = ca * a.G5 + cb * b.G5;
  return out;
}

double max_speed(const VolumeField& u) {
  Nodal s = Nodal::Zero(to_nodal(u, 0).size());
  for (int c = 0; c < 3; ++c) s += to_nodal(u, c).square();
  return std::sqrt(s.maxCoeff());
}

// Max |value| over interior vertical levels, where the collocation enforces the volume equations.
double interior_max(const Grid& grid, const Nodal& v) {
  const Eigen::Index plane = static_cast<Eigen::Index>(grid.n1()) * grid.n2();
  return v.segment(plane, plane * (grid.nz() - 2)).abs().maxCoeff();
}

double interior_max(const VolumeField& f) {
  double m = 0.0;
  for (int c = 0; c < f.components(); ++c) m = std::max(m, interior_max(f.grid(), to_nodal(f, c)));
  return m;
}

VolumeField flat_laplacian(const VolumeField& f) { return laplacian_h(f) + d3(d3(f)); }

VolumeField flat_divergence(const VolumeField& u) {
  return d1(component(u, 0)) + d2(component(u, 1)) + d3(component(u, 2));
}

void write_state(const FlowState& s, const std::string& prefix) {
  write_binary(s.u, prefix + "_u.bin");
  write_binary(s.p, prefix + "_p.bin");
  write_binary(s.eta, prefix + "_eta.bin");
}

DecayFit least_squares(const std::vector<double>& x, const std::vector<double>& E) {
  if (x.size() != E.size()) throw ContractError("fit needs matching sample vectors");
  if (x.size() < 10) throw ContractError("fit needs at least 10 samples");
  std::vector<double> y;
  for (double e : E) {
    if (!(e > 0.0)) throw ContractError("fit needs positive samples");
    y.push_back(std::log(e));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ContractError("fit needs distinct abscissae");
  DecayFit fit;
  const double slope = sxy / sxx;
  fit.rate = slope;
  fit.coefficient = std::exp(my - slope * mx);
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

void RunConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("run.dt must be positive");
  if (!(t_end >= dt)) throw ConfigError("run.t_end must be at least run.dt");
  if (output_stride < 1) throw ConfigError("run.output_stride must be at least 1");
  if (n1 < 2 || n2 < 2 || nz < 5) throw ConfigError("grid needs n1, n2 >= 2 and nz >= 5");
  if (!(jacobian_floor > 0.0 && jacobian_floor < 1.0)) throw ConfigError("run.jacobian_floor must lie in (0, 1)");
}

SurfaceField project_mean(SurfaceField eta) {
  for (int c = 0; c < eta.components(); ++c) eta.coeffs(c)(0) = 0.0;
  return eta;
}

FlowState initial_state(const GridPtr& grid, const Params& params, const std::vector<InitialMode>& modes,
                        double jacobian_floor, double* divergence_residual) {
  const double b = grid->b();
  const double L1 = grid->L1();
  const double L2 = grid->L2();
  FlowState s = FlowState::zero(grid);
  std::array<VolumeField, 3> raw = {VolumeField(grid), VolumeField(grid), VolumeField(grid)};
  for (const InitialMode& m : modes) {
    auto angle = [&](double x1, double x2) { return kTwoPi * (m.m1 * x1 / L1 + m.m2 * x2 / L2); };
    auto horizontal = [&](double x1, double x2) {
      return m.cos_amp * std::cos(angle(x1, x2)) + m.sin_amp * std::sin(angle(x1, x2));
    };
    if (m.target == InitialMode::Target::eta) {
      s.eta += sample_surface(grid, horizontal);
    } else {
      const int c = static_cast<int>(m.target);
      // Quadratic vertical shape vanishing with zero slope at the bottom.
      raw[static_cast<std::size_t>(c)] += sample_volume(grid, [&](double x1, double x2, double z) {
        const double r = (z + b) / b;
        return horizontal(x1, x2) * r * r;
      });
    }
  }
  s.eta = project_mean(s.eta);
  const GeometryState geom = build_geometry(s.eta, std::nullopt, params, jacobian_floor);

  const VolumeField u0 = stack<FieldKind::volume>({raw[0], raw[1], raw[2]});
  if (max_coeff(u0) == 0.0) {
    if (divergence_residual) *divergence_residual = 0.0;
    return s;
  }
  StokesData data;
  data.f1 = -1.0 * flat_laplacian(u0);
  data.f3 = trace_top(u0);
  data.f2 = VolumeField(grid);
  VolumeField w = u0;
  double residual = 0.0;
  for (int iter = 0; iter < 30; ++iter) {
    data.f3.coeffs(2)(0) = integrate_volume(data.f2) / grid->area();
    w = solve_stokes_dirichlet(data, 1.0).u;
    // Fixed point div w = div w - div_A w, so that div_A w -> 0.
    const VolumeField div_a = div_A(w, geom);
    residual = interior_max(div_a);
    if (residual <= 1e-13 * std::max(1.0, max_nodal(w))) break;
    data.f2 = flat_divergence(w) - div_a;
  }
  s.u = w;
  if (divergence_residual) *divergence_residual = residual;
  return s;
}

Simulator::Simulator(const Params& params, FlowState initial, double dt, TimeScheme scheme, int threads,
                     double jacobian_floor)
    : params_(params),
      grid_(initial.grid_ptr()),
      dt_(dt),
      scheme_(scheme),
      threads_(threads),
      floor_(jacobian_floor),
      state_(std::move(initial)) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  params_.validate();
  sbdf1_ = std::make_unique<StokesSolver>(grid_, implicit_config(params_, kSbdf1.a0 / dt_), threads_);
  if (scheme_ == TimeScheme::sbdf2) {
    sbdf2_ = std::make_unique<StokesSolver>(grid_, implicit_config(params_, kSbdf2.a0 / dt_), threads_);
  }
}

ImplicitRhs Simulator::build_rhs(const ForcingBundle& G, double a1, double a2) const {
  ImplicitRhs rhs;
  rhs.momentum = (-a1 / dt_) * state_.u + G.G1;
  rhs.kinematic = (-a1 / dt_) * state_.eta + G.G3;
  if (a2 != 0.0) {
    rhs.momentum += (-a2 / dt_) * previous_->u;
    rhs.kinematic += (-a2 / dt_) * previous_->eta;
  }
  rhs.continuity = G.G2;
  rhs.top = G.G4;
  rhs.top.coeffs(2) += G.G5.coeffs(0);
  return rhs;
}

void Simulator::step() {
  const double speed = max_speed(state_.u);
  if (speed > 0.0 && dt_ > 0.5 * grid_->min_spacing() / speed) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "CFL guard: dt = %.3g exceeds 0.5 min(dx) / max|u| = %.3g", dt_,
                  0.5 * grid_->min_spacing() / speed);
    throw NumericalError(msg);
  }
  const GeometryState geom = geometry_for(state_, params_, floor_);
  ForcingBundle G = compute_G(state_, geom, state_.t, params_);

  const bool second_order = scheme_ == TimeScheme::sbdf2 && previous_.has_value();
  const SchemeCoefficients& co = second_order ? kSbdf2 : kSbdf1;
  const ForcingBundle Gstar = second_order ? combine(G, 2.0, *previous_G_, -1.0) : G;
  ImplicitRhs rhs = build_rhs(Gstar, co.a1, co.a2);
  const double t_new = state_.t + dt_;
  if (extra_) {
    const ImplicitRhs f = extra_(t_new);
    rhs.momentum += f.momentum;
    rhs.continuity += f.continuity;
    rhs.top += f.top;
    rhs.kinematic += f.kinematic;
  }
  const StokesSolver& solver = second_order ? *sbdf2_ : *sbdf1_;
  ImplicitSolution sol = solver.solve(rhs);

  last_drift_ = std::abs(sol.zeta.coeffs(0)(0));
  max_drift_ = std::max(max_drift_, last_drift_);
  if (project_) sol.zeta = project_mean(std::move(sol.zeta));

  if (scheme_ == TimeScheme::sbdf2) {
    previous_ = state_;
    previous_G_ = std::move(G);
  }
  state_ = FlowState{std::move(sol.u), std::move(sol.p), std::move(sol.zeta), t_new};
  ++steps_;
}

FlowState step(const FlowState& state, const Params& params, double dt) {
  Simulator sim(params, state, dt, TimeScheme::sbdf1);
  sim.step();
  return sim.state();
}

RunResult run(const RunConfig& config, const Params& params, const std::string& output_dir) {
  config.validate();
  params.validate();
  const GridPtr grid = make_grid(params, config.n1, config.n2, config.nz);
  RunResult result;
  FlowState init = initial_state(grid, params, config.initial, config.jacobian_floor,
                                 &result.initial_divergence_residual);
  Simulator sim(params, std::move(init), config.dt, config.scheme, config.threads, config.jacobian_floor);
  sim.set_projection(config.project_mean);

  const bool write = !output_dir.empty();
  std::ofstream csv;
  if (write) {
    std::filesystem::create_directories(output_dir);
    if (config.write_snapshots) std::filesystem::create_directories(output_dir + "/snapshots");
    csv.open(output_dir + "/diagnostics.csv");
    if (!csv) throw ConfigError("cannot write " + output_dir + "/diagnostics.csv");
    csv << report_csv_header() << '\n';
  }
  auto snapshot = [&](const FlowState& s, long index) {
    result.snapshots.push_back(s);
    if (write && config.write_snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "/snapshots/%06ld", index);
      write_state(s, output_dir + name);
    }
  };

  const long total = std::lround(config.t_end / config.dt);
  std::deque<FlowState> recent;
  recent.push_back(sim.state());
  snapshot(sim.state(), 0);
  try {
    for (long n = 1; n <= total; ++n) {
      sim.step();
      const FlowState& s = sim.state();
      if (n % config.output_stride == 0) snapshot(s, n);
      recent.push_back(s);
      if (recent.size() > 5) recent.pop_front();
      const long centre = n - 2;
      if (config.diagnostics && recent.size() == 5 && centre % config.output_stride == 0) {
        TrajectoryWindow win{std::vector<FlowState>(recent.begin(), recent.end())};
        DiagnosticRow row{win.center().t, evaluate_report(win, params), ed_residual_geometric(win, params)};
        result.diagnostics.push_back(row);
        if (write) csv << report_csv_row(row.t, row.report, row.ed_residual) << '\n' << std::flush;
      }
    }
  } catch (const NumericalError&) {
    if (write) write_state(sim.state(), output_dir + "/failure_state");
    throw;
  }
  result.max_mean_drift = sim.max_mean_drift();
  return result;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E) {
  DecayFit fit = least_squares(t, E);
  fit.rate = -fit.rate;
  return fit;
}

DecayFit fit_algebraic(const std::vector<double>& t, const std::vector<double>& E) {
  std::vector<double> x;
  for (double v : t) {
    if (!(v > -1.0)) throw ContractError("algebraic fit needs t > -1");
    x.push_back(std::log1p(v));
  }
  return least_squares(x, E);
}

double LabResidual::max() const { return std::max({momentum, divergence, kinematic, dynamic}); }

LabResidual lab_frame_residual(const TrajectoryWindow& win, const Params& params) {
  win.validate();
  const FlowState& s = win.center();
  const GridPtr& grid = s.grid_ptr();
  const SurfaceField deta = time_derivative_eta(win);
  const VolumeField du = time_derivative(win, &FlowState::u);
  const GeometryState geom = build_geometry(s.eta, deta, params);

  LabResidual r;
  // d_t u - d_t eta_hat b K d_3 u + u . grad_A u + div_A S_A(u, p)
  const VolumeField S = stress_A(s.u, s.p, geom, params.mu);
  const Nodal dt_eta_hat = to_nodal(geom.dt_eta_hat);
  std::vector<Nodal> mom(3);
  for (int i = 0; i < 3; ++i) {
    const auto grad = apply_A(geom, nodal_gradient(component(s.u, i)));
    Nodal acc = to_nodal(du, i) - dt_eta_hat * geom.btilde_nodal * geom.K_nodal * to_nodal(d3(component(s.u, i)));
    for (int j = 0; j < 3; ++j) {
      acc += to_nodal(s.u, j) * grad[static_cast<std::size_t>(j)];
      acc += apply_A(geom, nodal_gradient(component(S, sym_index(i, j))))[static_cast<std::size_t>(j)];
    }
    mom[static_cast<std::size_t>(i)] = acc;
  }
  r.momentum = interior_max(from_nodal<FieldKind::volume>(grid, mom, true));
  r.divergence = interior_max(div_A(s.u, geom));
  r.kinematic = max_nodal(deta - kinematic_velocity(s.u, s.eta));

  // S_A N - (-sigma H + (g + A w^2 f'') eta) N on the top.
  const SurfaceField S_top = trace_top(S);
  const Nodal e1 = to_nodal(d1(s.eta));
  const Nodal e2 = to_nodal(d2(s.eta));
  const std::array<Nodal, 3> N = {-e1, -e2, Nodal::Ones(e1.size())};
  const Nodal load = -params.sigma * to_nodal(mean_curvature(s.eta).H) +
                     (params.g + params.parametric(s.t)) * to_nodal(s.eta);
  std::vector<Nodal> dyn(3);
  for (int i = 0; i < 3; ++i) {
    Nodal acc = -load * N[static_cast<std::size_t>(i)];
    for (int j = 0; j < 3; ++j) acc += to_nodal(S_top, sym_index(i, j)) * N[static_cast<std::size_t>(j)];
    dyn[static_cast<std::size_t>(i)] = acc;
  }
  r.dynamic = max_nodal(from_nodal<FieldKind::surface>(grid, dyn, true));
  return r;
}

}  // namespace faraday
