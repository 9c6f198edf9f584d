#include "faraday/elliptic.hpp"

#include <cmath>

#include "faraday/errors.hpp"
#include "faraday/norms.hpp"
#include "faraday/parallel.hpp"

namespace faraday {

namespace {

constexpr double kMinRcond = 1e-14;

bool canonical(const Grid& g, int i1, int i2) {
  return g.keep(i1, i2) && g.mode_index(i1, i2) <= g.conjugate_index(i1, i2);
}

}  // namespace

SurfaceField solve_capillary(const SurfaceField& f, double sigma, double g) {
  if (sigma < 0.0 || g < 0.0) throw ConfigError("capillary operator needs sigma >= 0 and g >= 0");
  if (sigma == 0.0 && g == 0.0) {
    throw SolvabilityError("capillary operator is singular for sigma = g = 0");
  }
  const Grid& grid = f.grid();
  SurfaceField psi(f.grid_ptr(), f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (int i1 = 0; i1 < grid.n1(); ++i1) {
      for (int i2 = 0; i2 < grid.n2(); ++i2) {
        const double k = grid.kmod(i1, i2);
        const double symbol = g + sigma * k * k;
        const cd value = f.at(c, 0, i1, i2);
        if (symbol == 0.0) {
          if (std::abs(value) > 1e-12 * std::max(1.0, max_coeff(f))) {
            throw SolvabilityError("capillary problem with g = 0 needs mean-zero data");
          }
          psi.at(c, 0, i1, i2) = 0.0;
        } else {
          psi.at(c, 0, i1, i2) = value / symbol;
        }
      }
    }
  }
  return psi;
}

ModeOperator::ModeOperator(const Grid& grid, double k1, double k2, const ModeOperatorConfig& cfg,
                           int m1, int m2)
    : nz_(grid.nz()) {
  const int nz = nz_;
  const int top = nz - 1;
  const int n = 4 * nz - 2 + (cfg.surface ? 1 : 0);
  const double kappa2 = k1 * k1 + k2 * k2;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(nz, nz);
  const Eigen::MatrixXcd D = grid.diff().cast<cd>();
  const Eigen::MatrixXcd D2 = grid.diff2().cast<cd>();
  const Eigen::MatrixXcd E = grid.interior_extension().cast<cd>();
  const std::array<Eigen::MatrixXcd, 3> partial = {cd(0.0, k1) * I, cd(0.0, k2) * I, D};

  matrix_ = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd diag_block = cfg.alpha * I - cfg.mu * (D2 - kappa2 * I);
  for (int c = 0; c < 3; ++c) {
    const int row0 = momentum_row(c, 1);
    matrix_.block(row0, v_offset(c), nz - 2, nz) += diag_block.middleRows(1, nz - 2);
    if (cfg.s != 0.0) {
      for (int j = 0; j < 3; ++j) {
        const Eigen::MatrixXcd grad_div = partial[static_cast<std::size_t>(c)] * partial[static_cast<std::size_t>(j)];
        matrix_.block(row0, v_offset(j), nz - 2, nz) -= cfg.mu * cfg.s * grad_div.middleRows(1, nz - 2);
      }
    }
    const Eigen::MatrixXcd grad_q = partial[static_cast<std::size_t>(c)] * E;
    matrix_.block(row0, q_offset(), nz - 2, nz - 2) = grad_q.middleRows(1, nz - 2);
  }
  for (int j = 0; j < 3; ++j) {
    matrix_.block(continuity_row(1), v_offset(j), nz - 2, nz) =
        partial[static_cast<std::size_t>(j)].middleRows(1, nz - 2);
  }
  for (int c = 0; c < 3; ++c) matrix_(bottom_row(c), v_offset(c)) = 1.0;
  if (cfg.top == TopCondition::dirichlet) {
    for (int c = 0; c < 3; ++c) matrix_(top_row(c), v_offset(c) + top) = 1.0;
  } else {
    for (int c = 0; c < 2; ++c) {
      matrix_.block(top_row(c), v_offset(c), 1, nz) = -cfg.mu * D.row(top);
      matrix_(top_row(c), v_offset(2) + top) += -cfg.mu * cd(0.0, c == 0 ? k1 : k2);
    }
    matrix_.block(top_row(2), q_offset(), 1, nz - 2) = E.row(top);
    matrix_.block(top_row(2), v_offset(2), 1, nz) += -2.0 * cfg.mu * D.row(top);
    if (cfg.surface) matrix_(top_row(2), zeta_offset()) = -(cfg.g + cfg.sigma * kappa2);
  }
  if (cfg.surface) {
    matrix_(kinematic_row(), zeta_offset()) = cfg.alpha_s;
    matrix_(kinematic_row(), v_offset(2) + top) = -1.0;
  }
  lu_.compute(matrix_);
  const double rcond = lu_.rcond();
  if (!(rcond > kMinRcond)) throw ConditioningError(m1, m2, rcond);
}

StokesSolver::StokesSolver(GridPtr grid, const ModeOperatorConfig& config, int threads)
    : grid_(std::move(grid)), config_(config), threads_(threads) {
  const Grid& g = *grid_;
  ops_.resize(static_cast<std::size_t>(g.modes()));
  const bool dirichlet = config_.top == TopCondition::dirichlet;
  parallel_for(
      g.modes(),
      [&](int idx) {
        const int i1 = idx / g.n2();
        const int i2 = idx % g.n2();
        if (!canonical(g, i1, i2)) return;
        // The Dirichlet mean mode has a pressure null space; it is solved separately.
        if (dirichlet && i1 == 0 && i2 == 0) return;
        ops_[static_cast<std::size_t>(idx)] = std::make_unique<ModeOperator>(
            g, g.k1(i1), g.k2(i2), config_, g.m1(i1), g.m2(i2));
      },
      threads_);
}

const ModeOperator* StokesSolver::mode(int i1, int i2) const {
  return ops_[static_cast<std::size_t>(grid_->mode_index(i1, i2))].get();
}

namespace {

// Mean mode of the Dirichlet problem: two scalar two-point problems for v1, v2, an integration for
// v3 and a quadrature for p.
void solve_dirichlet_mean(const Grid& g, const ModeOperatorConfig& cfg, const ImplicitRhs& rhs,
                          ImplicitSolution& out) {
  const int nz = g.nz();
  const int top = nz - 1;
  auto column = [&](const VolumeField& f, int c) {
    Eigen::VectorXd v(nz);
    for (int l = 0; l < nz; ++l) v(l) = f.at(c, l, 0, 0).real();
    return v;
  };
  Eigen::MatrixXd A = cfg.alpha * Eigen::MatrixXd::Identity(nz, nz) - cfg.mu * g.diff2();
  A.row(0).setZero();
  A(0, 0) = 1.0;
  A.row(top).setZero();
  A(top, top) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd r = column(rhs.momentum, c);
    r(0) = 0.0;
    r(top) = rhs.top.at(c, 0, 0, 0).real();
    const Eigen::VectorXd v = lu.solve(r);
    for (int l = 0; l < nz; ++l) out.u.at(c, l, 0, 0) = v(l);
  }
  const Eigen::VectorXd f2 = column(rhs.continuity, 0);
  const Eigen::VectorXd v3 = g.integrate_from_bottom() * f2;
  const double target = rhs.top.at(2, 0, 0, 0).real();
  const double scale = std::max({1.0, std::abs(target), f2.cwiseAbs().maxCoeff() * g.b()});
  if (std::abs(v3(top) - target) > 1e-8 * scale) {
    throw SolvabilityError("Dirichlet Stokes data violate flux compatibility: int f2 = " +
                           std::to_string(v3(top) * g.area()) + ", int f3.e3 = " +
                           std::to_string(target * g.area()));
  }
  const Eigen::VectorXd r3 = column(rhs.momentum, 2) - cfg.alpha * v3;
  Eigen::VectorXd p = g.integrate_from_bottom() * r3 + cfg.mu * (1.0 + cfg.s) * f2;
  p.array() -= g.weights().dot(p) / g.b();
  for (int l = 0; l < nz; ++l) {
    out.u.at(2, l, 0, 0) = v3(l);
    out.p.at(0, l, 0, 0) = p(l);
  }
}

}  // namespace

ImplicitSolution StokesSolver::solve(const ImplicitRhs& rhs) const {
  const Grid& g = *grid_;
  const int nz = g.nz();
  const int top = nz - 1;
  ImplicitSolution out{VolumeField(grid_, 3), VolumeField(grid_, 1), SurfaceField(grid_, 1)};
  const bool dirichlet = config_.top == TopCondition::dirichlet;
  parallel_for(
      g.modes(),
      [&](int idx) {
        const int i1 = idx / g.n2();
        const int i2 = idx % g.n2();
        if (!canonical(g, i1, i2)) return;
        if (dirichlet && i1 == 0 && i2 == 0) return;
        const ModeOperator& op = *ops_[static_cast<std::size_t>(idx)];
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(op.size());
        for (int l = 1; l < top; ++l) {
          for (int c = 0; c < 3; ++c) b(op.momentum_row(c, l)) = rhs.momentum.at(c, l, i1, i2);
          b(op.continuity_row(l)) = rhs.continuity.at(0, l, i1, i2);
        }
        for (int c = 0; c < 3; ++c) b(op.top_row(c)) = rhs.top.at(c, 0, i1, i2);
        if (config_.surface) b(op.kinematic_row()) = rhs.kinematic.at(0, 0, i1, i2);
        const Eigen::VectorXcd x = op.solve(b);
        const Eigen::VectorXcd p = g.interior_extension().cast<cd>() * x.segment(op.q_offset(), nz - 2);
        const int j1 = (g.n1() - i1) % g.n1();
        const int j2 = (g.n2() - i2) % g.n2();
        const bool self = j1 == i1 && j2 == i2;
        for (int l = 0; l < nz; ++l) {
          for (int c = 0; c < 3; ++c) {
            const cd v = x(op.v_offset(c) + l);
            out.u.at(c, l, i1, i2) = self ? cd(v.real(), 0.0) : v;
            if (!self) out.u.at(c, l, j1, j2) = std::conj(v);
          }
          out.p.at(0, l, i1, i2) = self ? cd(p(l).real(), 0.0) : p(l);
          if (!self) out.p.at(0, l, j1, j2) = std::conj(p(l));
        }
        if (config_.surface) {
          const cd z = x(op.zeta_offset());
          out.zeta.at(0, 0, i1, i2) = self ? cd(z.real(), 0.0) : z;
          if (!self) out.zeta.at(0, 0, j1, j2) = std::conj(z);
        }
      },
      threads_);
  if (dirichlet) solve_dirichlet_mean(g, config_, rhs, out);
  return out;
}

namespace {

ImplicitRhs stokes_rhs(const StokesData& data) {
  const GridPtr& grid = data.f1.grid_ptr();
  return ImplicitRhs{data.f1, data.f2, data.f3, SurfaceField(grid, 1)};
}

void check_data(const StokesData& data) {
  if (data.f1.empty() || data.f2.empty() || data.f3.empty()) throw ContractError("Stokes data incomplete");
  if (data.f1.components() != 3 || data.f2.components() != 1 || data.f3.components() != 3) {
    throw ContractError("Stokes data have wrong component counts");
  }
}

}  // namespace

StokesSolution solve_stokes_dirichlet(const StokesData& data, double mu) {
  check_data(data);
  ModeOperatorConfig cfg;
  cfg.mu = mu;
  cfg.top = TopCondition::dirichlet;
  StokesSolver solver(data.f1.grid_ptr(), cfg);
  auto sol = solver.solve(stokes_rhs(data));
  return {sol.u, sol.p};
}

StokesSolution solve_stokes_stress(const StokesData& data, double mu) {
  check_data(data);
  ModeOperatorConfig cfg;
  cfg.mu = mu;
  cfg.top = TopCondition::stress;
  StokesSolver solver(data.f1.grid_ptr(), cfg);
  auto sol = solver.solve(stokes_rhs(data));
  return {sol.u, sol.p};
}

namespace {

// Max nodal modulus over interior levels of a volume field, all components.
double interior_max(const VolumeField& f) {
  const Grid& g = f.grid();
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const Nodal v = to_nodal(f, c);
    for (int l = 1; l < g.nz() - 1; ++l) {
      worst = std::max(worst, v.segment(static_cast<Eigen::Index>(l) * g.modes(), g.modes()).abs().maxCoeff());
    }
  }
  return worst;
}

struct CommonResidual {
  double momentum, divergence, bottom, scale;
};

CommonResidual common_residual(const StokesData& data, const StokesSolution& sol, double mu) {
  std::vector<VolumeField> momentum;
  for (int c = 0; c < 3; ++c) {
    VolumeField uc = component(sol.u, c);
    VolumeField lap = laplacian_h(uc) + d3(d3(uc));
    momentum.push_back(-mu * lap + partial(sol.p, c) - component(data.f1, c));
  }
  VolumeField div = d1(component(sol.u, 0)) + d2(component(sol.u, 1)) + d3(component(sol.u, 2)) - data.f2;
  const double scale = std::max({1.0, max_nodal(data.f1), max_nodal(data.f2), max_nodal(data.f3),
                                 max_nodal(sol.u), max_nodal(sol.p)});
  return {interior_max(stack(momentum)), interior_max(div), max_nodal(trace_bottom(sol.u)), scale};
}

}  // namespace

StokesResidual stokes_dirichlet_residual(const StokesData& data, const StokesSolution& sol, double mu) {
  const CommonResidual r = common_residual(data, sol, mu);
  StokesResidual out;
  out.momentum = r.momentum / r.scale;
  out.divergence = r.divergence / r.scale;
  out.bottom = r.bottom / r.scale;
  out.top = max_nodal(trace_top(sol.u) - data.f3) / r.scale;
  return out;
}

StokesResidual stokes_stress_residual(const StokesData& data, const StokesSolution& sol, double mu) {
  const CommonResidual r = common_residual(data, sol, mu);
  StokesResidual out;
  out.momentum = r.momentum / r.scale;
  out.divergence = r.divergence / r.scale;
  out.bottom = r.bottom / r.scale;
  // (pI - mu D u) e3 = (-mu (d3 u1 + d1 u3), -mu (d3 u2 + d2 u3), p - 2 mu d3 u3)
  const VolumeField u1 = component(sol.u, 0);
  const VolumeField u2 = component(sol.u, 1);
  const VolumeField u3 = component(sol.u, 2);
  VolumeField traction = stack<FieldKind::volume>({-mu * (d3(u1) + d1(u3)), -mu * (d3(u2) + d2(u3)),
                                                   sol.p - 2.0 * mu * d3(u3)});
  out.top = max_nodal(trace_top(traction) - data.f3) / r.scale;
  return out;
}

}  // namespace faraday
