#include "faraday/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "faraday/errors.hpp"
#include "faraday/grid.hpp"
#include "faraday/parallel.hpp"

namespace faraday {

namespace {

using cd = std::complex<double>;

// SBDF2 coefficients: a0 x^(n+1) + a1 x^n + a2 x^(n-1).
constexpr double kA0 = 1.5;
constexpr double kA1 = -2.0;
constexpr double kA2 = 0.5;

int steps_for(double period, double dt) {
  if (!(dt > 0.0) || !(period > 0.0)) throw ContractError("monodromy: dt and period must be positive");
  const double ratio = period / dt;
  const double n = std::round(ratio);
  if (n < 2.0 || std::abs(ratio - n) > 1e-9 * ratio) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "monodromy: dt = %.17g does not divide the period %.17g", dt, period);
    throw ContractError(msg);
  }
  return static_cast<int>(n);
}

ModeOperatorConfig implicit_config(const Params& p, double dt) {
  ModeOperatorConfig cfg;
  cfg.alpha = kA0 / dt;
  cfg.mu = p.mu;
  cfg.s = 1.0;
  cfg.top = TopCondition::stress;
  cfg.surface = true;
  cfg.alpha_s = kA0 / dt;
  cfg.g = p.g;
  cfg.sigma = p.sigma;
  return cfg;
}

GridPtr column_grid(const Params& params, int nz) {
  if (nz < 3) throw ContractError("monodromy: nz must be at least 3");
  // Only the vertical discretization is used; the horizontal sizes are the minimum allowed.
  return make_grid(params, 2, 2, nz);
}

Params checked(const Params& params) {
  params.validate();
  return params;
}

double spectral_radius_2x2(const Eigen::Matrix2d& M) {
  const double tr = M.trace();
  const double det = M.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) return std::sqrt(std::abs(det));
  const double r = std::sqrt(disc);
  return std::max(std::abs(tr + r), std::abs(tr - r)) / 2.0;
}

// Classical RK4 for y'' = -c(t) y on the fundamental matrix.
template <typename Coef>
Eigen::Matrix2d rk4_fundamental(Coef c, double period, int steps) {
  const double h = period / steps;
  Eigen::Matrix2d Y = Eigen::Matrix2d::Identity();
  auto rhs = [&](double t, const Eigen::Matrix2d& y) {
    Eigen::Matrix2d d;
    d.row(0) = y.row(1);
    d.row(1) = -c(t) * y.row(0);
    return d;
  };
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const Eigen::Matrix2d k1 = rhs(t, Y);
    const Eigen::Matrix2d k2 = rhs(t + h / 2, Y + (h / 2) * k1);
    const Eigen::Matrix2d k3 = rhs(t + h / 2, Y + (h / 2) * k2);
    const Eigen::Matrix2d k4 = rhs(t + h, Y + h * k3);
    Y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return Y;
}

}  // namespace

LinearModeSystem::LinearModeSystem(double k1, double k2, const Params& params, int nz, double dt)
    : k1_(k1),
      k2_(k2),
      params_(checked(params)),
      dt_(dt),
      steps_(steps_for(params.period(), dt)),
      nz_(nz),
      grid_(column_grid(params, nz)),
      op_(*grid_, k1, k2, implicit_config(params, dt)) {
  if (k1 == 0.0 && k2 == 0.0) throw ContractError("monodromy: k must be nonzero");
  const int nx = 3 * nz + 1;
  const int ncon = (nz - 2) + 5;
  const Eigen::MatrixXcd& A = op_.matrix();
  constraints_ = Eigen::MatrixXcd::Zero(ncon, nx);
  auto copy_row = [&](int dst, int src) {
    constraints_.block(dst, 0, 1, 3 * nz) = A.block(src, 0, 1, 3 * nz);
    constraints_(dst, 3 * nz) = A(src, op_.zeta_offset());
  };
  int r = 0;
  for (int j = 1; j <= nz - 2; ++j) copy_row(r++, op_.continuity_row(j));
  for (int c = 0; c < 3; ++c) copy_row(r++, op_.bottom_row(c));
  for (int c = 0; c < 2; ++c) copy_row(r++, op_.top_row(c));

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(constraints_, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv(0));
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  basis_ = svd.matrixV().rightCols(nx - rank);

  // The implicit solve maps constrained data to the constrained space, so one SBDF2 step reduces
  // to basis coordinates: c^(n+1) = P (history) + w (explicit parametric stress).
  Eigen::MatrixXcd history = Eigen::MatrixXcd::Zero(op_.size(), nx);
  for (int c = 0; c < 3; ++c) {
    for (int j = 1; j <= nz - 2; ++j) history(op_.momentum_row(c, j), c * nz + j) = 1.0;
  }
  history(op_.kinematic_row(), 3 * nz) = 1.0;
  Eigen::MatrixXcd data(op_.size(), basis_.cols() + 1);
  data.leftCols(basis_.cols()) = history * basis_;
  data.rightCols(1).setZero();
  data(op_.top_row(2), basis_.cols()) = 1.0;
  const Eigen::MatrixXcd sol = op_.solve_many(data);
  Eigen::MatrixXcd x(nx, sol.cols());
  x.topRows(3 * nz) = sol.topRows(3 * nz);
  x.row(3 * nz) = sol.row(op_.zeta_offset());
  const Eigen::MatrixXcd coords = basis_.adjoint() * x;
  step_matrix_ = coords.leftCols(basis_.cols());
  top_response_ = coords.rightCols(1);
  zeta_row_ = basis_.row(3 * nz);
}

double LinearModeSystem::constraint_residual() const { return (constraints_ * basis_).cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd LinearModeSystem::monodromy(double amp) const {
  const int r = state_dim();
  Params p = params_;
  p.amp = amp;

  // Columns are propagated pairs (c^n, c^(n-1)) of basis coordinates, seeded with the identity.
  Eigen::MatrixXcd cur = Eigen::MatrixXcd::Zero(r, 2 * r);
  Eigen::MatrixXcd prev = Eigen::MatrixXcd::Zero(r, 2 * r);
  cur.leftCols(r).setIdentity();
  prev.rightCols(r).setIdentity();
  for (int n = 0; n < steps_; ++n) {
    const double t = n * dt_;
    const Eigen::RowVectorXcd zeta_now = zeta_row_ * cur;
    const Eigen::RowVectorXcd zeta_prev = zeta_row_ * prev;
    Eigen::MatrixXcd next = step_matrix_ * ((-kA1 / dt_) * cur + (-kA2 / dt_) * prev);
    next.noalias() += top_response_ * (2.0 * p.parametric(t) * zeta_now - p.parametric(t - dt_) * zeta_prev);
    prev = std::move(cur);
    cur = std::move(next);
  }
  if (!cur.allFinite()) throw ConditioningError(0, 0, 0.0);

  Eigen::MatrixXcd M(2 * r, 2 * r);
  M.topRows(r) = cur;
  M.bottomRows(r) = prev;
  return M;
}

Eigen::MatrixXcd monodromy(const std::array<double, 2>& k, const Params& params, int nz, double dt) {
  return LinearModeSystem(k[0], k[1], params, nz, dt).monodromy(params.amp);
}

double dominant_multiplier(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw ContractError("dominant_multiplier: matrix must be square");
  if (!M.allFinite()) throw ContractError("dominant_multiplier: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  if (es.info() != Eigen::Success) throw NumericalError("dominant_multiplier: eigensolver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double dominant_multiplier(const Eigen::MatrixXd& M) {
  return dominant_multiplier(Eigen::MatrixXcd(M.cast<cd>()));
}

Stability classify(double multiplier, double tol) {
  if (multiplier < 1.0 - tol) return Stability::stable;
  if (multiplier > 1.0 + tol) return Stability::unstable;
  return Stability::marginal;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::marginal:
      break;
  }
  return "marginal";
}

std::vector<std::array<double, 2>> default_k_samples(const Params& params, int per_axis) {
  if (per_axis < 1) throw ContractError("default_k_samples: per_axis must be positive");
  std::vector<std::array<double, 2>> out;
  auto add = [&](double k1, double k2) {
    const double mag = std::hypot(k1, k2);
    for (const auto& k : out) {
      if (std::abs(std::hypot(k[0], k[1]) - mag) <= 1e-12 * mag) return;
    }
    out.push_back({k1, k2});
  };
  const double two_pi = 2.0 * std::numbers::pi;
  for (int m = 1; m <= per_axis; ++m) add(two_pi * m / params.L1, 0.0);
  for (int m = 1; m <= per_axis; ++m) add(0.0, two_pi * m / params.L2);
  return out;
}

double StabilityMap::at(std::size_t ia, std::size_t io, std::size_t ik) const {
  return multiplier[(ia * omegas.size() + io) * k_samples.size() + ik];
}

double StabilityMap::max_multiplier(std::size_t ia, std::size_t io) const { return at(ia, io, argmax_k(ia, io)); }

Stability StabilityMap::classification(std::size_t ia, std::size_t io, double tol) const {
  return classify(max_multiplier(ia, io), tol);
}

std::size_t StabilityMap::argmax_k(std::size_t ia, std::size_t io) const {
  std::size_t best = 0;
  for (std::size_t ik = 1; ik < k_samples.size(); ++ik) {
    if (at(ia, io, ik) > at(ia, io, best)) best = ik;
  }
  return best;
}

namespace {

void csv_row(std::ostringstream& os, double amp, double omega, const std::array<double, 2>& k, double mult) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", amp, omega, k[0], k[1], mult,
                to_string(classify(mult)));
  os << buf;
}

}  // namespace

std::string StabilityMap::csv() const {
  std::ostringstream os;
  os << "amp,omega,k1,k2,multiplier,classification\n";
  for (std::size_t ia = 0; ia < amps.size(); ++ia) {
    for (std::size_t io = 0; io < omegas.size(); ++io) {
      const std::size_t ik = argmax_k(ia, io);
      csv_row(os, amps[ia], omegas[io], k_samples[ik], at(ia, io, ik));
    }
  }
  return os.str();
}

std::string StabilityMap::csv_by_k() const {
  std::ostringstream os;
  os << "amp,omega,k1,k2,multiplier,classification\n";
  for (std::size_t ia = 0; ia < amps.size(); ++ia) {
    for (std::size_t io = 0; io < omegas.size(); ++io) {
      for (std::size_t ik = 0; ik < k_samples.size(); ++ik) csv_row(os, amps[ia], omegas[io], k_samples[ik], at(ia, io, ik));
    }
  }
  return os.str();
}

std::string StabilityMap::contour_csv() const {
  std::ostringstream os;
  char buf[64];
  os << "amp\\omega";
  for (double w : omegas) {
    std::snprintf(buf, sizeof buf, ",%.17g", w);
    os << buf;
  }
  os << '\n';
  for (std::size_t ia = 0; ia < amps.size(); ++ia) {
    std::snprintf(buf, sizeof buf, "%.17g", amps[ia]);
    os << buf;
    for (std::size_t io = 0; io < omegas.size(); ++io) {
      std::snprintf(buf, sizeof buf, ",%.17g", max_multiplier(ia, io));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

StabilityMap stability_sweep(const std::vector<double>& amps, const std::vector<double>& omegas, const Params& params,
                             const std::vector<std::array<double, 2>>& k_samples, const SweepOptions& options) {
  if (amps.empty() || omegas.empty() || k_samples.empty()) {
    throw ContractError("stability_sweep: amp, omega and k grids must be nonempty");
  }
  if (options.steps_per_period < 2) throw ContractError("stability_sweep: steps_per_period must be at least 2");
  StabilityMap map{amps, omegas, k_samples, {}};
  const std::size_t na = amps.size(), no = omegas.size(), nk = k_samples.size();
  map.multiplier.assign(na * no * nk, 0.0);
  // One factorization per (omega, k), reused across amplitudes.
  parallel_for(
      static_cast<int>(no * nk),
      [&](int job) {
        const std::size_t io = static_cast<std::size_t>(job) / nk;
        const std::size_t ik = static_cast<std::size_t>(job) % nk;
        Params p = params;
        p.omega = omegas[io];
        const double dt = p.period() / options.steps_per_period;
        const LinearModeSystem sys(k_samples[ik][0], k_samples[ik][1], p, options.nz, dt);
        for (std::size_t ia = 0; ia < na; ++ia) {
          map.multiplier[(ia * no + io) * nk + ik] = dominant_multiplier(sys.monodromy(amps[ia]));
        }
      },
      options.threads);
  return map;
}

double max_multiplier(double amp, double omega, const Params& params,
                      const std::vector<std::array<double, 2>>& k_samples, const SweepOptions& options) {
  return stability_sweep({amp}, {omega}, params, k_samples, options).max_multiplier(0, 0);
}

Threshold threshold_amplitude(double omega, const Params& params, const std::vector<std::array<double, 2>>& k_samples,
                              double amp_lo, double amp_hi, double rel_tol, const SweepOptions& options) {
  if (!(amp_lo >= 0.0) || !(amp_hi > amp_lo)) throw ContractError("threshold_amplitude: need 0 <= amp_lo < amp_hi");
  if (k_samples.empty()) throw ContractError("threshold_amplitude: k_samples must be nonempty");
  Params p = params;
  p.omega = omega;
  const double dt = p.period() / options.steps_per_period;
  std::vector<std::unique_ptr<LinearModeSystem>> systems(k_samples.size());
  parallel_for(
      static_cast<int>(k_samples.size()),
      [&](int i) {
        const auto& k = k_samples[static_cast<std::size_t>(i)];
        systems[static_cast<std::size_t>(i)] = std::make_unique<LinearModeSystem>(k[0], k[1], p, options.nz, dt);
      },
      options.threads);
  auto eval = [&](double amp) {
    std::vector<double> mult(systems.size());
    parallel_for(
        static_cast<int>(systems.size()),
        [&](int i) {
          mult[static_cast<std::size_t>(i)] = dominant_multiplier(systems[static_cast<std::size_t>(i)]->monodromy(amp));
        },
        options.threads);
    return *std::max_element(mult.begin(), mult.end());
  };
  Threshold th{0.0, amp_lo, amp_hi, eval(amp_lo), eval(amp_hi)};
  if (!(th.multiplier_below < 1.0) || !(th.multiplier_above > 1.0)) {
    char msg[200];
    std::snprintf(msg, sizeof msg, "threshold_amplitude: no crossing in [%.6g, %.6g] (multipliers %.6g, %.6g)", amp_lo,
                  amp_hi, th.multiplier_below, th.multiplier_above);
    throw ContractError(msg);
  }
  while (th.amp_above - th.amp_below > rel_tol * th.amp_above) {
    const double mid = 0.5 * (th.amp_below + th.amp_above);
    const double mult = eval(mid);
    if (mult > 1.0) {
      th.amp_above = mid;
      th.multiplier_above = mult;
    } else {
      th.amp_below = mid;
      th.multiplier_below = mult;
    }
  }
  th.amp = 0.5 * (th.amp_below + th.amp_above);
  return th;
}

Eigen::Matrix2d mathieu_monodromy(double k, const Params& params, int steps) {
  if (!(k > 0.0)) throw ContractError("mathieu_oracle: k must be positive");
  if (steps < 1) throw ContractError("mathieu_oracle: steps must be positive");
  const double disp = k * std::tanh(k * params.b);
  const double base = params.g + params.sigma * k * k;
  return rk4_fundamental([&](double t) { return disp * (base + params.parametric(t)); }, params.period(), steps);
}

double mathieu_oracle(double k, const Params& params) { return spectral_radius_2x2(mathieu_monodromy(k, params)); }

Eigen::Matrix2d mathieu_normal_form(double a, double q, int steps) {
  return rk4_fundamental([=](double t) { return a - 2.0 * q * std::cos(2.0 * t); }, std::numbers::pi, steps);
}

}  // namespace faraday
