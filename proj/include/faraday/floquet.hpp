#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faraday/elliptic.hpp"
#include "faraday/grid.hpp"
#include "faraday/params.hpp"

namespace faraday {

/// Linearized flattened system about the flat oscillating state for one horizontal wavevector,
/// propagated with the simulator's SBDF2 scheme (implicit Stokes, gravity and surface tension;
/// the parametric term A omega^2 f''(omega t) zeta extrapolated explicitly).
///
/// The physical state x = (v at nz nodes x 3 components, zeta) lies in the null space of the
/// bottom condition, interior continuity and the tangential top stress rows. Because SBDF2 is a
/// two-level scheme, the propagated state is the pair (x^n, x^(n-1)) and the period map acts on
/// twice the constrained dimension.
class LinearModeSystem {
 public:
  /// Throws ContractError when k = 0, nz < 3, or dt does not divide T = 1 / omega.
  LinearModeSystem(double k1, double k2, const Params& params, int nz, double dt);

  double k1() const { return k1_; }
  double k2() const { return k2_; }
  int steps_per_period() const { return steps_; }
  /// 3 nz + 1 - (number of eliminated constraints).
  int state_dim() const { return static_cast<int>(basis_.cols()); }
  int constraint_count() const { return static_cast<int>(constraints_.rows()); }
  /// Orthonormal basis of the constrained space, (3 nz + 1) x state_dim.
  const Eigen::MatrixXcd& basis() const { return basis_; }
  /// max |C B| over the eliminated constraint rows.
  double constraint_residual() const;

  /// Period map at the given amplitude in basis coordinates, 2 state_dim square. Throws ConditioningError when the
  /// propagation produces non-finite values.
  Eigen::MatrixXcd monodromy(double amp) const;

 private:
  double k1_;
  double k2_;
  Params params_;
  double dt_;
  int steps_;
  int nz_;
  GridPtr grid_;
  ModeOperator op_;
  Eigen::MatrixXcd constraints_;
  Eigen::MatrixXcd basis_;
  Eigen::MatrixXcd step_matrix_;
  Eigen::VectorXcd top_response_;
  Eigen::RowVectorXcd zeta_row_;
};

/// Period map for wavevector k at params.amp with step dt.
Eigen::MatrixXcd monodromy(const std::array<double, 2>& k, const Params& params, int nz, double dt);

/// Spectral radius by dense eigensolve. Throws ContractError for non-square or non-finite input
/// and NumericalError when the eigensolver fails.
double dominant_multiplier(const Eigen::MatrixXcd& M);
double dominant_multiplier(const Eigen::MatrixXd& M);

enum class Stability { stable, marginal, unstable };
constexpr double kStabilityTol = 1e-3;
Stability classify(double multiplier, double tol = kStabilityTol);
const char* to_string(Stability s);

/// Wavevectors 2 pi m / L_i along each axis for m = 1..per_axis, deduplicated by |k|.
std::vector<std::array<double, 2>> default_k_samples(const Params& params, int per_axis = 16);

struct SweepOptions {
  int nz = 17;
  int steps_per_period = 200;
  int threads = 0;
};

struct StabilityMap {
  std::vector<double> amps;
  std::vector<double> omegas;
  std::vector<std::array<double, 2>> k_samples;
  /// multiplier[(ia * omegas.size() + io) * k_samples.size() + ik]
  std::vector<double> multiplier;

  double at(std::size_t ia, std::size_t io, std::size_t ik) const;
  /// Max over sampled wavevectors and the index attaining it (first on ties).
  double max_multiplier(std::size_t ia, std::size_t io) const;
  std::size_t argmax_k(std::size_t ia, std::size_t io) const;
  Stability classification(std::size_t ia, std::size_t io, double tol = kStabilityTol) const;

  /// One row per (amp, omega) with the maximizing wavevector:
  /// amp,omega,k1,k2,multiplier,classification.
  std::string csv() const;
  /// Same columns with one row per (amp, omega, k).
  std::string csv_by_k() const;
  /// Max-over-k surface: header row of omegas, then one row per amp.
  std::string contour_csv() const;
};

/// Throws ContractError on empty grids; errors from monodromy propagate. Rows are merged by grid
/// index so the result does not depend on the worker schedule.
StabilityMap stability_sweep(const std::vector<double>& amps, const std::vector<double>& omegas, const Params& params,
                             const std::vector<std::array<double, 2>>& k_samples, const SweepOptions& options = {});

/// Max over k of the dominant multiplier at one (amp, omega).
double max_multiplier(double amp, double omega, const Params& params,
                      const std::vector<std::array<double, 2>>& k_samples, const SweepOptions& options = {});

struct Threshold {
  double amp = 0.0;       // midpoint of the final bracket
  double amp_below = 0.0;
  double amp_above = 0.0;
  double multiplier_below = 0.0;
  double multiplier_above = 0.0;
};

/// Bisection in amp on max-over-k multiplier = 1 at fixed omega. Throws ContractError unless the
/// multiplier is below 1 at amp_lo and above 1 at amp_hi.
Threshold threshold_amplitude(double omega, const Params& params, const std::vector<std::array<double, 2>>& k_samples,
                              double amp_lo, double amp_hi, double rel_tol = 1e-3, const SweepOptions& options = {});

/// Monodromy of a + k tanh(k b) (g + sigma k^2 + amp omega^2 f''(omega t)) a = 0 over one period
/// by classical RK4 with `steps` steps. mu is ignored.
Eigen::Matrix2d mathieu_monodromy(double k, const Params& params, int steps = 4000);
/// Spectral radius of mathieu_monodromy. Throws ContractError unless k > 0.
double mathieu_oracle(double k, const Params& params);

/// Monodromy of x'' + (a - 2 q cos 2t) x = 0 over [0, pi] by RK4.
Eigen::Matrix2d mathieu_normal_form(double a, double q, int steps = 4000);

}  // namespace faraday
