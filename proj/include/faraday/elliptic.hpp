#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "faraday/field.hpp"

namespace faraday {

/// psi_hat(k) = f_hat(k) / (g + sigma |k|^2). Throws SolvabilityError when the operator is singular
/// on the data (sigma = g = 0, or g = 0 with nonzero mean of f).
SurfaceField solve_capillary(const SurfaceField& f, double sigma, double g);

struct StokesData {
  VolumeField f1;  // 3-vector momentum forcing
  VolumeField f2;  // divergence data
  SurfaceField f3; // 3-vector Dirichlet trace or stress trace
};

struct StokesSolution {
  VolumeField u;
  VolumeField p;
};

/// -mu Lap u + grad p = f1, div u = f2, u = f3 on top, u = 0 on the bottom; p has zero mean.
/// Throws SolvabilityError when int f2 differs from int f3 . e3 by more than 1e-8 (relative).
StokesSolution solve_stokes_dirichlet(const StokesData& data, double mu);

/// -mu Lap u + grad p = f1, div u = f2, (pI - mu D u) e3 = f3 on top, u = 0 on the bottom.
StokesSolution solve_stokes_stress(const StokesData& data, double mu);

/// Maximum residual of each equation, relative to the largest data or solution magnitude.
struct StokesResidual {
  double momentum = 0.0;
  double divergence = 0.0;
  double top = 0.0;
  double bottom = 0.0;
  double max() const { return std::max({momentum, divergence, top, bottom}); }
};

/// Independent residual evaluators built from field operators only. Momentum and divergence are
/// measured at interior vertical nodes, where the collocation equations are imposed.
StokesResidual stokes_dirichlet_residual(const StokesData& data, const StokesSolution& sol, double mu);
StokesResidual stokes_stress_residual(const StokesData& data, const StokesSolution& sol, double mu);

enum class TopCondition { dirichlet, stress };

/// Coefficients of the per-mode implicit operator
///   alpha v - mu [ (D^2 - |k|^2) v + s grad(div v) ] + grad(E q) = r   at interior nodes
///   div v = r                                                          at interior nodes
///   v = 0 at the bottom; top rows per TopCondition.
/// With surface coupling an unknown zeta joins the stress row (E q)_top - 2 mu (D v3)_top
/// - (g + sigma |k|^2) zeta and a kinematic row alpha_s zeta - v3_top.
struct ModeOperatorConfig {
  double alpha = 0.0;
  double mu = 1.0;
  double s = 0.0;
  TopCondition top = TopCondition::stress;
  bool surface = false;
  double alpha_s = 0.0;
  double g = 0.0;
  double sigma = 0.0;
};

/// Dense factorized operator for one horizontal wavevector.
class ModeOperator {
 public:
  ModeOperator(const Grid& grid, double k1, double k2, const ModeOperatorConfig& config, int m1 = 0,
               int m2 = 0);

  int nz() const { return nz_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  /// Offsets into the unknown vector.
  int v_offset(int c) const { return c * nz_; }
  int q_offset() const { return 3 * nz_; }
  int zeta_offset() const { return 4 * nz_ - 2; }
  /// Row offsets: momentum component c at interior node j (1..nz-2), continuity, boundaries.
  int momentum_row(int c, int node) const { return c * (nz_ - 2) + node - 1; }
  int continuity_row(int node) const { return 3 * (nz_ - 2) + node - 1; }
  int bottom_row(int c) const { return 4 * (nz_ - 2) + c; }
  int top_row(int c) const { return 4 * (nz_ - 2) + 3 + c; }
  int kinematic_row() const { return 4 * nz_ - 2; }

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return lu_.solve(rhs); }
  /// Column-wise solve for several right-hand sides at once.
  Eigen::MatrixXcd solve_many(const Eigen::MatrixXcd& rhs) const { return lu_.solve(rhs); }

 private:
  int nz_;
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// Right-hand side of the whole-field implicit problem. Momentum and continuity data are read at
/// interior nodes; top holds the three top-row values; kinematic is used with surface coupling.
struct ImplicitRhs {
  VolumeField momentum;  // 3 components
  VolumeField continuity;
  SurfaceField top;      // 3 components
  SurfaceField kinematic;
};

struct ImplicitSolution {
  VolumeField u;
  VolumeField p;
  SurfaceField zeta;
};

/// Factorizations for every retained mode (one per conjugate pair); immutable after construction.
/// Modes removed by the 2/3 rule are returned as zero.
class StokesSolver {
 public:
  StokesSolver(GridPtr grid, const ModeOperatorConfig& config, int threads = 0);

  ImplicitSolution solve(const ImplicitRhs& rhs) const;
  const ModeOperatorConfig& config() const { return config_; }
  const GridPtr& grid() const { return grid_; }
  /// Operator of a canonical mode (nullptr for dropped or conjugate-partner modes).
  const ModeOperator* mode(int i1, int i2) const;

 private:
  GridPtr grid_;
  ModeOperatorConfig config_;
  int threads_;
  std::vector<std::unique_ptr<ModeOperator>> ops_;
};

}  // namespace faraday
