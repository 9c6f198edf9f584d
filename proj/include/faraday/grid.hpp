#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "faraday/params.hpp"

namespace faraday {

/// Discretization of the slab Sigma x (-b, 0): Fourier modes on the periodic cross-section and
/// Chebyshev-Lobatto nodes in the vertical, ordered from the bottom (-b) to the surface (0).
///
/// Horizontal modes use FFT ordering: index i1 in [0, n1) carries m1 = i1 for i1 < n1/2 and
/// m1 = i1 - n1 otherwise, so the table covers m1 = -n1/2 .. n1/2 - 1.
class Grid {
 public:
  static constexpr int kMaxHorizontal = 512;
  static constexpr int kMaxVertical = 257;

  Grid(double L1, double L2, double b, int n1, int n2, int nz);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int nz() const { return nz_; }
  int modes() const { return n1_ * n2_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  double b() const { return b_; }
  double area() const { return L1_ * L2_; }

  int m1(int i1) const { return i1 < n1_ / 2 ? i1 : i1 - n1_; }
  int m2(int i2) const { return i2 < n2_ / 2 ? i2 : i2 - n2_; }
  double k1(int i1) const { return k1_[static_cast<std::size_t>(i1)]; }
  double k2(int i2) const { return k2_[static_cast<std::size_t>(i2)]; }
  double kmod(int i1, int i2) const;
  /// Flat mode index i1 * n2 + i2.
  int mode_index(int i1, int i2) const { return i1 * n2_ + i2; }
  /// Mode index of the complex-conjugate partner (-m1, -m2).
  int conjugate_index(int i1, int i2) const {
    return mode_index((n1_ - i1) % n1_, (n2_ - i2) % n2_);
  }
  /// 2/3-rule mask: true for retained modes, |m_j| <= (n_j - 1) / 3.
  bool keep(int i1, int i2) const;

  /// Horizontal node coordinates x1 = L1 i1 / n1, x2 = L2 i2 / n2.
  double x1(int i1) const { return L1_ * i1 / n1_; }
  double x2(int i2) const { return L2_ * i2 / n2_; }

  /// Vertical nodes, z(0) = -b and z(nz - 1) = 0 exactly.
  const Eigen::VectorXd& z() const { return z_; }
  /// Clenshaw-Curtis weights on [-b, 0].
  const Eigen::VectorXd& weights() const { return w_; }
  /// Collocation differentiation d/dx3 on the vertical nodes.
  const Eigen::MatrixXd& diff() const { return D_; }
  const Eigen::MatrixXd& diff2() const { return D2_; }
  /// Antiderivative from -b: (Q f)(z_j) = int_{-b}^{z_j} p_f, p_f the interpolant of f.
  const Eigen::MatrixXd& integrate_from_bottom() const { return Q_; }
  /// Values at all nodes of the degree nz-3 polynomial through the nz-2 interior node values.
  const Eigen::MatrixXd& interior_extension() const { return E_; }
  /// Smallest node spacing (horizontal or vertical), used by the CFL guard.
  double min_spacing() const;

 private:
  double L1_, L2_, b_;
  int n1_, n2_, nz_;
  std::vector<double> k1_, k2_;
  Eigen::VectorXd z_, w_;
  Eigen::MatrixXd D_, D2_, Q_, E_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates counts (n1, n2 even in [2, 512]; nz in [4, 257]) and builds the grid.
GridPtr make_grid(const Params& params, int n1, int n2, int nz);

}  // namespace faraday
