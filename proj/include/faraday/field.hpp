#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "faraday/grid.hpp"

namespace faraday {

using cd = std::complex<double>;

enum class FieldKind { surface, volume };

/// Spectral field on the grid. Each component stores complex Fourier coefficients laid out as
/// [level][i1][i2] with one level on Sigma (surface) or nz vertical nodes (volume). Coefficients are
/// normalized so that f(x) = sum_m fhat(m) exp(i k(m) . x'), i.e. fhat(m) is the cell average of
/// f exp(-i k . x'). Real-valued fields satisfy fhat(-m) = conj(fhat(m)).
template <FieldKind K>
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, int ncomp = 1);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int components() const { return static_cast<int>(data_.size()); }
  int levels() const { return K == FieldKind::surface ? 1 : grid_->nz(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(levels()) * grid_->modes(); }
  bool empty() const { return !grid_; }

  Eigen::ArrayXcd& coeffs(int c = 0) { return data_[static_cast<std::size_t>(c)]; }
  const Eigen::ArrayXcd& coeffs(int c = 0) const { return data_[static_cast<std::size_t>(c)]; }

  Eigen::Index offset(int level, int i1, int i2) const {
    return static_cast<Eigen::Index>(level) * grid_->modes() + grid_->mode_index(i1, i2);
  }
  cd& at(int c, int level, int i1, int i2) { return coeffs(c)(offset(level, i1, i2)); }
  cd at(int c, int level, int i1, int i2) const { return coeffs(c)(offset(level, i1, i2)); }

  bool same_shape(const Field& other) const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(double s);
  Field& operator*=(cd s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<Eigen::ArrayXcd> data_;
};

using SurfaceField = Field<FieldKind::surface>;
using VolumeField = Field<FieldKind::volume>;

/// Nodal values laid out [level][i1][i2], matching the coefficient layout.
using Nodal = Eigen::ArrayXd;

template <FieldKind K>
Nodal to_nodal(const Field<K>& f, int c = 0);

/// Builds a field from nodal component arrays; with dealias the 2/3 mask is applied.
template <FieldKind K>
Field<K> from_nodal(const GridPtr& grid, const std::vector<Nodal>& comps, bool dealias = true);

template <FieldKind K>
Field<K> from_nodal(const GridPtr& grid, const Nodal& comp, bool dealias = true) {
  return from_nodal<K>(grid, std::vector<Nodal>{comp}, dealias);
}

/// Zeroes the modes removed by the 2/3 rule.
template <FieldKind K>
Field<K> dealias(Field<K> f);

template <FieldKind K>
Field<K> d1(const Field<K>& f);
template <FieldKind K>
Field<K> d2(const Field<K>& f);
/// Horizontal Laplacian d11 + d22.
template <FieldKind K>
Field<K> laplacian_h(const Field<K>& f);
/// Vertical collocation derivative.
VolumeField d3(const VolumeField& f);
/// Derivative along axis 0, 1, 2.
VolumeField partial(const VolumeField& f, int axis);

template <FieldKind K>
Field<K> component(const Field<K>& f, int c);
template <FieldKind K>
Field<K> stack(const std::vector<Field<K>>& parts);

SurfaceField trace_top(const VolumeField& f);
SurfaceField trace_bottom(const VolumeField& f);
/// Volume field equal to s at every level (x3-independent).
VolumeField extend_constant(const SurfaceField& s);

/// Largest |fhat(m) - conj(fhat(-m))| over all components; zero for real fields.
template <FieldKind K>
double hermitian_defect(const Field<K>& f);
/// Enforces exact Hermitian symmetry by averaging each conjugate pair.
template <FieldKind K>
Field<K> symmetrize(Field<K> f);

/// Largest coefficient modulus.
template <FieldKind K>
double max_coeff(const Field<K>& f);
/// Largest nodal absolute value over all components.
template <FieldKind K>
double max_nodal(const Field<K>& f);

SurfaceField sample_surface(const GridPtr& grid, const std::function<double(double, double)>& fn,
                            bool dealias = false);
VolumeField sample_volume(const GridPtr& grid,
                          const std::function<double(double, double, double)>& fn,
                          bool dealias = false);

/// Nodal helpers for the volume layout.
Nodal nodal_x3(const Grid& grid);
/// Broadcasts a per-level vector to all horizontal nodes.
Nodal broadcast_levels(const Grid& grid, const Eigen::VectorXd& per_level);

}  // namespace faraday
