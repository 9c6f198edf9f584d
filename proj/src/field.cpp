#include "faraday/field.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "faraday/errors.hpp"

namespace faraday {

namespace {

// fftw_plan creation is not thread-safe; execution on new arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n1, int n2, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(n1, n2, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> in(static_cast<std::size_t>(n1 * n2));
    std::vector<fftw_complex> out(static_cast<std::size_t>(n1 * n2));
    fftw_plan plan = fftw_plan_dft_2d(n1, n2, in.data(), out.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(fftw_plan plan, const cd* in, cd* out) {
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

template <FieldKind K>
void require_shape(const Field<K>& a, const Field<K>& b) {
  if (!a.same_shape(b)) throw ContractError("field shape mismatch");
}

template <FieldKind K>
Field<K> multiply_modes(const Field<K>& f, const std::function<cd(int, int)>& factor) {
  Field<K> out = f;
  const Grid& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < f.levels(); ++l) {
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        for (int i2 = 0; i2 < g.n2(); ++i2) out.at(c, l, i1, i2) *= factor(i1, i2);
      }
    }
  }
  return out;
}

}  // namespace

template <FieldKind K>
Field<K>::Field(GridPtr grid, int ncomp) : grid_(std::move(grid)) {
  if (!grid_) throw ContractError("field requires a grid");
  if (ncomp < 1) throw ContractError("field requires at least one component");
  data_.assign(static_cast<std::size_t>(ncomp), Eigen::ArrayXcd::Zero(size()));
}

template <FieldKind K>
bool Field<K>::same_shape(const Field& other) const {
  if (!grid_ || !other.grid_) return false;
  const Grid& a = *grid_;
  const Grid& b = *other.grid_;
  return components() == other.components() && a.n1() == b.n1() && a.n2() == b.n2() &&
         a.nz() == b.nz();
}

template <FieldKind K>
Field<K>& Field<K>::operator+=(const Field& rhs) {
  require_shape(*this, rhs);
  for (int c = 0; c < components(); ++c) coeffs(c) += rhs.coeffs(c);
  return *this;
}

template <FieldKind K>
Field<K>& Field<K>::operator-=(const Field& rhs) {
  require_shape(*this, rhs);
  for (int c = 0; c < components(); ++c) coeffs(c) -= rhs.coeffs(c);
  return *this;
}

template <FieldKind K>
Field<K>& Field<K>::operator*=(double s) {
  for (auto& d : data_) d *= s;
  return *this;
}

template <FieldKind K>
Field<K>& Field<K>::operator*=(cd s) {
  for (auto& d : data_) d *= s;
  return *this;
}

template <FieldKind K>
Nodal to_nodal(const Field<K>& f, int c) {
  const Grid& g = f.grid();
  const int nm = g.modes();
  fftw_plan plan = PlanCache::instance().get(g.n1(), g.n2(), FFTW_BACKWARD);
  Nodal out(f.size());
  std::vector<cd> buffer(static_cast<std::size_t>(nm));
  const Eigen::ArrayXcd& coeffs = f.coeffs(c);
  for (int l = 0; l < f.levels(); ++l) {
    execute(plan, coeffs.data() + static_cast<Eigen::Index>(l) * nm, buffer.data());
    for (int m = 0; m < nm; ++m) out(static_cast<Eigen::Index>(l) * nm + m) = buffer[m].real();
  }
  return out;
}

template <FieldKind K>
Field<K> from_nodal(const GridPtr& grid, const std::vector<Nodal>& comps, bool do_dealias) {
  Field<K> f(grid, static_cast<int>(comps.size()));
  const Grid& g = *grid;
  const int nm = g.modes();
  fftw_plan plan = PlanCache::instance().get(g.n1(), g.n2(), FFTW_FORWARD);
  std::vector<cd> in(static_cast<std::size_t>(nm));
  const double scale = 1.0 / nm;
  for (int c = 0; c < f.components(); ++c) {
    const Nodal& values = comps[static_cast<std::size_t>(c)];
    if (values.size() != f.size()) throw ContractError("nodal array size does not match grid");
    Eigen::ArrayXcd& coeffs = f.coeffs(c);
    for (int l = 0; l < f.levels(); ++l) {
      for (int m = 0; m < nm; ++m) in[m] = cd(values(static_cast<Eigen::Index>(l) * nm + m), 0.0);
      execute(plan, in.data(), coeffs.data() + static_cast<Eigen::Index>(l) * nm);
    }
    coeffs *= scale;
  }
  return do_dealias ? dealias(std::move(f)) : f;
}

template <FieldKind K>
Field<K> dealias(Field<K> f) {
  const Grid& g = f.grid();
  for (int i1 = 0; i1 < g.n1(); ++i1) {
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      if (g.keep(i1, i2)) continue;
      for (int c = 0; c < f.components(); ++c) {
        for (int l = 0; l < f.levels(); ++l) f.at(c, l, i1, i2) = 0.0;
      }
    }
  }
  return f;
}

template <FieldKind K>
Field<K> d1(const Field<K>& f) {
  const Grid& g = f.grid();
  return multiply_modes(f, [&g](int i1, int) { return cd(0.0, g.k1(i1)); });
}

template <FieldKind K>
Field<K> d2(const Field<K>& f) {
  const Grid& g = f.grid();
  return multiply_modes(f, [&g](int, int i2) { return cd(0.0, g.k2(i2)); });
}

template <FieldKind K>
Field<K> laplacian_h(const Field<K>& f) {
  const Grid& g = f.grid();
  return multiply_modes(f, [&g](int i1, int i2) {
    const double k = g.kmod(i1, i2);
    return cd(-k * k, 0.0);
  });
}

VolumeField d3(const VolumeField& f) {
  const Grid& g = f.grid();
  VolumeField out(f.grid_ptr(), f.components());
  const Eigen::MatrixXd Dt = g.diff().transpose();
  for (int c = 0; c < f.components(); ++c) {
    // Column-major view: rows are modes, columns are levels.
    Eigen::Map<const Eigen::MatrixXcd> in(f.coeffs(c).data(), g.modes(), g.nz());
    Eigen::Map<Eigen::MatrixXcd> res(out.coeffs(c).data(), g.modes(), g.nz());
    res.noalias() = in * Dt.cast<cd>();
  }
  return out;
}

VolumeField partial(const VolumeField& f, int axis) {
  switch (axis) {
    case 0: return d1(f);
    case 1: return d2(f);
    case 2: return d3(f);
    default: throw ContractError("axis must be 0, 1 or 2");
  }
}

template <FieldKind K>
Field<K> component(const Field<K>& f, int c) {
  Field<K> out(f.grid_ptr(), 1);
  out.coeffs(0) = f.coeffs(c);
  return out;
}

template <FieldKind K>
Field<K> stack(const std::vector<Field<K>>& parts) {
  if (parts.empty()) throw ContractError("stack requires at least one field");
  int total = 0;
  for (const auto& p : parts) total += p.components();
  Field<K> out(parts.front().grid_ptr(), total);
  int c = 0;
  for (const auto& p : parts) {
    for (int j = 0; j < p.components(); ++j) out.coeffs(c++) = p.coeffs(j);
  }
  return out;
}

namespace {

SurfaceField trace_level(const VolumeField& f, int level) {
  SurfaceField out(f.grid_ptr(), f.components());
  const int nm = f.grid().modes();
  for (int c = 0; c < f.components(); ++c) {
    out.coeffs(c) = f.coeffs(c).segment(static_cast<Eigen::Index>(level) * nm, nm);
  }
  return out;
}

}  // namespace

SurfaceField trace_top(const VolumeField& f) { return trace_level(f, f.grid().nz() - 1); }
SurfaceField trace_bottom(const VolumeField& f) { return trace_level(f, 0); }

VolumeField extend_constant(const SurfaceField& s) {
  VolumeField out(s.grid_ptr(), s.components());
  const int nm = s.grid().modes();
  for (int c = 0; c < s.components(); ++c) {
    for (int l = 0; l < out.levels(); ++l) {
      out.coeffs(c).segment(static_cast<Eigen::Index>(l) * nm, nm) = s.coeffs(c);
    }
  }
  return out;
}

template <FieldKind K>
double hermitian_defect(const Field<K>& f) {
  const Grid& g = f.grid();
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < f.levels(); ++l) {
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const int j1 = (g.n1() - i1) % g.n1();
          const int j2 = (g.n2() - i2) % g.n2();
          worst = std::max(worst, std::abs(f.at(c, l, i1, i2) - std::conj(f.at(c, l, j1, j2))));
        }
      }
    }
  }
  return worst;
}

template <FieldKind K>
Field<K> symmetrize(Field<K> f) {
  const Grid& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < f.levels(); ++l) {
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const int j1 = (g.n1() - i1) % g.n1();
          const int j2 = (g.n2() - i2) % g.n2();
          if (g.mode_index(j1, j2) < g.mode_index(i1, i2)) continue;
          const cd avg = 0.5 * (f.at(c, l, i1, i2) + std::conj(f.at(c, l, j1, j2)));
          f.at(c, l, i1, i2) = avg;
          f.at(c, l, j1, j2) = std::conj(avg);
        }
      }
    }
  }
  return f;
}

template <FieldKind K>
double max_coeff(const Field<K>& f) {
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) worst = std::max(worst, f.coeffs(c).abs().maxCoeff());
  return worst;
}

template <FieldKind K>
double max_nodal(const Field<K>& f) {
  double worst = 0.0;
  for (int c = 0; c < f.components(); ++c) worst = std::max(worst, to_nodal(f, c).abs().maxCoeff());
  return worst;
}

SurfaceField sample_surface(const GridPtr& grid, const std::function<double(double, double)>& fn,
                            bool do_dealias) {
  const Grid& g = *grid;
  Nodal values(g.modes());
  for (int i1 = 0; i1 < g.n1(); ++i1) {
    for (int i2 = 0; i2 < g.n2(); ++i2) values(g.mode_index(i1, i2)) = fn(g.x1(i1), g.x2(i2));
  }
  return from_nodal<FieldKind::surface>(grid, values, do_dealias);
}

VolumeField sample_volume(const GridPtr& grid,
                          const std::function<double(double, double, double)>& fn,
                          bool do_dealias) {
  const Grid& g = *grid;
  Nodal values(static_cast<Eigen::Index>(g.nz()) * g.modes());
  for (int l = 0; l < g.nz(); ++l) {
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        values(static_cast<Eigen::Index>(l) * g.modes() + g.mode_index(i1, i2)) =
            fn(g.x1(i1), g.x2(i2), g.z()(l));
      }
    }
  }
  return from_nodal<FieldKind::volume>(grid, values, do_dealias);
}

Nodal nodal_x3(const Grid& grid) { return broadcast_levels(grid, grid.z()); }

Nodal broadcast_levels(const Grid& grid, const Eigen::VectorXd& per_level) {
  Nodal out(static_cast<Eigen::Index>(grid.nz()) * grid.modes());
  for (int l = 0; l < grid.nz(); ++l) {
    out.segment(static_cast<Eigen::Index>(l) * grid.modes(), grid.modes()).setConstant(per_level(l));
  }
  return out;
}

#define FARADAY_INSTANTIATE(KIND)                                                          \
  template class Field<KIND>;                                                              \
  template Nodal to_nodal(const Field<KIND>&, int);                                        \
  template Field<KIND> from_nodal<KIND>(const GridPtr&, const std::vector<Nodal>&, bool);  \
  template Field<KIND> dealias(Field<KIND>);                                               \
  template Field<KIND> d1(const Field<KIND>&);                                             \
  template Field<KIND> d2(const Field<KIND>&);                                             \
  template Field<KIND> laplacian_h(const Field<KIND>&);                                    \
  template Field<KIND> component(const Field<KIND>&, int);                                 \
  template Field<KIND> stack(const std::vector<Field<KIND>>&);                             \
  template double hermitian_defect(const Field<KIND>&);                                    \
  template Field<KIND> symmetrize(Field<KIND>);                                            \
  template double max_coeff(const Field<KIND>&);                                           \
  template double max_nodal(const Field<KIND>&);

FARADAY_INSTANTIATE(FieldKind::surface)
FARADAY_INSTANTIATE(FieldKind::volume)

#undef FARADAY_INSTANTIATE

}  // namespace faraday
