#include "faraday/norms.hpp"

#include <cmath>
#include <string>

#include "faraday/errors.hpp"

namespace faraday {

double sobolev_norm_surface_sq(const SurfaceField& f, double s) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        const double k = g.kmod(i1, i2);
        sum += std::pow(1.0 + k * k, s) * std::norm(f.at(c, 0, i1, i2));
      }
    }
  }
  return sum * g.area();
}

double sobolev_norm_surface(const SurfaceField& f, double s) {
  return std::sqrt(sobolev_norm_surface_sq(f, s));
}

double sobolev_norm_volume_sq(const VolumeField& f, int k) {
  if (k < 0 || k > 4) {
    throw ConfigError("sobolev_norm_volume order must be within [0, 4], got " + std::to_string(k));
  }
  const Grid& g = f.grid();
  const Eigen::VectorXd& w = g.weights();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    VolumeField dz = component(f, c);
    for (int order3 = 0; order3 <= k; ++order3) {
      if (order3 > 0) dz = d3(dz);
      const int rest = k - order3;
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        const double q1 = g.k1(i1) * g.k1(i1);
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const double q2 = g.k2(i2) * g.k2(i2);
          // Sum of q1^a q2^b over a + b <= rest.
          double weight = 0.0;
          double pa = 1.0;
          for (int a = 0; a <= rest; ++a) {
            double pb = 1.0;
            for (int b = 0; a + b <= rest; ++b) {
              weight += pa * pb;
              pb *= q2;
            }
            pa *= q1;
          }
          double column = 0.0;
          for (int l = 0; l < g.nz(); ++l) column += w(l) * std::norm(dz.at(0, l, i1, i2));
          sum += weight * column;
        }
      }
    }
  }
  return sum * g.area();
}

double sobolev_norm_volume(const VolumeField& f, int k) {
  return std::sqrt(sobolev_norm_volume_sq(f, k));
}

double inner_surface(const SurfaceField& f, const SurfaceField& g) {
  if (!f.same_shape(g)) throw ContractError("inner_surface shape mismatch");
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    sum += (f.coeffs(c) * g.coeffs(c).conjugate()).real().sum();
  }
  return sum * f.grid().area();
}

double inner_volume(const VolumeField& f, const VolumeField& g) {
  if (!f.same_shape(g)) throw ContractError("inner_volume shape mismatch");
  const Grid& grid = f.grid();
  const int nm = grid.modes();
  const Eigen::VectorXd& w = grid.weights();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    for (int l = 0; l < grid.nz(); ++l) {
      const Eigen::Index off = static_cast<Eigen::Index>(l) * nm;
      sum += w(l) * (f.coeffs(c).segment(off, nm) * g.coeffs(c).segment(off, nm).conjugate())
                        .real()
                        .sum();
    }
  }
  return sum * grid.area();
}

double integrate_surface(const SurfaceField& f, int c) {
  return f.coeffs(c)(0).real() * f.grid().area();
}

double integrate_volume(const VolumeField& f, int c) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int l = 0; l < g.nz(); ++l) sum += g.weights()(l) * f.at(c, l, 0, 0).real();
  return sum * g.area();
}

VolumeField poisson_extend(const SurfaceField& f, const GridPtr& grid) {
  const Grid& g = *grid;
  VolumeField out(grid, f.components());
  for (int c = 0; c < f.components(); ++c) {
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        const double k = g.kmod(i1, i2);
        const cd top = f.at(c, 0, i1, i2);
        for (int l = 0; l < g.nz(); ++l) out.at(c, l, i1, i2) = top * std::exp(k * g.z()(l));
      }
    }
  }
  return out;
}

}  // namespace faraday
