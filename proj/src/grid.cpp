#include "faraday/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "faraday/errors.hpp"

namespace faraday {

namespace {

constexpr double kPi = std::numbers::pi;

// Reference Chebyshev-Lobatto nodes on [-1, 1], ascending. The sine form is symmetric to rounding.
double lobatto(int j, int N) { return std::sin(kPi * (2.0 * j - N) / (2.0 * N)); }

// xi_i - xi_j without cancellation.
double lobatto_gap(int i, int j, int N) {
  return -2.0 * std::sin(kPi * (i + j) / (2.0 * N)) * std::sin(kPi * (j - i) / (2.0 * N));
}

Eigen::VectorXd clenshaw_curtis(int N) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(N + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N - 1);
  auto theta = [&](int j) { return kPi * j / N; };
  if (N % 2 == 0) {
    w(0) = w(N) = 1.0 / (N * N - 1.0);
    for (int k = 1; k < N / 2; ++k) {
      for (int j = 1; j < N; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
    }
    for (int j = 1; j < N; ++j) v(j - 1) -= std::cos(N * theta(j)) / (N * N - 1.0);
  } else {
    w(0) = w(N) = 1.0 / (static_cast<double>(N) * N);
    for (int k = 1; k <= (N - 1) / 2; ++k) {
      for (int j = 1; j < N; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
    }
  }
  for (int j = 1; j < N; ++j) w(j) = 2.0 * v(j - 1) / N;
  return w;
}

}  // namespace

Grid::Grid(double L1, double L2, double b, int n1, int n2, int nz)
    : L1_(L1), L2_(L2), b_(b), n1_(n1), n2_(n2), nz_(nz) {
  k1_.resize(static_cast<std::size_t>(n1));
  k2_.resize(static_cast<std::size_t>(n2));
  for (int i = 0; i < n1; ++i) k1_[static_cast<std::size_t>(i)] = 2.0 * kPi * m1(i) / L1;
  for (int i = 0; i < n2; ++i) k2_[static_cast<std::size_t>(i)] = 2.0 * kPi * m2(i) / L2;

  const int N = nz - 1;
  const double half = 0.5 * b;
  z_.resize(nz);
  for (int j = 0; j < nz; ++j) z_(j) = half * (lobatto(j, N) - 1.0);
  z_(0) = -b;
  z_(N) = 0.0;
  w_ = half * clenshaw_curtis(N);

  // Barycentric differentiation with weights (-1)^j delta_j.
  Eigen::VectorXd bw(nz);
  for (int j = 0; j < nz; ++j) bw(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
  D_ = Eigen::MatrixXd::Zero(nz, nz);
  for (int i = 0; i < nz; ++i) {
    double diag = 0.0;
    for (int j = 0; j < nz; ++j) {
      if (i == j) continue;
      D_(i, j) = (bw(j) / bw(i)) / (half * lobatto_gap(i, j, N));
      diag -= D_(i, j);
    }
    D_(i, i) = diag;
  }
  D2_ = D_ * D_;

  // Chebyshev coefficient route for the antiderivative. T(i, n) = T_n(xi_i).
  Eigen::MatrixXd T(nz, nz);
  Eigen::MatrixXd Tx(nz, nz + 1);
  for (int i = 0; i < nz; ++i) {
    const double angle = kPi - kPi * i / N;  // xi_i = cos(angle)
    for (int n = 0; n <= nz; ++n) {
      const double t = std::cos(n * angle);
      if (n < nz) T(i, n) = t;
      Tx(i, n) = t;
    }
  }
  // Int(n_out, n_in): coefficients of an antiderivative of T_{n_in}.
  Eigen::MatrixXd Int = Eigen::MatrixXd::Zero(nz + 1, nz);
  for (int n = 0; n < nz; ++n) {
    if (n == 0) {
      Int(1, 0) = 1.0;
    } else if (n == 1) {
      Int(2, 1) = 0.25;
    } else {
      Int(n + 1, n) += 1.0 / (2.0 * (n + 1));
      Int(n - 1, n) -= 1.0 / (2.0 * (n - 1));
    }
  }
  Eigen::RowVectorXd at_bottom(nz + 1);
  for (int n = 0; n <= nz; ++n) at_bottom(n) = (n % 2) ? -1.0 : 1.0;
  Eigen::MatrixXd eval = Tx - Eigen::VectorXd::Ones(nz) * at_bottom;
  Q_ = half * eval * Int * T.partialPivLu().inverse();

  // Interior nodes are the zeros of U_{N-1}; barycentric weights (-1)^j sin^2(j pi / N).
  E_ = Eigen::MatrixXd::Zero(nz, nz - 2);
  for (int i = 1; i < N; ++i) E_(i, i - 1) = 1.0;
  for (int end : {0, N}) {
    double denom = 0.0;
    Eigen::RowVectorXd row(nz - 2);
    for (int j = 1; j < N; ++j) {
      const double s = std::sin(kPi * j / N);
      const double wj = ((j % 2) ? -1.0 : 1.0) * s * s;
      const double c = wj / lobatto_gap(end, j, N);
      row(j - 1) = c;
      denom += c;
    }
    E_.row(end) = row / denom;
  }
}

double Grid::kmod(int i1, int i2) const { return std::hypot(k1(i1), k2(i2)); }

bool Grid::keep(int i1, int i2) const {
  return std::abs(m1(i1)) <= (n1_ - 1) / 3 && std::abs(m2(i2)) <= (n2_ - 1) / 3;
}

double Grid::min_spacing() const {
  return std::min({L1_ / n1_, L2_ / n2_, z_(1) - z_(0)});
}

GridPtr make_grid(const Params& params, int n1, int n2, int nz) {
  params.validate();
  auto check_horizontal = [](int n, const char* name) {
    if (n < 2 || n > Grid::kMaxHorizontal || n % 2 != 0) {
      throw ConfigError(std::string("grid.") + name + " must be even and within [2, 512], got " +
                        std::to_string(n));
    }
  };
  check_horizontal(n1, "n1");
  check_horizontal(n2, "n2");
  if (nz < 4 || nz > Grid::kMaxVertical) {
    throw ConfigError("grid.nz must be within [4, 257], got " + std::to_string(nz));
  }
  return std::make_shared<const Grid>(params.L1, params.L2, params.b, n1, n2, nz);
}

}  // namespace faraday
