#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "faraday/errors.hpp"
#include "faraday/floquet.hpp"

using namespace faraday;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sorted_moduli(const Eigen::MatrixXcd& M) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  std::vector<double> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(out.begin(), out.end());
  return out;
}

double power_iteration(const Eigen::MatrixXd& M) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(M.rows());
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd y = M * x;
    lambda = y.norm() / x.norm();
    x = y / y.norm();
  }
  return lambda;
}

double spectral_radius(const Eigen::Matrix2d& M) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(LinearModeSystem, ConstrainedBasis) {
  Params p;
  p.omega = 5.0;
  for (int nz : {9, 17}) {
    LinearModeSystem sys(2 * kPi, 0.0, p, nz, p.period() / 50);
    EXPECT_EQ(sys.constraint_count(), nz + 3);
    EXPECT_EQ(sys.state_dim(), 3 * nz + 1 - sys.constraint_count());
    EXPECT_LT(sys.constraint_residual(), 1e-10);
    const Eigen::MatrixXcd gram = sys.basis().adjoint() * sys.basis();
    EXPECT_LT((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LinearModeSystem, RejectsBadArguments) {
  Params p;
  p.omega = 5.0;
  EXPECT_THROW(LinearModeSystem(0.0, 0.0, p, 9, p.period() / 50), ContractError);
  EXPECT_THROW(LinearModeSystem(2 * kPi, 0.0, p, 9, p.period() / 50.5), ContractError);
  EXPECT_THROW(LinearModeSystem(2 * kPi, 0.0, p, 2, p.period() / 50), ContractError);
}

TEST(Monodromy, ZeroAmplitudeContracts) {
  Params p;
  p.omega = 2.0;
  for (const auto& k : default_k_samples(p)) {
    const Eigen::MatrixXcd M = monodromy(k, p, 17, p.period() / 100);
    EXPECT_LT(dominant_multiplier(M), 1.0) << "k = " << k[0] << ", " << k[1];
    EXPECT_LT(std::abs(M.determinant()), 1.0);
  }
}

TEST(Monodromy, PhaseShiftGivesSimilarMatrices) {
  Params p;
  p.omega = 5.0;
  p.amp = 0.3;
  const double dt = p.period() / 240;
  std::vector<std::vector<double>> spectra;
  for (double delta : {0.0, kPi / 3, kPi}) {
    p.profile = OscillationProfile::cosine(delta);
    spectra.push_back(sorted_moduli(monodromy({2 * kPi, 0.0}, p, 13, dt)));
  }
  for (std::size_t s = 1; s < spectra.size(); ++s) {
    for (std::size_t i = 0; i < spectra[0].size(); ++i) EXPECT_NEAR(spectra[s][i], spectra[0][i], 1e-8);
  }
}

TEST(Monodromy, TimeStepRefinement) {
  Params p;
  p.omega = 5.0;
  p.amp = 0.05;
  const double a = dominant_multiplier(monodromy({2 * kPi, 0.0}, p, 17, p.period() / 200));
  const double b = dominant_multiplier(monodromy({2 * kPi, 0.0}, p, 17, p.period() / 400));
  EXPECT_LE(std::abs(a - b), 1e-4);
}

TEST(Monodromy, IsotropicInDirection) {
  Params p;
  p.omega = 5.0;
  p.amp = 0.3;
  const double k = 2 * kPi;
  const double a = dominant_multiplier(monodromy({k, 0.0}, p, 13, p.period() / 100));
  const double b = dominant_multiplier(monodromy({k / std::sqrt(2.0), k / std::sqrt(2.0)}, p, 13, p.period() / 100));
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(DominantMultiplier, SimpleMatrices) {
  EXPECT_DOUBLE_EQ(dominant_multiplier(Eigen::MatrixXd(Eigen::MatrixXd::Identity(4, 4))), 1.0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 0.5;
  D(1, 1) = 2.0;
  EXPECT_NEAR(dominant_multiplier(D), 2.0, 1e-15);
  EXPECT_THROW(dominant_multiplier(Eigen::MatrixXd(2, 3)), ContractError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(dominant_multiplier(bad), ContractError);
}

TEST(DominantMultiplier, MatchesPowerIteration) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // A positive matrix has a simple real dominant eigenvalue, so power iteration converges.
  Eigen::MatrixXd M(30, 30);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) M(i, j) = u(rng);
  }
  EXPECT_NEAR(dominant_multiplier(M), power_iteration(M), 1e-8);
}

TEST(Classify, Tolerance) {
  EXPECT_EQ(classify(0.998), Stability::stable);
  EXPECT_EQ(classify(1.0005), Stability::marginal);
  EXPECT_EQ(classify(1.002), Stability::unstable);
  EXPECT_STREQ(to_string(Stability::marginal), "marginal");
}

TEST(KSamples, AxisLatticeDedupedByMagnitude) {
  Params p;
  EXPECT_EQ(default_k_samples(p).size(), 16u);
  p.L2 = 2.0;
  const auto ks = default_k_samples(p, 4);
  // Axis 2 adds pi and 3 pi; 2 pi and 4 pi repeat axis-1 magnitudes.
  ASSERT_EQ(ks.size(), 6u);
  EXPECT_NEAR(ks[4][1], kPi, 1e-15);
  EXPECT_NEAR(ks[5][1], 3 * kPi, 1e-15);
}

TEST(Sweep, ShapeDeterminismAndZeroRow) {
  Params p;
  const std::vector<double> amps = {0.0, 0.2};
  const std::vector<double> omegas = {2.0, 5.0};
  const std::vector<std::array<double, 2>> ks = {{2 * kPi, 0.0}, {4 * kPi, 0.0}};
  SweepOptions opt{13, 60, 1};
  const StabilityMap a = stability_sweep(amps, omegas, p, ks, opt);
  opt.threads = 3;
  const StabilityMap b = stability_sweep(amps, omegas, p, ks, opt);
  ASSERT_EQ(a.multiplier.size(), 8u);
  EXPECT_EQ(a.multiplier, b.multiplier);
  EXPECT_EQ(a.csv(), b.csv());
  for (double m : a.multiplier) EXPECT_GE(m, 0.0);
  for (std::size_t io = 0; io < omegas.size(); ++io) EXPECT_EQ(a.classification(0, io), Stability::stable);
  const std::string csv = a.csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const std::string by_k = a.csv_by_k();
  EXPECT_EQ(std::count(by_k.begin(), by_k.end(), '\n'), 9);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "amp,omega,k1,k2,multiplier,classification");
  const std::string contour = a.contour_csv();
  EXPECT_EQ(std::count(contour.begin(), contour.end(), '\n'), 3);
  EXPECT_THROW(stability_sweep({}, omegas, p, ks, opt), ContractError);
}

TEST(Threshold, CrossingInSubharmonicBand) {
  Params p;
  const double omega = 5.0;
  const std::vector<std::array<double, 2>> ks = {{2 * kPi, 0.0}};
  SweepOptions opt{13, 100, 1};
  const Threshold th = threshold_amplitude(omega, p, ks, 0.3, 0.8, 1e-3, opt);
  EXPECT_LT(th.multiplier_below, 1.0);
  EXPECT_GT(th.multiplier_above, 1.0);
  EXPECT_LE(th.amp_above - th.amp_below, 1e-3 * th.amp_above);
  // Increasing through the crossing.
  double last = 0.0;
  for (double f : {0.9, 0.95, 1.05, 1.1}) {
    const double m = max_multiplier(f * th.amp, omega, p, ks, opt);
    EXPECT_GT(m, last);
    last = m;
  }
  EXPECT_THROW(threshold_amplitude(omega, p, ks, 0.0, 0.1, 1e-3, opt), ContractError);
}

TEST(Mathieu, NormalFormPrincipalTongue) {
  const double q = 0.001;
  auto unstable = [&](double a) { return std::abs(mathieu_normal_form(a, q).trace()) > 2.0; };
  EXPECT_TRUE(unstable(1.0));
  EXPECT_FALSE(unstable(0.99));
  EXPECT_FALSE(unstable(1.01));
  auto edge = [&](double stable_a, double unstable_a) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (stable_a + unstable_a);
      (unstable(mid) ? unstable_a : stable_a) = mid;
    }
    return 0.5 * (stable_a + unstable_a);
  };
  const double lo = edge(0.99, 1.0);
  const double hi = edge(1.01, 1.0);
  EXPECT_LT(lo, 1.0);
  EXPECT_GT(hi, 1.0);
  EXPECT_LE(hi - lo, 0.01);
  EXPECT_NEAR(mathieu_normal_form(1.0, q).determinant(), 1.0, 1e-9);
}

TEST(Mathieu, OracleNeutralAndConservative) {
  Params p;
  p.omega = 3.0;
  EXPECT_NEAR(mathieu_oracle(2 * kPi, p), 1.0, 1e-12);
  p.amp = 0.1;
  EXPECT_NEAR(mathieu_monodromy(2 * kPi, p).determinant(), 1.0, 1e-9);
  EXPECT_THROW(mathieu_oracle(0.0, p), ContractError);
}

TEST(Mathieu, OracleMatchesRescaledNormalForm) {
  // With tau = pi omega t the oracle becomes the normal form with a = D G / (pi omega)^2 and
  // q = 2 D amp, where D = k tanh(k b) and G = g + sigma k^2.
  Params p;
  p.omega = 4.0;
  p.amp = 0.01;
  p.b = 0.7;
  const double k = 2 * kPi;
  const double D = k * std::tanh(k * p.b);
  const double a = D * (p.g + p.sigma * k * k) / (kPi * p.omega * kPi * p.omega);
  const double q = 2 * D * p.amp;
  const Eigen::Matrix2d M = mathieu_monodromy(k, p, 8000);
  const Eigen::Matrix2d N = mathieu_normal_form(a, q, 8000);
  EXPECT_NEAR(M.trace(), N.trace(), 1e-8 * std::max(1.0, std::abs(N.trace())));
  EXPECT_NEAR(spectral_radius(M), spectral_radius(N), 1e-8 * spectral_radius(N));
}

TEST(Monodromy, JointRefinementIsCauchy) {
  Params p;
  p.omega = 5.0;
  p.amp = 0.05;
  std::vector<double> m;
  for (auto [nz, steps] : {std::pair{9, 100}, std::pair{13, 200}, std::pair{17, 400}}) {
    m.push_back(dominant_multiplier(monodromy({2 * kPi, 0.0}, p, nz, p.period() / steps)));
  }
  EXPECT_LE(std::abs(m[2] - m[1]), 1e-4);
}

TEST(Sweep, ClassificationStableUnderDoubledKSamples) {
  Params p;
  const std::vector<double> amps = {0.0, 0.3, 0.7};
  const std::vector<double> omegas = {5.0};
  SweepOptions opt{13, 100, 0};
  const StabilityMap a = stability_sweep(amps, omegas, p, default_k_samples(p, 16), opt);
  const StabilityMap b = stability_sweep(amps, omegas, p, default_k_samples(p, 32), opt);
  for (std::size_t ia = 0; ia < amps.size(); ++ia) EXPECT_EQ(a.classification(ia, 0), b.classification(ia, 0));
  EXPECT_EQ(a.classification(2, 0), Stability::unstable);
}
