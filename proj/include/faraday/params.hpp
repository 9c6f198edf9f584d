#pragma once

#include <vector>

namespace faraday {

/// 1-periodic oscillation profile f stored as a truncated Fourier series
///   f(s) = c0 + sum_n a_n cos(2 pi n s) + b_n sin(2 pi n s).
class OscillationProfile {
 public:
  /// f(s) = cos(2 pi s - delta).
  static OscillationProfile cosine(double delta = 0.0);
  /// Throws ConfigError unless the series is non-constant and max |f| <= 1.
  static OscillationProfile fourier(double c0, std::vector<double> cos_coeffs,
                                    std::vector<double> sin_coeffs);

  double value(double s) const { return derivative(s, 0); }
  /// Derivative of order 0..3 with respect to the phase variable s.
  double derivative(double s, int order) const;
  double d1(double s) const { return derivative(s, 1); }
  double d2(double s) const { return derivative(s, 2); }
  double d3(double s) const { return derivative(s, 3); }

  double mean() const { return c0_; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

 private:
  OscillationProfile(double c0, std::vector<double> a, std::vector<double> b);

  double c0_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Physical parameters of the layer. Invariants are enforced by validate().
struct Params {
  double L1 = 1.0;
  double L2 = 1.0;
  double b = 1.0;      // equilibrium depth
  double g = 1.0;      // gravity
  double mu = 1.0;     // viscosity
  double sigma = 1.0;  // surface tension
  double amp = 0.0;    // oscillation amplitude A
  double omega = 1.0;  // oscillation frequency
  OscillationProfile profile = OscillationProfile::cosine();

  void validate() const;

  /// Period of the forcing coefficient t -> f''(omega t).
  double period() const { return 1.0 / omega; }
  /// Parametric gravity modulation A omega^2 f''(omega t).
  double parametric(double t) const { return amp * omega * omega * profile.d2(omega * t); }
};

}  // namespace faraday
